#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "robustlab/errors.hpp"
#include "robustlab/metrics.hpp"

namespace robustlab {

namespace {

struct Cell {
  Eigen::Index row;
  Eigen::Index col;
};

// Spanning tree over m row nodes (0..m-1) and n column nodes (m..m+n-1);
// every basic cell is an edge.
class BasisTree {
 public:
  BasisTree(Eigen::Index m, Eigen::Index n) : m_(m), adjacency_(static_cast<std::size_t>(m + n)) {}

  void rebuild(const std::vector<Cell>& basis) {
    for (auto& a : adjacency_) a.clear();
    for (std::size_t e = 0; e < basis.size(); ++e) {
      adjacency_[static_cast<std::size_t>(basis[e].row)].push_back(e);
      adjacency_[static_cast<std::size_t>(m_ + basis[e].col)].push_back(e);
    }
  }

  void potentials(const std::vector<Cell>& basis, const Eigen::MatrixXd& cost, Eigen::VectorXd& u,
                  Eigen::VectorXd& v) const {
    const std::size_t nodes = adjacency_.size();
    std::vector<char> seen(nodes, 0);
    std::vector<std::size_t> stack{0};
    u.setZero();
    v.setZero();
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t e : adjacency_[node]) {
        const Cell& c = basis[e];
        const std::size_t row = static_cast<std::size_t>(c.row);
        const std::size_t col = static_cast<std::size_t>(m_ + c.col);
        const std::size_t other = node == row ? col : row;
        if (seen[other]) continue;
        seen[other] = 1;
        if (other == col) {
          v[c.col] = cost(c.row, c.col) - u[c.row];
        } else {
          u[c.row] = cost(c.row, c.col) - v[c.col];
        }
        stack.push_back(other);
      }
    }
  }

  // Basic-cell indices on the tree path from column node `col` to row node `row`.
  std::vector<std::size_t> path(const std::vector<Cell>& basis, Eigen::Index col, Eigen::Index row) const {
    const std::size_t start = static_cast<std::size_t>(m_ + col);
    const std::size_t goal = static_cast<std::size_t>(row);
    std::vector<std::ptrdiff_t> via(adjacency_.size(), -1);
    std::vector<char> seen(adjacency_.size(), 0);
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size() && !seen[goal]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t e : adjacency_[node]) {
        const Cell& c = basis[e];
        const std::size_t r = static_cast<std::size_t>(c.row);
        const std::size_t k = static_cast<std::size_t>(m_ + c.col);
        const std::size_t other = node == r ? k : r;
        if (seen[other]) continue;
        seen[other] = 1;
        via[other] = static_cast<std::ptrdiff_t>(e);
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> edges;
    std::size_t node = goal;
    while (node != start) {
      const std::size_t e = static_cast<std::size_t>(via[node]);
      edges.push_back(e);
      const Cell& c = basis[e];
      const std::size_t r = static_cast<std::size_t>(c.row);
      node = node == r ? static_cast<std::size_t>(m_ + c.col) : r;
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

 private:
  Eigen::Index m_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace

TransportSolution solve_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                  const Eigen::MatrixXd& cost) {
  const Eigen::Index m = supply.size();
  const Eigen::Index n = demand.size();
  if (m == 0 || n == 0) throw InputError("transport problem needs sources and targets");
  if (cost.rows() != m || cost.cols() != n) throw InputError("transport cost has the wrong shape");
  if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any()) throw InputError("transport masses must be >= 0");
  if (std::abs(supply.sum() - demand.sum()) > 1e-9) throw InputError("transport supply and demand totals differ");

  // Northwest-corner basic feasible solution with exactly m + n - 1 cells.
  std::vector<Cell> basis;
  std::vector<double> flow;
  basis.reserve(static_cast<std::size_t>(m + n - 1));
  {
    Eigen::VectorXd a = supply;
    Eigen::VectorXd b = demand;
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    while (true) {
      double q = std::min(a[i], b[j]);
      if (i == m - 1 && j == n - 1) q = std::max(a[i], 0.0);
      basis.push_back({i, j});
      flow.push_back(q);
      a[i] -= q;
      b[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  BasisTree tree(m, n);
  Eigen::VectorXd u(m), v(n);
  std::vector<char> is_basic(static_cast<std::size_t>(m * n), 0);
  for (const Cell& c : basis) is_basic[static_cast<std::size_t>(c.row * n + c.col)] = 1;

  int pivots = 0;
  while (true) {
    tree.rebuild(basis);
    tree.potentials(basis, cost, u, v);

    // Bland: first cell in row-major order with negative reduced cost.
    Eigen::Index enter_row = -1;
    Eigen::Index enter_col = -1;
    for (Eigen::Index i = 0; i < m && enter_row < 0; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (is_basic[static_cast<std::size_t>(i * n + j)]) continue;
        if (cost(i, j) - u[i] - v[j] < -eps) {
          enter_row = i;
          enter_col = j;
          break;
        }
      }
    }
    if (enter_row < 0) break;

    const std::vector<std::size_t> cycle = tree.path(basis, enter_col, enter_row);
    // Cells at even positions lose mass, odd positions gain.
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cycle.size(); k += 2) theta = std::min(theta, flow[cycle[k]]);
    std::size_t leave = cycle.size();
    Eigen::Index leave_key = std::numeric_limits<Eigen::Index>::max();
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      const Cell& c = basis[cycle[k]];
      const Eigen::Index key = c.row * n + c.col;
      if (flow[cycle[k]] == theta && key < leave_key) {
        leave = k;
        leave_key = key;
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      flow[cycle[k]] += (k % 2 == 0) ? -theta : theta;
    }
    const std::size_t leaving_edge = cycle[leave];
    is_basic[static_cast<std::size_t>(leave_key)] = 0;
    basis[leaving_edge] = {enter_row, enter_col};
    flow[leaving_edge] = theta;
    is_basic[static_cast<std::size_t>(enter_row * n + enter_col)] = 1;
    ++pivots;
  }

  TransportSolution out;
  out.pivots = pivots;
  std::vector<std::size_t> order(basis.size());
  for (std::size_t e = 0; e < order.size(); ++e) order[e] = e;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return basis[a].row * n + basis[a].col < basis[b].row * n + basis[b].col;
  });
  for (std::size_t e : order) {
    const double mass = std::max(flow[e], 0.0);
    out.cost += mass * cost(basis[e].row, basis[e].col);
    out.plan.push_back({basis[e].row, basis[e].col, mass});
  }
  out.dual_objective = supply.dot(u) + demand.dot(v);
  out.source_potential = u;
  out.target_potential = v;
  return out;
}

}  // namespace robustlab
