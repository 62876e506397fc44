#include "robustlab/influence.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

constexpr double kInteriorMargin = 1e-8;
constexpr double kMaxCondition = 1e14;

void require_interior(const ErmProblem& problem, const ErmSolution& solution) {
  const auto& set = problem.feasible;
  switch (set.kind) {
    case FeasibleKind::unconstrained: return;
    case FeasibleKind::coeff_box: {
      const Eigen::VectorXd& a = solution.f.coeffs();
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double lo = set.lower.size() == 1 ? set.lower[0] : set.lower[i];
        const double hi = set.upper.size() == 1 ? set.upper[0] : set.upper[i];
        const double margin = kInteriorMargin * std::max({1.0, std::abs(lo), std::abs(hi)});
        if (a[i] <= lo + margin || a[i] >= hi - margin) {
          throw CapabilityError("influence function at a boundary solution is not supported");
        }
      }
      return;
    }
    case FeasibleKind::rkhs_ball:
      if (rkhs_norm(solution.f) >= set.radius * (1.0 - kInteriorMargin)) {
        throw CapabilityError("influence function at a boundary solution is not supported");
      }
      return;
  }
}

bool same_inputs(const PointSet& a, const PointSet& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

InfluenceSystem influence_system(const ErmProblem& problem, const ErmSolution& solution, const Point& outlier) {
  if (problem.loss.smoothness() != Smoothness::C2 && problem.loss.kind != LossKind::huber) {
    throw CapabilityError("influence function needs a twice differentiable loss");
  }
  if (outlier.size() != problem.data.dim() + 1) throw InputError("outlier dimension does not match the data");
  if (!same_inputs(solution.f.basis(), problem.data.x)) {
    throw InputError("influence function needs the solution carried on the sample inputs");
  }
  require_interior(problem, solution);

  const Eigen::Index n = problem.data.size();
  const Eigen::Index dim = problem.data.dim();
  const Eigen::VectorXd w = problem.sample_weights();
  const double lambda = problem.lambda;

  InfluenceSystem sys;
  sys.basis.resize(n + 1, dim);
  sys.basis.topRows(n) = problem.data.x;
  sys.basis.row(n) = outlier.head(dim).transpose();
  sys.gram = gram_matrix(problem.kernel, sys.basis);

  const Eigen::VectorXd fx = sys.gram.topLeftCorner(n, n) * solution.f.coeffs();
  const double f_outlier = sys.gram.row(n).head(n).dot(solution.f.coeffs());

  sys.matrix = Eigen::MatrixXd::Zero(n + 1, n + 1);
  sys.rhs.resize(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double curvature = loss_hess(problem.loss, problem.data.y[i], fx[i]);
    sys.matrix.row(i) = (w[i] * curvature) * sys.gram.row(i);
    sys.matrix(i, i) += 2.0 * lambda;
    sys.rhs[i] = w[i] * loss_grad(problem.loss, problem.data.y[i], fx[i]);
  }
  sys.matrix(n, n) = 2.0 * lambda;
  sys.rhs[n] = -loss_grad(problem.loss, outlier[dim], f_outlier);

  if (lambda == 0.0) {
    // Without the ridge term the outlier section has no equation of its own;
    // it is only representable when x~ coincides with a sample input.
    Eigen::Index twin = -1;
    for (Eigen::Index i = 0; i < n && twin < 0; ++i) {
      if ((problem.data.x.row(i) - sys.basis.row(n)).cwiseAbs().maxCoeff() <= 1e-12) twin = i;
    }
    if (twin < 0 && sys.rhs[n] != 0.0) {
      throw ConditioningError("lambda = 0 and the outlier input is not a sample input: influence not representable");
    }
    if (twin >= 0) sys.rhs[twin] += sys.rhs[n];
    sys.rhs[n] = 0.0;
    sys.matrix(n, n) = 1.0;
    const double jitter = gram_jitter(sys.gram);
    for (Eigen::Index i = 0; i < n; ++i) sys.matrix(i, i) += jitter;
  }
  return sys;
}

InfluenceReport influence_function(const ErmProblem& problem, const ErmSolution& solution, const Point& outlier) {
  const InfluenceSystem sys = influence_system(problem, solution, outlier);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix);
  const auto& sv = svd.singularValues();
  const double condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    throw ConditioningError("influence system is singular (condition " + std::to_string(condition) + ")");
  }
  const Eigen::VectorXd coeffs = sys.matrix.partialPivLu().solve(sys.rhs);

  InfluenceReport report{RkhsFunction(problem.kernel, sys.basis, coeffs), 0.0, std::nullopt, 0.0, {}};
  report.system_condition = condition;
  report.rhs_norm = std::sqrt(std::max(sys.rhs.dot(sys.gram * sys.rhs), 0.0));
  report.measure = problem.weights.size() == 0
                       ? "uniform empirical measure on " + std::to_string(problem.data.size()) + " samples"
                       : "weighted empirical measure on " + std::to_string(problem.data.size()) + " atoms";
  return report;
}

ErmProblem contaminated_problem(const ErmProblem& problem, const Point& outlier, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("contamination weight t must lie in [0, 1]");
  if (outlier.size() != problem.data.dim() + 1) throw InputError("outlier dimension does not match the data");
  if (problem.feasible.kind == FeasibleKind::coeff_box && problem.feasible.lower.size() != 1) {
    throw InputError("contamination needs a uniform coefficient box");
  }
  const Eigen::Index n = problem.data.size();
  const Eigen::Index dim = problem.data.dim();
  PointSet x(n + 1, dim);
  x.topRows(n) = problem.data.x;
  x.row(n) = outlier.head(dim).transpose();
  Eigen::VectorXd y(n + 1);
  y.head(n) = problem.data.y;
  y[n] = outlier[dim];
  Eigen::VectorXd w(n + 1);
  w.head(n) = (1.0 - t) * problem.sample_weights();
  w[n] = t;
  return problem.with_data(Dataset(std::move(x), std::move(y)), std::move(w));
}

std::vector<FdQuotient> influence_fd(const ErmProblem& problem, const Point& outlier, const std::vector<double>& t_list,
                                     std::uint64_t seed, const SolverOptions& opts) {
  for (double t : t_list) {
    if (!(t > 0.0 && t < 1.0)) throw InputError("difference-quotient steps must lie in (0, 1)");
  }
  const ErmSolution clean = solve_erm(problem, seed, opts);
  std::vector<FdQuotient> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    const ErmSolution mixed = solve_erm(contaminated_problem(problem, outlier, t), seed, opts);
    out.push_back({t, rkhs_axpy(mixed.f, -1.0, clean.f).scaled(1.0 / t)});
  }
  return out;
}

RkhsFunction approximate_contaminated_solution(const RkhsFunction& clean, const RkhsFunction& influence,
                                               Eigen::Index n) {
  if (n < 1) throw InputError("sample count must be >= 1");
  return rkhs_axpy(clean, 1.0 / static_cast<double>(n), influence);
}

UpsilonReport upsilon_bound(const ErmProblem& problem, const std::vector<Point>& outliers,
                            const std::vector<double>& t_grid, const SolverOptions& opts) {
  if (t_grid.empty()) throw InputError("upsilon_bound needs a nonempty t grid");
  for (double t : t_grid) {
    if (!(t >= 0.0 && t < 1.0)) throw InputError("upsilon t grid must lie in [0, 1)");
  }
  const Eigen::Index n = problem.data.size();
  const Eigen::Index dim = problem.data.dim();
  const Eigen::VectorXd w = problem.sample_weights();
  const ErmSolution clean = solve_erm(problem, 0, opts);

  UpsilonReport report;
  report.t_grid = t_grid;
  report.entries.resize(outliers.size());
  std::vector<std::string> errors(outliers.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < outliers.size(); ++k) {
    try {
      const Point& z = outliers[k];
      if (z.size() != dim + 1) throw InputError("outlier dimension does not match the data");
      PointSet basis(n + 1, dim);
      basis.topRows(n) = problem.data.x;
      basis.row(n) = z.head(dim).transpose();
      const Eigen::MatrixXd gram = gram_matrix(problem.kernel, basis);
      double upsilon = 0.0;
      for (double t : t_grid) {
        const RkhsFunction ft = t == 0.0 ? clean.f : solve_erm(contaminated_problem(problem, z, t), 0, opts).f;
        const Eigen::VectorXd values = rkhs_eval_many(ft, basis);
        Eigen::VectorXd coeffs(n + 1);
        for (Eigen::Index i = 0; i < n; ++i) coeffs[i] = w[i] * loss_grad(problem.loss, problem.data.y[i], values[i]);
        coeffs[n] = -loss_grad(problem.loss, z[dim], values[n]);
        upsilon = std::max(upsilon, std::sqrt(std::max(coeffs.dot(gram * coeffs), 0.0)));
      }
      UpsilonEntry entry{z, upsilon, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      try {
        entry.if_norm = rkhs_norm(influence_function(problem, clean, z).influence);
        entry.ratio = upsilon > 0.0 ? entry.if_norm / upsilon : (entry.if_norm == 0.0 ? 0.0 : entry.ratio);
      } catch (const CapabilityError&) {
      }
      report.entries[k] = std::move(entry);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k].empty()) throw Error("upsilon_bound: outlier " + std::to_string(k) + ": " + errors[k]);
  }
  for (const auto& e : report.entries) report.sup = std::max(report.sup, e.upsilon);
  return report;
}

}  // namespace robustlab
