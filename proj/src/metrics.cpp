#include "robustlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

void check_cap(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap) {
  const auto total = static_cast<std::size_t>(mu.size() + nu.size());
  if (total > cap) {
    throw CapacityError("transport problem has " + std::to_string(total) + " atoms, cap is " + std::to_string(cap));
  }
  if (mu.dim() != nu.dim()) throw InputError("measures live in different dimensions");
}

Eigen::MatrixXd euclidean_cost(const PointSet& a, const PointSet& b) {
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) c(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return c;
}

MetricResult ot_result(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const Eigen::MatrixXd& cost,
                       MetricKind kind) {
  TransportSolution sol = solve_transport(mu.weights(), nu.weights(), cost);
  MetricResult out;
  out.value = std::max(sol.cost, 0.0);
  out.kind = kind;
  out.certificate = std::move(sol);
  return out;
}

}  // namespace

double kantorovich_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw InputError("kantorovich_1d needs 1-D measures");
  // Signed masses: +mu, -nu. The running sum is F_mu - F_nu.
  std::vector<std::pair<double, double>> events;
  events.reserve(static_cast<std::size_t>(mu.size() + nu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) events.emplace_back(mu.atoms()(i, 0), mu.weights()[i]);
  for (Eigen::Index i = 0; i < nu.size(); ++i) events.emplace_back(nu.atoms()(i, 0), -nu.weights()[i]);
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double cdf_gap = 0.0;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    cdf_gap += events[k].second;
    area += std::abs(cdf_gap) * (events[k + 1].first - events[k].first);
  }
  return area;
}

MetricResult kantorovich_ot(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t atom_cap) {
  check_cap(mu, nu, atom_cap);
  return ot_result(mu, nu, euclidean_cost(mu.atoms(), nu.atoms()), MetricKind::kantorovich_ot);
}

Eigen::MatrixXd fm_cost(const PointSet& a, const PointSet& b, double p) {
  if (!(p >= 1.0)) throw InputError("Fortet-Mourier order p must be >= 1");
  if (a.cols() != b.cols()) throw InputError("fm_cost: dimension mismatch");
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double na = a.row(i).norm();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double growth = p == 1.0 ? 1.0 : std::pow(std::max({1.0, na, b.row(j).norm()}), p - 1.0);
      c(i, j) = growth * (a.row(i) - b.row(j)).norm();
    }
  }
  return c;
}

Eigen::MatrixXd shortest_path_closure(Eigen::MatrixXd cost) {
  if (cost.rows() != cost.cols()) throw InputError("shortest_path_closure needs a square matrix");
  const Eigen::Index n = cost.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd via_col = cost.col(k);
    const Eigen::RowVectorXd via_row = cost.row(k);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dik = via_col[i];
      for (Eigen::Index j = 0; j < n; ++j) {
        const double cand = dik + via_row[j];
        if (cand < cost(i, j)) cost(i, j) = cand;
      }
    }
  }
  return cost;
}

namespace serial {

Eigen::MatrixXd shortest_path_closure(Eigen::MatrixXd cost) {
  if (cost.rows() != cost.cols()) throw InputError("shortest_path_closure needs a square matrix");
  const Eigen::Index n = cost.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double cand = cost(i, k) + cost(k, j);
        if (cand < cost(i, j)) cost(i, j) = cand;
      }
    }
  }
  return cost;
}

}  // namespace serial

FmBounds fm_bounds(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p, std::size_t atom_cap) {
  check_cap(mu, nu, atom_cap);
  const Eigen::MatrixXd direct = fm_cost(mu.atoms(), nu.atoms(), p);

  PointSet all(mu.size() + nu.size(), mu.dim());
  all.topRows(mu.size()) = mu.atoms();
  all.bottomRows(nu.size()) = nu.atoms();
  const Eigen::MatrixXd closure = shortest_path_closure(fm_cost(all, all, p));
  const Eigen::MatrixXd chained = closure.topRightCorner(mu.size(), nu.size());

  FmBounds out;
  out.upper = ot_result(mu, nu, direct, MetricKind::fm_upper);
  out.lower = ot_result(mu, nu, chained, MetricKind::fm_lower);
  return out;
}

EmpiricalMeasure law_of_estimator(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.empty()) throw InputError("law_of_estimator needs at least one value");
  if (!weights.empty() && weights.size() != values.size()) throw InputError("law_of_estimator: weight count mismatch");
  std::map<double, double> merged;
  const double uniform = 1.0 / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw InputError("law_of_estimator: non-finite value");
    merged[values[i]] += weights.empty() ? uniform : weights[i];
  }
  PointSet atoms(static_cast<Eigen::Index>(merged.size()), 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(merged.size()));
  Eigen::Index k = 0;
  for (const auto& [value, mass] : merged) {
    atoms(k, 0) = value;
    w[k] = mass;
    ++k;
  }
  return {std::move(atoms), std::move(w)};
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InputError("ks_statistic needs samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    stat = std::max({stat, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return stat;
}

void write_plan_csv(std::ostream& out, const TransportSolution& solution) {
  out << "source_index,target_index,mass\n";
  for (const auto& e : solution.plan) {
    if (e.mass == 0.0) continue;
    out << fmt::format("{},{},{}\n", e.source, e.target, e.mass);
  }
}

void write_plan_csv(const std::filesystem::path& path, const TransportSolution& solution) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_plan_csv(out, solution);
}

}  // namespace robustlab
