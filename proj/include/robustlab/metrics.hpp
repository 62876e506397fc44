#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "robustlab/measure.hpp"

namespace robustlab {

struct TransportEntry {
  Eigen::Index source = 0;
  Eigen::Index target = 0;
  double mass = 0.0;
};

/// Optimal solution of a discrete transport problem.
struct TransportSolution {
  double cost = 0.0;
  /// Dual objective sum_i a_i u_i + sum_j b_j v_j at the final potentials.
  double dual_objective = 0.0;
  std::vector<TransportEntry> plan;  // basic cells, row-major order
  Eigen::VectorXd source_potential;
  Eigen::VectorXd target_potential;
  int pivots = 0;
};

/**
 * Transportation simplex on the bipartite graph sources x targets
 * (northwest-corner start, MODI potentials, Bland's rule for both the
 * entering and the leaving cell). Supplies and demands must be nonnegative
 * with equal totals (1e-9).
 */
TransportSolution solve_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                  const Eigen::MatrixXd& cost);

enum class MetricKind { kantorovich_1d, kantorovich_ot, fm_upper, fm_lower };

struct MetricResult {
  double value = 0.0;
  MetricKind kind = MetricKind::kantorovich_ot;
  std::optional<TransportSolution> certificate;
};

struct FmBounds {
  MetricResult lower;
  MetricResult upper;
};

/// Default cap on the total number of atoms handed to the LP.
inline constexpr std::size_t kDefaultAtomCap = 2000;

/// Exact 1-Wasserstein distance between 1-D measures: area between CDFs.
double kantorovich_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Kantorovich distance with cost |z - z'| by exact discrete OT.
MetricResult kantorovich_ot(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            std::size_t atom_cap = kDefaultAtomCap);

/// Order-p Fortet-Mourier bracket. The upper bound is OT with cost
/// c_p(z, z') = max{1, |z|, |z'|}^(p-1) |z - z'|; the lower bound is OT with
/// the shortest-path closure of c_p over the union of both supports.
FmBounds fm_bounds(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                   std::size_t atom_cap = kDefaultAtomCap);

/// Pairwise c_p cost between the rows of `a` and `b`.
Eigen::MatrixXd fm_cost(const PointSet& a, const PointSet& b, double p);

/// All-pairs shortest-path closure of a nonnegative cost matrix
/// (Floyd-Warshall, rows updated in parallel).
Eigen::MatrixXd shortest_path_closure(Eigen::MatrixXd cost);

/// Uniform-weight law over values with exact duplicates merged, atoms sorted.
EmpiricalMeasure law_of_estimator(const std::vector<double>& values, const std::vector<double>& weights = {});

/// sup_t |F_n(t) - cdf(t)| for the empirical CDF of `samples`.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// `source_index,target_index,mass`, one row per plan entry.
void write_plan_csv(std::ostream& out, const TransportSolution& solution);
void write_plan_csv(const std::filesystem::path& path, const TransportSolution& solution);

namespace serial {

/// Single-threaded reference for robustlab::shortest_path_closure.
Eigen::MatrixXd shortest_path_closure(Eigen::MatrixXd cost);

}  // namespace serial

}  // namespace robustlab
