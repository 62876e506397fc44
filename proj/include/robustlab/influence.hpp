#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustlab/erm.hpp"

namespace robustlab {

/**
 * Linear system for the influence direction h of the regularized estimator
 * under contamination toward z~ = (x~, y~):
 *
 *   sum_i w_i c''_i k_{x^i} h(x^i) + 2 lambda h
 *       = sum_i w_i c'_i k_{x^i} - c'(z~, f(x~)) k_{x~}
 *
 * where c'_i, c''_i are loss derivatives at the clean solution f. Writing
 * h = sum_j b_j k_{u_j} over u = (x^1, ..., x^N, x~) and matching the
 * coefficient of each section gives `matrix * b = rhs`.
 */
struct InfluenceSystem {
  PointSet basis;            // sample inputs followed by the outlier input
  Eigen::MatrixXd gram;      // Gram matrix of `basis`
  Eigen::MatrixXd matrix;    // coefficient map of the operator
  Eigen::VectorXd rhs;
};

InfluenceSystem influence_system(const ErmProblem& problem, const ErmSolution& solution, const Point& outlier);

struct InfluenceReport {
  RkhsFunction influence;        // over the sample inputs and the outlier input
  double system_condition = 0.0; // 2-norm condition number of the coefficient system
  std::optional<double> fd_error;
  double rhs_norm = 0.0;         // RKHS norm of the right-hand side function
  std::string measure;           // which measure stands in for P
};

/// Influence function of f_{(.), lambda} at the problem's empirical measure
/// toward the outlier (joint point). Needs a C2 loss and a solution strictly
/// inside the feasible set.
InfluenceReport influence_function(const ErmProblem& problem, const ErmSolution& solution, const Point& outlier);

struct FdQuotient {
  double t = 0.0;
  RkhsFunction quotient;
};

/// Difference quotients (f_{(1-t)P + t delta} - f_P) / t, one solve per t.
std::vector<FdQuotient> influence_fd(const ErmProblem& problem, const Point& outlier, const std::vector<double>& t_list,
                                     std::uint64_t seed = 0, const SolverOptions& opts = {});

/// Problem on the measure (1 - t) P + t delta_outlier; P is the problem's
/// weighted sample.
ErmProblem contaminated_problem(const ErmProblem& problem, const Point& outlier, double t);

/// f + IF / n.
RkhsFunction approximate_contaminated_solution(const RkhsFunction& clean, const RkhsFunction& influence, Eigen::Index n);

struct UpsilonEntry {
  Point outlier;
  double upsilon = 0.0;
  double if_norm = 0.0;  // NaN when the influence function is unavailable
  double ratio = 0.0;    // if_norm / upsilon, empirical stand-in for the subregularity modulus
};

struct UpsilonReport {
  std::vector<UpsilonEntry> entries;
  double sup = 0.0;
  std::vector<double> t_grid;
};

/// Upsilon(z~) = max over t in t_grid of
///   | sum_i w_i c'(z^i, f_t(x^i)) k_{x^i} - c'(z~, f_t(x~)) k_{x~} |_k
/// with f_t solved on the contaminated measure. Outliers run in parallel.
UpsilonReport upsilon_bound(const ErmProblem& problem, const std::vector<Point>& outliers,
                            const std::vector<double>& t_grid = {0.0, 0.025, 0.05, 0.075, 0.1},
                            const SolverOptions& opts = {});

}  // namespace robustlab
