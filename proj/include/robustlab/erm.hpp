#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "robustlab/dataset.hpp"
#include "robustlab/losses.hpp"
#include "robustlab/measure.hpp"
#include "robustlab/rkhs.hpp"

namespace robustlab {

/**
 * Regularized empirical risk minimization over an RKHS:
 *
 *   minimize  sum_i w_i c(z^i, f(x^i)) + lambda |f|_k^2   over f in F.
 *
 * With empty `weights` the sample weights are uniform 1/N. The solution is
 * searched in the span of the sample sections k_{x^i}; box constraints act
 * on those coefficients.
 */
struct ErmProblem {
  Dataset data;
  Eigen::VectorXd weights;
  KernelSpec kernel;
  LossSpec loss;
  double lambda = 0.0;
  FeasibleSet feasible;

  ErmProblem(Dataset data, KernelSpec kernel, LossSpec loss, double lambda,
             FeasibleSet feasible = FeasibleSet::unconstrained(), Eigen::VectorXd weights = {});

  /// Problem posed on a weighted measure whose atoms are joint points (x, y).
  static ErmProblem from_measure(const EmpiricalMeasure& measure, KernelSpec kernel, LossSpec loss,
                                 double lambda, FeasibleSet feasible = FeasibleSet::unconstrained());

  Eigen::VectorXd sample_weights() const;
  /// Same kernel, loss, lambda and feasible set on different data.
  ErmProblem with_data(Dataset other, Eigen::VectorXd other_weights = {}) const;
};

struct SolverOptions {
  double tol = 1e-8;             // natural residual, smooth losses
  double nonsmooth_tol = 1e-6;   // relative duality gap or windowed decrease, hinge/pinball
  int max_iter = 50000;          // iterations, or sweeps of the dual method
  int nonsmooth_window = 2000;
  bool closed_form = true;       // squared-loss linear-solve fast path
  bool dual_method = true;       // hinge/pinball dual ascent when lambda > 0 and no box
  bool random_init = false;      // start from a seeded random point instead of 0
  double init_scale = 1.0;       // RKHS norm of the random starting point
};

enum class SolveMethod { closed_form, accelerated_gradient, subgradient, dual_coordinate };

std::string_view to_string(SolveMethod method);

struct ErmSolution {
  RkhsFunction f;
  double objective = 0.0;
  /// Natural residual for C1 losses. For hinge/pinball: the primal-dual gap
  /// (dual method) or the windowed objective decrease (subgradient method).
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveMethod method = SolveMethod::closed_form;
  /// Objective after every accepted iterate (iterative methods only).
  std::vector<double> objective_trace;
};

/// sum_i w_i c(z^i, f(x^i)) + lambda |f|_k^2 for an arbitrary f.
double objective(const ErmProblem& problem, const RkhsFunction& f);

/// Deterministic given (problem, seed, opts). Throws ConvergenceError with
/// the last iterate when max_iter is exhausted.
ErmSolution solve_erm(const ErmProblem& problem, std::uint64_t seed = 0, const SolverOptions& opts = {});

/// |f - Proj_F(f - g(f))|_k with probe step 1, where
/// g(f) = sum_i w_i c'_2(z^i, f(x^i)) k_{x^i} + 2 lambda f.
/// For a coefficient box the projection acts on coefficients and the
/// coefficient-space gradient K g is used, so f must be carried on the
/// sample inputs. CapabilityError for nonsmooth losses.
double optimality_residual(const ErmProblem& problem, const RkhsFunction& f);

struct LipschitzSample {
  double solution_distance = 0.0;
  double data_distance = 0.0;
  double ratio = 0.0;
};

struct LipschitzEstimate {
  std::vector<LipschitzSample> samples;  // sorted by ratio
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  int pairs_tested = 0;
  int pairs_skipped = 0;  // identical data, 0/0
};

/// Produces a pair of equally sized datasets from a seed.
using PerturbationFamily = std::function<std::pair<Dataset, Dataset>(std::uint64_t seed)>;

/// Sample distance between paired datasets,
///   (2/N) sum_l max{1, |z1^l|, |z2^l|}^(p-1) |z1^l - z2^l|.
double paired_sample_distance(const Dataset& a, const Dataset& b, double p);

/// Solve both problems of `num_pairs` pairs from `family` and record
/// |f_1 - f_2|_k / paired_sample_distance. Pairs run in parallel with seeds
/// derive_seed(seed, k).
LipschitzEstimate estimate_lipschitz(const ErmProblem& problem_template, const PerturbationFamily& family,
                                     int num_pairs, std::uint64_t seed, double p = 2.0,
                                     const SolverOptions& opts = {});

}  // namespace robustlab
