#pragma once

#include <cstdint>
#include <string_view>

#include "robustlab/dataset.hpp"
#include "robustlab/measure.hpp"

namespace robustlab {

enum class Response {
  square,             // y = x^2
  square_plus_noise,  // y = x^2 + eps, eps ~ Normal(0, 0.01)
  cube,               // y = x^3, used for outliers
};

std::string_view to_string(Response response);
Response response_from_string(std::string_view name);

/// Scalar input x ~ Normal(mu, sigma^2) with a deterministic response rule.
struct BaseModel {
  double mu = 0.0;
  double sigma = 1.0;
  Response response = Response::square;

  static constexpr double kNoiseVariance = 0.01;

  void validate() const;
  double cdf(double x) const;
  double quantile(double u) const;
  /// Response at x. `noise` is a standard normal draw, scaled internally.
  double respond(double x, double noise) const;
};

/**
 * Tail-flattening perturbation Q_x of the input law P_x:
 *
 *   F_Q(x) = F_P(x)              x <= x0
 *            p + beta (x - x0)   x0 <= x <= x1
 *            1                   x > x1
 *
 * with x0 = F_P^{-1}(p) and x1 = x0 + (1 - p) / beta. The identity
 * perturbation (Q = P) is available for pipeline checks.
 */
struct TailPerturbation {
  double p = 0.9;
  double beta = 0.5;
  bool identity = false;

  static TailPerturbation none() { return {0.9, 0.5, true}; }

  void validate() const;
  double x0(const BaseModel& model) const;
  double x1(const BaseModel& model) const;
  double cdf(const BaseModel& model, double x) const;
  double quantile(const BaseModel& model, double u) const;
};

/// (1 - t) P + t delta_outlier. The outlier is a joint point (x, y).
struct MixtureModel {
  BaseModel base;
  Point outlier;
  double t = 0.0;

  void validate() const;
};

Dataset sample_base(const BaseModel& model, Eigen::Index n, std::uint64_t seed);
Dataset sample_tail_perturbed(const BaseModel& model, const TailPerturbation& pert, Eigen::Index n,
                              std::uint64_t seed);
/// Switching-variable sampler: each sample is the outlier with probability t.
Dataset sample_mixture(const MixtureModel& model, Eigen::Index n, std::uint64_t seed);

/// Weights (1 - t) / n on each base sample and t on the outlier, which is
/// appended as the last atom. Atoms are joint points.
EmpiricalMeasure deterministic_mixture_measure(const Dataset& base, const Point& outlier, double t);

/// d_K(P_x, Q_x) = integral |F_P - F_Q| by adaptive Gauss-Kronrod on
/// [x0, x1] plus the closed-form normal tail beyond x1.
double tail_kantorovich(const BaseModel& model, const TailPerturbation& pert);

}  // namespace robustlab
