#pragma once

#include <string_view>

#include "robustlab/measure.hpp"
#include "robustlab/rkhs.hpp"

namespace robustlab {

enum class LossKind { squared, huber, hinge, logloss, pinball };
enum class Smoothness { C0, C1, C2 };

/// Which printed form of the log-loss to use.
///   as_printed: log(1 + exp(-t - y))
///   margin:     log(1 + exp(-t * y))
enum class LoglossForm { as_printed, margin };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

/// Cost c(z, w) = L(w, y) where w is the prediction f(x). Huber's threshold
/// is fixed at 1. All listed losses are convex and nonnegative.
struct LossSpec {
  LossKind kind = LossKind::squared;
  double nu = 0.5;  // pinball quantile level, in (0, 1)
  LoglossForm logloss_form = LoglossForm::as_printed;

  static LossSpec squared() { return {LossKind::squared}; }
  static LossSpec huber() { return {LossKind::huber}; }
  static LossSpec hinge() { return {LossKind::hinge}; }
  static LossSpec logloss(LoglossForm form = LoglossForm::as_printed) {
    return {LossKind::logloss, 0.5, form};
  }
  static LossSpec pinball(double nu);

  Smoothness smoothness() const;
  bool convex() const { return true; }
  /// True when loss_grad returns a midpoint subgradient at kinks.
  bool nonsmooth() const { return smoothness() == Smoothness::C0; }

  bool operator==(const LossSpec&) const = default;
};

double loss_value(const LossSpec& spec, double y, double w);

/// dL/dw. At hinge/pinball kinks this is the midpoint of the subdifferential.
double loss_grad(const LossSpec& spec, double y, double w);

/// d2L/dw2. CapabilityError for hinge, pinball, and huber exactly at |w-y| = 1.
double loss_hess(const LossSpec& spec, double y, double w);

enum class GaugeConvention {
  /// psi(z) = 1 + beta * |k_x|_k * |y|, the bound chain for the hinge loss.
  bound_chain,
  /// Same, except gaussian/laplacian kernels give psi = 1.
  as_printed,
};

/// Gauge function psi bounding the hinge cost over the ball |f|_k <= beta:
///   linear       1 + beta |x| |y|
///   polynomial   1 + beta (gamma |x|^2 + max(offset, 1))^(d/2) |y|
///   gaussian     1 + beta |y|        (1 under GaugeConvention::as_printed)
///   laplacian    same as gaussian
///   imq          1 + beta c^(-alpha) |y|
/// A point z is stored as (x_1, ..., x_n, y).
class GaugeFunction {
 public:
  GaugeFunction(KernelSpec kernel, double beta, GaugeConvention convention);

  double operator()(const Point& z) const;

  const KernelSpec& kernel() const { return kernel_; }
  double beta() const { return beta_; }

 private:
  KernelSpec kernel_;
  double beta_;
  GaugeConvention convention_;
};

GaugeFunction gauge_psi(const KernelSpec& kernel, double beta,
                        GaugeConvention convention = GaugeConvention::bound_chain);

/// sum_i w_i psi(z_i)^gamma over the atoms of `measure`.
double moment_check(const EmpiricalMeasure& measure, const GaugeFunction& psi, double gamma);

}  // namespace robustlab
