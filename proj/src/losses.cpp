#include "robustlab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::squared: return "squared";
    case LossKind::huber: return "huber";
    case LossKind::hinge: return "hinge";
    case LossKind::logloss: return "logloss";
    case LossKind::pinball: return "pinball";
  }
  return "unknown";
}

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "squared") return LossKind::squared;
  if (name == "huber") return LossKind::huber;
  if (name == "hinge") return LossKind::hinge;
  if (name == "logloss") return LossKind::logloss;
  if (name == "pinball") return LossKind::pinball;
  throw InputError("unknown loss kind '" + std::string(name) + "'");
}

LossSpec LossSpec::pinball(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw InputError("pinball level nu must lie in (0, 1)");
  return {LossKind::pinball, nu};
}

Smoothness LossSpec::smoothness() const {
  switch (kind) {
    case LossKind::squared:
    case LossKind::logloss: return Smoothness::C2;
    case LossKind::huber: return Smoothness::C1;
    case LossKind::hinge:
    case LossKind::pinball: return Smoothness::C0;
  }
  return Smoothness::C0;
}

double loss_value(const LossSpec& spec, double y, double w) {
  switch (spec.kind) {
    case LossKind::squared: return 0.5 * (w - y) * (w - y);
    case LossKind::huber: {
      const double r = std::abs(w - y);
      return r <= 1.0 ? 0.5 * r * r : r - 0.5;
    }
    case LossKind::hinge: return std::max(0.0, 1.0 - w * y);
    case LossKind::logloss:
      return spec.logloss_form == LoglossForm::as_printed ? softplus(-w - y) : softplus(-w * y);
    case LossKind::pinball: {
      const double r = y - w;
      return r >= 0.0 ? spec.nu * r : (spec.nu - 1.0) * r;
    }
  }
  return 0.0;
}

double loss_grad(const LossSpec& spec, double y, double w) {
  switch (spec.kind) {
    case LossKind::squared: return w - y;
    case LossKind::huber: return std::clamp(w - y, -1.0, 1.0);
    case LossKind::hinge: {
      const double margin = w * y;
      if (margin < 1.0) return -y;
      if (margin > 1.0) return 0.0;
      return -0.5 * y;
    }
    case LossKind::logloss:
      return spec.logloss_form == LoglossForm::as_printed ? -sigmoid(-w - y) : -y * sigmoid(-w * y);
    case LossKind::pinball: {
      if (y > w) return -spec.nu;
      if (y < w) return 1.0 - spec.nu;
      return 0.5 - spec.nu;
    }
  }
  return 0.0;
}

double loss_hess(const LossSpec& spec, double y, double w) {
  switch (spec.kind) {
    case LossKind::squared: return 1.0;
    case LossKind::huber: {
      const double r = std::abs(w - y);
      if (r == 1.0) throw CapabilityError("huber loss has no second derivative at |w - y| = 1");
      return r < 1.0 ? 1.0 : 0.0;
    }
    case LossKind::logloss: {
      if (spec.logloss_form == LoglossForm::as_printed) {
        const double s = sigmoid(-w - y);
        return s * (1.0 - s);
      }
      const double s = sigmoid(-w * y);
      return y * y * s * (1.0 - s);
    }
    case LossKind::hinge: throw CapabilityError("hinge loss has no second derivative");
    case LossKind::pinball: throw CapabilityError("pinball loss has no second derivative");
  }
  return 0.0;
}

GaugeFunction::GaugeFunction(KernelSpec kernel, double beta, GaugeConvention convention)
    : kernel_(std::move(kernel)), beta_(beta), convention_(convention) {
  if (!(beta_ > 0.0)) throw InputError("gauge radius beta must be positive");
}

double GaugeFunction::operator()(const Point& z) const {
  if (z.size() < 2) throw InputError("gauge point must hold at least one input coordinate and y");
  const Eigen::Index n = z.size() - 1;
  const double x2 = z.head(n).squaredNorm();
  const double abs_y = std::abs(z[n]);
  double section_norm = 0.0;  // |k_x|_k
  switch (kernel_.kind()) {
    case KernelKind::linear: section_norm = std::sqrt(x2); break;
    case KernelKind::polynomial:
      section_norm = std::pow(kernel_.gamma() * x2 + std::max(kernel_.offset(), 1.0),
                              0.5 * kernel_.degree());
      break;
    case KernelKind::gaussian:
    case KernelKind::laplacian:
      if (convention_ == GaugeConvention::as_printed) return 1.0;
      section_norm = 1.0;
      break;
    case KernelKind::inverse_multiquadric:
      section_norm = std::pow(kernel_.c(), -kernel_.alpha());
      break;
  }
  return 1.0 + beta_ * section_norm * abs_y;
}

GaugeFunction gauge_psi(const KernelSpec& kernel, double beta, GaugeConvention convention) {
  return {kernel, beta, convention};
}

double moment_check(const EmpiricalMeasure& measure, const GaugeFunction& psi, double gamma) {
  if (!(gamma >= 1.0)) throw InputError("moment exponent must be >= 1");
  double total = 0.0;
  for (Eigen::Index i = 0; i < measure.size(); ++i) {
    const Point z = measure.atoms().row(i).transpose();
    total += measure.weights()[i] * std::pow(psi(z), gamma);
  }
  return total;
}

}  // namespace robustlab
