#include "robustlab/perturbations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "robustlab/errors.hpp"
#include "robustlab/random.hpp"

namespace robustlab {

std::string_view to_string(Response response) {
  switch (response) {
    case Response::square: return "square";
    case Response::square_plus_noise: return "square_plus_noise";
    case Response::cube: return "cube";
  }
  return "unknown";
}

Response response_from_string(std::string_view name) {
  if (name == "square") return Response::square;
  if (name == "square_plus_noise") return Response::square_plus_noise;
  if (name == "cube") return Response::cube;
  throw InputError("unknown response rule '" + std::string(name) + "'");
}

void BaseModel::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("base model sigma must be positive");
  if (!std::isfinite(mu)) throw InputError("base model mu must be finite");
}

double BaseModel::cdf(double x) const { return normal_cdf((x - mu) / sigma); }

double BaseModel::quantile(double u) const { return mu + sigma * normal_quantile(u); }

double BaseModel::respond(double x, double noise) const {
  switch (response) {
    case Response::square: return x * x;
    case Response::square_plus_noise: return x * x + std::sqrt(kNoiseVariance) * noise;
    case Response::cube: return x * x * x;
  }
  return 0.0;
}

void TailPerturbation::validate() const {
  if (identity) return;
  if (!(p > 0.0 && p < 1.0)) throw InputError("tail perturbation p must lie in (0, 1)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("tail perturbation beta must be positive");
}

double TailPerturbation::x0(const BaseModel& model) const { return model.quantile(p); }

double TailPerturbation::x1(const BaseModel& model) const { return x0(model) + (1.0 - p) / beta; }

double TailPerturbation::cdf(const BaseModel& model, double x) const {
  if (identity) return model.cdf(x);
  const double lo = x0(model);
  if (x <= lo) return model.cdf(x);
  if (x > x1(model)) return 1.0;
  return std::min(1.0, p + beta * (x - lo));
}

double TailPerturbation::quantile(const BaseModel& model, double u) const {
  if (identity || u <= p) return model.quantile(u);
  return x0(model) + (u - p) / beta;
}

void MixtureModel::validate() const {
  base.validate();
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("mixture weight t must lie in [0, 1]");
  if (outlier.size() != 2) throw InputError("outlier must be a joint point (x, y) matching the scalar base model");
}

Dataset sample_base(const BaseModel& model, Eigen::Index n, std::uint64_t seed) {
  return sample_tail_perturbed(model, TailPerturbation::none(), n, seed);
}

Dataset sample_tail_perturbed(const BaseModel& model, const TailPerturbation& pert, Eigen::Index n,
                              std::uint64_t seed) {
  model.validate();
  pert.validate();
  if (n < 1) throw InputError("sample size must be >= 1");
  RandomStream rng(seed);
  PointSet x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = pert.quantile(model, rng.uniform());
    const double noise = rng.normal();
    x(i, 0) = xi;
    y[i] = model.respond(xi, noise);
  }
  return {std::move(x), std::move(y)};
}

Dataset sample_mixture(const MixtureModel& model, Eigen::Index n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw InputError("sample size must be >= 1");
  RandomStream rng(seed);
  PointSet x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Every sample consumes three draws so the stream layout is independent of t.
    const bool take_outlier = rng.uniform() < model.t;
    const double xi = model.base.quantile(rng.uniform());
    const double noise = rng.normal();
    if (take_outlier) {
      x(i, 0) = model.outlier[0];
      y[i] = model.outlier[1];
    } else {
      x(i, 0) = xi;
      y[i] = model.base.respond(xi, noise);
    }
  }
  return {std::move(x), std::move(y)};
}

EmpiricalMeasure deterministic_mixture_measure(const Dataset& base, const Point& outlier, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("mixture weight t must lie in [0, 1]");
  if (outlier.size() != base.dim() + 1) throw InputError("outlier dimension does not match the dataset");
  const Eigen::Index n = base.size();
  PointSet atoms(n + 1, base.dim() + 1);
  atoms.topRows(n) = base.joint();
  atoms.row(n) = outlier.transpose();
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n + 1, (1.0 - t) / static_cast<double>(n));
  weights[n] = t;
  return {std::move(atoms), std::move(weights)};
}

double tail_kantorovich(const BaseModel& model, const TailPerturbation& pert) {
  model.validate();
  pert.validate();
  if (pert.identity) return 0.0;
  const double lo = pert.x0(model);
  const double hi = pert.x1(model);
  auto gap = [&](double x) { return std::abs(model.cdf(x) - pert.cdf(model, x)); };
  double err = 0.0;
  const double body =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(gap, lo, hi, 20, 1e-12, &err);
  // integral_{x1}^inf (1 - Phi((x - mu)/sigma)) dx = sigma (phi(z) - z (1 - Phi(z)))
  const double z = (hi - model.mu) / model.sigma;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = model.sigma * (phi - z * 0.5 * std::erfc(z / std::numbers::sqrt2));
  return body + tail;
}

}  // namespace robustlab
