#include "robustlab/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

std::span<const double> row_span(const PointSet& points, Eigen::Index i) {
  return {points.row(i).data(), static_cast<std::size_t>(points.cols())};
}

std::span<const double> vec_span(const Point& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError(std::string("kernel parameter ") + name + " must be positive and finite");
  }
}

// Points equal to within this tolerance are merged in union bases.
constexpr double kDedupTolerance = 1e-12;

// Union of two bases; map_b[j] gives the union index of row j of b.
PointSet union_basis(const PointSet& a, const PointSet& b, std::vector<Eigen::Index>& map_b) {
  std::vector<Eigen::Index> fresh;
  map_b.assign(static_cast<std::size_t>(b.rows()), -1);
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if ((a.row(i) - b.row(j)).cwiseAbs().maxCoeff() <= kDedupTolerance) {
        map_b[static_cast<std::size_t>(j)] = i;
        break;
      }
    }
    if (map_b[static_cast<std::size_t>(j)] < 0) {
      map_b[static_cast<std::size_t>(j)] = a.rows() + static_cast<Eigen::Index>(fresh.size());
      fresh.push_back(j);
    }
  }
  PointSet out(a.rows() + static_cast<Eigen::Index>(fresh.size()), a.cols());
  out.topRows(a.rows()) = a;
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    out.row(a.rows() + static_cast<Eigen::Index>(k)) = b.row(fresh[k]);
  }
  return out;
}

void require_same_kernel(const RkhsFunction& f, const RkhsFunction& g) {
  if (!(f.kernel() == g.kernel())) throw InputError("RKHS functions use different kernels");
  if (f.dim() != g.dim()) throw InputError("RKHS functions live on different input dimensions");
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::laplacian: return "laplacian";
    case KernelKind::inverse_multiquadric: return "inverse_multiquadric";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "polynomial") return KernelKind::polynomial;
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "laplacian") return KernelKind::laplacian;
  if (name == "inverse_multiquadric" || name == "imq") return KernelKind::inverse_multiquadric;
  throw InputError("unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec KernelSpec::linear() {
  KernelSpec k;
  k.kind_ = KernelKind::linear;
  return k;
}

KernelSpec KernelSpec::polynomial(double gamma, int degree, double offset) {
  require_positive(gamma, "gamma");
  if (degree < 1) throw InputError("polynomial degree must be an integer >= 1");
  if (!(offset >= 0.0) || !std::isfinite(offset)) throw InputError("polynomial offset must be >= 0");
  KernelSpec k;
  k.kind_ = KernelKind::polynomial;
  k.gamma_ = gamma;
  k.degree_ = degree;
  k.offset_ = offset;
  return k;
}

KernelSpec KernelSpec::gaussian(double gamma) {
  require_positive(gamma, "gamma");
  KernelSpec k;
  k.kind_ = KernelKind::gaussian;
  k.gamma_ = gamma;
  return k;
}

KernelSpec KernelSpec::laplacian(double gamma) {
  require_positive(gamma, "gamma");
  KernelSpec k;
  k.kind_ = KernelKind::laplacian;
  k.gamma_ = gamma;
  return k;
}

KernelSpec KernelSpec::inverse_multiquadric(double c, double alpha) {
  require_positive(c, "c");
  require_positive(alpha, "alpha");
  KernelSpec k;
  k.kind_ = KernelKind::inverse_multiquadric;
  k.c_ = c;
  k.alpha_ = alpha;
  return k;
}

KernelSpec KernelSpec::from_params(KernelKind kind, const std::map<std::string, double>& params) {
  auto get = [&](const char* name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  };
  switch (kind) {
    case KernelKind::linear: return linear();
    case KernelKind::polynomial: {
      const double d = get("degree", 2.0);
      if (d != std::floor(d)) throw InputError("polynomial degree must be an integer");
      return polynomial(get("gamma", 1.0), static_cast<int>(d), get("offset", 0.0));
    }
    case KernelKind::gaussian: return gaussian(get("gamma", 1.0));
    case KernelKind::laplacian: return laplacian(get("gamma", 1.0));
    case KernelKind::inverse_multiquadric: return inverse_multiquadric(get("c", 1.0), get("alpha", 1.0));
  }
  throw InputError("unknown kernel kind");
}

std::map<std::string, double> KernelSpec::params() const {
  switch (kind_) {
    case KernelKind::linear: return {};
    case KernelKind::polynomial:
      return {{"gamma", gamma_}, {"degree", static_cast<double>(degree_)}, {"offset", offset_}};
    case KernelKind::gaussian:
    case KernelKind::laplacian: return {{"gamma", gamma_}};
    case KernelKind::inverse_multiquadric: return {{"c", c_}, {"alpha", alpha_}};
  }
  return {};
}

double KernelSpec::operator()(std::span<const double> x1, std::span<const double> x2) const {
  switch (kind_) {
    case KernelKind::linear: return dot(x1, x2);
    case KernelKind::polynomial: {
      const double base = gamma_ * dot(x1, x2) + offset_;
      double out = 1.0;
      for (int i = 0; i < degree_; ++i) out *= base;
      return out;
    }
    case KernelKind::gaussian: return std::exp(-gamma_ * squared_distance(x1, x2));
    case KernelKind::laplacian: return std::exp(-gamma_ * std::sqrt(squared_distance(x1, x2)));
    case KernelKind::inverse_multiquadric:
      return std::pow(c_ * c_ + squared_distance(x1, x2), -alpha_);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, const Point& x1, const Point& x2) {
  if (x1.size() != x2.size()) throw InputError("kernel_eval: dimension mismatch");
  return spec(vec_span(x1), vec_span(x2));
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& points) {
  if (points.rows() == 0) throw InputError("gram_matrix: empty point set");
  const Eigen::Index m = points.rows();
  Eigen::MatrixXd gram(m, m);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = spec(row_span(points, i), row_span(points, j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const PointSet& a, const PointSet& b) {
  if (a.cols() != b.cols()) throw InputError("cross_gram: dimension mismatch");
  Eigen::MatrixXd out(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = spec(row_span(a, i), row_span(b, j));
  }
  return out;
}

double gram_jitter(const Eigen::MatrixXd& gram) {
  if (gram.rows() == 0) return 0.0;
  return 1e-10 * gram.trace() / static_cast<double>(gram.rows());
}

namespace serial {

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& points) {
  if (points.rows() == 0) throw InputError("gram_matrix: empty point set");
  const Eigen::Index m = points.rows();
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) gram(i, j) = spec(row_span(points, i), row_span(points, j));
  }
  return gram;
}

}  // namespace serial

RkhsFunction::RkhsFunction(KernelSpec kernel, PointSet basis, Eigen::VectorXd coeffs)
    : kernel_(std::move(kernel)), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (basis_.rows() == 0) throw InputError("RkhsFunction: empty basis");
  if (basis_.rows() != coeffs_.size()) throw InputError("RkhsFunction: basis and coefficient sizes differ");
}

RkhsFunction RkhsFunction::zero(KernelSpec kernel, PointSet basis) {
  const Eigen::Index n = basis.rows();
  return {std::move(kernel), std::move(basis), Eigen::VectorXd::Zero(n)};
}

RkhsFunction RkhsFunction::section(KernelSpec kernel, const Point& u) {
  PointSet basis = u.transpose();
  return {std::move(kernel), std::move(basis), Eigen::VectorXd::Ones(1)};
}

RkhsFunction RkhsFunction::scaled(double factor) const {
  return {kernel_, basis_, coeffs_ * factor};
}

double rkhs_eval(const RkhsFunction& f, const Point& x) {
  if (x.size() != f.dim()) throw InputError("rkhs_eval: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    s += f.coeffs()[j] * f.kernel()(row_span(f.basis(), j), vec_span(x));
  }
  return s;
}

Eigen::VectorXd rkhs_eval_many(const RkhsFunction& f, const PointSet& xs) {
  if (xs.cols() != f.dim()) throw InputError("rkhs_eval: dimension mismatch");
  return cross_gram(f.kernel(), xs, f.basis()) * f.coeffs();
}

double rkhs_inner(const RkhsFunction& f, const RkhsFunction& g) {
  require_same_kernel(f, g);
  return f.coeffs().dot(cross_gram(f.kernel(), f.basis(), g.basis()) * g.coeffs());
}

double rkhs_norm(const RkhsFunction& f) {
  const double sq = f.coeffs().dot(gram_matrix(f.kernel(), f.basis()) * f.coeffs());
  return std::sqrt(std::max(sq, 0.0));
}

RkhsFunction rkhs_axpy(const RkhsFunction& f, double scale, const RkhsFunction& g) {
  require_same_kernel(f, g);
  std::vector<Eigen::Index> map_g;
  PointSet basis = union_basis(f.basis(), g.basis(), map_g);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.rows());
  coeffs.head(f.size()) = f.coeffs();
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    coeffs[map_g[static_cast<std::size_t>(j)]] += scale * g.coeffs()[j];
  }
  return {f.kernel(), std::move(basis), std::move(coeffs)};
}

double rkhs_distance(const RkhsFunction& f, const RkhsFunction& g) {
  return rkhs_norm(rkhs_axpy(f, -1.0, g));
}

FeasibleSet FeasibleSet::unconstrained() { return {}; }

FeasibleSet FeasibleSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size() || lower.size() == 0) throw InputError("box bounds must have equal nonzero length");
  if ((lower.array() > upper.array()).any()) throw InputError("box requires lower <= upper");
  FeasibleSet s;
  s.kind = FeasibleKind::coeff_box;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::box(double lo, double hi) {
  return box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi));
}

FeasibleSet FeasibleSet::ball(double radius) {
  if (!(radius > 0.0)) throw InputError("ball radius must be positive");
  FeasibleSet s;
  s.kind = FeasibleKind::rkhs_ball;
  s.radius = radius;
  return s;
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& coeffs, const FeasibleSet& set,
                                 const Eigen::MatrixXd& gram) {
  switch (set.kind) {
    case FeasibleKind::unconstrained: return coeffs;
    case FeasibleKind::coeff_box: {
      const Eigen::Index n = coeffs.size();
      if (set.lower.size() == 1) {
        return coeffs.cwiseMax(set.lower[0]).cwiseMin(set.upper[0]);
      }
      if (set.lower.size() != n) throw InputError("project_feasible: box dimension mismatch");
      return coeffs.cwiseMax(set.lower).cwiseMin(set.upper);
    }
    case FeasibleKind::rkhs_ball: {
      if (gram.rows() != coeffs.size() || gram.cols() != coeffs.size()) {
        throw InputError("project_feasible: Gram dimension mismatch");
      }
      const double norm = std::sqrt(std::max(coeffs.dot(gram * coeffs), 0.0));
      if (norm <= set.radius) return coeffs;
      return coeffs * (set.radius / norm);
    }
  }
  return coeffs;
}

double feature_map_lipschitz(const KernelSpec& spec, const Point& lo, const Point& hi,
                             int points_per_axis) {
  if (lo.size() != hi.size() || lo.size() == 0) throw InputError("feature_map_lipschitz: bad box");
  if (points_per_axis < 2) throw InputError("feature_map_lipschitz: need at least 2 points per axis");
  const Eigen::Index dim = lo.size();
  Eigen::Index total = 1;
  for (Eigen::Index d = 0; d < dim; ++d) total *= points_per_axis;
  PointSet grid(total, dim);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    Eigen::Index rest = idx;
    for (Eigen::Index d = 0; d < dim; ++d) {
      const Eigen::Index k = rest % points_per_axis;
      rest /= points_per_axis;
      grid(idx, d) = lo[d] + (hi[d] - lo[d]) * static_cast<double>(k) / (points_per_axis - 1);
    }
  }
  const Eigen::MatrixXd gram = gram_matrix(spec, grid);
  double best = 0.0;
  for (Eigen::Index i = 0; i < total; ++i) {
    for (Eigen::Index j = i + 1; j < total; ++j) {
      const double dx = (grid.row(i) - grid.row(j)).norm();
      if (dx == 0.0) continue;
      const double dk = std::sqrt(std::max(gram(i, i) - 2.0 * gram(i, j) + gram(j, j), 0.0));
      best = std::max(best, dk / dx);
    }
  }
  return best;
}

}  // namespace robustlab
