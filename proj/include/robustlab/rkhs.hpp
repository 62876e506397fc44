#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace robustlab {

using Point = Eigen::VectorXd;
/// Point sets are stored row-major, one point per row, so each point is
/// contiguous.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class KernelKind { linear, polynomial, gaussian, laplacian, inverse_multiquadric };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/**
 * A Mercer kernel family with validated parameters.
 *
 *   linear                 <x1, x2>
 *   polynomial             (gamma <x1, x2> + offset)^degree
 *   gaussian               exp(-gamma |x1 - x2|^2)
 *   laplacian              exp(-gamma |x1 - x2|)
 *   inverse_multiquadric   (c^2 + |x1 - x2|^2)^(-alpha)
 *
 * Construction rejects gamma <= 0, non-integral degree < 1, offset < 0,
 * c <= 0 and alpha <= 0 with InputError.
 */
class KernelSpec {
 public:
  static KernelSpec linear();
  static KernelSpec polynomial(double gamma, int degree, double offset = 0.0);
  static KernelSpec gaussian(double gamma);
  static KernelSpec laplacian(double gamma);
  static KernelSpec inverse_multiquadric(double c, double alpha);

  /// Build from named parameters (gamma, degree, offset, c, alpha); missing
  /// names take the defaults 1, 2, 0, 1, 1.
  static KernelSpec from_params(KernelKind kind,
                                const std::map<std::string, double>& params);

  KernelKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  int degree() const { return degree_; }
  double offset() const { return offset_; }
  double c() const { return c_; }
  double alpha() const { return alpha_; }

  /// Named-parameter view, the inverse of from_params.
  std::map<std::string, double> params() const;

  /// Evaluate on raw coordinates. No dimension check; callers go through
  /// kernel_eval for that.
  double operator()(std::span<const double> x1, std::span<const double> x2) const;

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelSpec() = default;

  KernelKind kind_ = KernelKind::linear;
  double gamma_ = 1.0;
  int degree_ = 1;
  double offset_ = 0.0;
  double c_ = 1.0;
  double alpha_ = 1.0;
};

/// k(x1, x2); InputError on dimension mismatch.
double kernel_eval(const KernelSpec& spec, const Point& x1, const Point& x2);

/// M x M Gram matrix of the rows of `points`. OpenMP-parallel over rows.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& points);

/// Rectangular cross Gram, entry (i, j) = k(a_i, b_j).
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const PointSet& a,
                           const PointSet& b);

/// Diagonal jitter used when a Gram matrix has to be factorized:
/// 1e-10 * trace / M.
double gram_jitter(const Eigen::MatrixXd& gram);

/// f = sum_j coeffs_j k(basis_j, .)
class RkhsFunction {
 public:
  RkhsFunction(KernelSpec kernel, PointSet basis, Eigen::VectorXd coeffs);

  /// The zero function carried on the given basis.
  static RkhsFunction zero(KernelSpec kernel, PointSet basis);
  /// 1 * k_u
  static RkhsFunction section(KernelSpec kernel, const Point& u);

  const KernelSpec& kernel() const { return kernel_; }
  const PointSet& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::Index size() const { return coeffs_.size(); }
  Eigen::Index dim() const { return basis_.cols(); }

  RkhsFunction scaled(double factor) const;

 private:
  KernelSpec kernel_;
  PointSet basis_;
  Eigen::VectorXd coeffs_;
};

double rkhs_eval(const RkhsFunction& f, const Point& x);
/// Evaluate at every row of `xs`.
Eigen::VectorXd rkhs_eval_many(const RkhsFunction& f, const PointSet& xs);
double rkhs_inner(const RkhsFunction& f, const RkhsFunction& g);
double rkhs_norm(const RkhsFunction& f);

/// f + scale * g over the union of both bases (points closer than 1e-12 are
/// merged).
RkhsFunction rkhs_axpy(const RkhsFunction& f, double scale, const RkhsFunction& g);

/// |f - g|_k computed on the deduplicated union basis.
double rkhs_distance(const RkhsFunction& f, const RkhsFunction& g);

enum class FeasibleKind { unconstrained, coeff_box, rkhs_ball };

struct FeasibleSet {
  FeasibleKind kind = FeasibleKind::unconstrained;
  Eigen::VectorXd lower;  // coeff_box
  Eigen::VectorXd upper;  // coeff_box
  double radius = 0.0;    // rkhs_ball

  static FeasibleSet unconstrained();
  static FeasibleSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  /// Uniform box [lo, hi] in every coordinate, whatever the problem size.
  /// Stored as length-1 bounds that broadcast.
  static FeasibleSet box(double lo, double hi);
  static FeasibleSet ball(double radius);
};

/// Projection of coefficient vector onto the feasible set: clamp for a box,
/// radial scaling min(1, radius / |f|_k) for a ball.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& coeffs,
                                 const FeasibleSet& set,
                                 const Eigen::MatrixXd& gram);

/// Largest |k_x1 - k_x2|_k / |x1 - x2| over a uniform grid of
/// `points_per_axis`^n points in the box [lo, hi]^n.
double feature_map_lipschitz(const KernelSpec& spec, const Point& lo,
                             const Point& hi, int points_per_axis);

namespace serial {

/// Single-threaded reference for robustlab::gram_matrix.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& points);

}  // namespace serial

}  // namespace robustlab
