#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "robustlab/errors.hpp"
#include "robustlab/rkhs.hpp"

using namespace robustlab;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

PointSet random_points(std::mt19937_64& rng, int n, int dim, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PointSet p(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) p(i, j) = u(rng);
  return p;
}

std::vector<KernelSpec> all_kernels() {
  return {KernelSpec::linear(), KernelSpec::polynomial(0.5, 3, 1.0), KernelSpec::polynomial(1.0, 2, 0.0),
          KernelSpec::gaussian(0.7), KernelSpec::laplacian(1.3), KernelSpec::inverse_multiquadric(1.0, 0.5)};
}

// Independent formulas, written out per kind.
double oracle_kernel(const KernelSpec& k, const Point& a, const Point& b) {
  switch (k.kind()) {
    case KernelKind::linear: return a.dot(b);
    case KernelKind::polynomial: return std::pow(k.gamma() * a.dot(b) + k.offset(), k.degree());
    case KernelKind::gaussian: return std::exp(-k.gamma() * (a - b).squaredNorm());
    case KernelKind::laplacian: return std::exp(-k.gamma() * (a - b).norm());
    case KernelKind::inverse_multiquadric: return std::pow(k.c() * k.c() + (a - b).squaredNorm(), -k.alpha());
  }
  return 0.0;
}

RkhsFunction random_function(std::mt19937_64& rng, const KernelSpec& k, int n, int dim) {
  std::normal_distribution<double> g;
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = g(rng);
  return RkhsFunction(k, random_points(rng, n, dim), a);
}

}  // namespace

TEST(Kernel, SpecExamples) {
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::gaussian(2.0), pt({3.7}), pt({3.7})), 1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::polynomial(1.0, 2, 0.0), pt({1}), pt({2})), 4.0);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::inverse_multiquadric(1.0, 1.0), pt({0}), pt({0})), 1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::laplacian(5.0), pt({1, 2}), pt({1, 2})), 1.0);
}

TEST(Kernel, MatchesOracleAndSymmetric) {
  std::mt19937_64 rng(11);
  for (const auto& k : all_kernels()) {
    const PointSet p = random_points(rng, 20, 3);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const Point a = p.row(i).transpose(), b = p.row(j).transpose();
        const double v = kernel_eval(k, a, b);
        EXPECT_NEAR(v, oracle_kernel(k, a, b), 1e-12 * (1.0 + std::abs(v)));
        EXPECT_EQ(v, kernel_eval(k, b, a));
      }
    }
  }
}

TEST(Kernel, RejectsBadParameters) {
  EXPECT_THROW(KernelSpec::gaussian(0.0), InputError);
  EXPECT_THROW(KernelSpec::laplacian(-1.0), InputError);
  EXPECT_THROW(KernelSpec::polynomial(1.0, 0, 0.0), InputError);
  EXPECT_THROW(KernelSpec::polynomial(1.0, 2, -1.0), InputError);
  EXPECT_THROW(KernelSpec::inverse_multiquadric(0.0, 1.0), InputError);
  EXPECT_THROW(KernelSpec::inverse_multiquadric(1.0, 0.0), InputError);
  EXPECT_THROW(KernelSpec::from_params(KernelKind::polynomial, {{"degree", 2.5}}), InputError);
  EXPECT_THROW(kernel_eval(KernelSpec::linear(), pt({1}), pt({1, 2})), InputError);
}

TEST(Kernel, NamesRoundTrip) {
  for (const auto& k : all_kernels()) {
    EXPECT_EQ(kernel_kind_from_string(to_string(k.kind())), k.kind());
    EXPECT_EQ(KernelSpec::from_params(k.kind(), k.params()), k);
  }
  EXPECT_EQ(kernel_kind_from_string("imq"), KernelKind::inverse_multiquadric);
  EXPECT_THROW(kernel_kind_from_string("sigmoid"), InputError);
}

TEST(Gram, SpecExamples) {
  PointSet one(1, 1);
  one << 0.3;
  EXPECT_DOUBLE_EQ(gram_matrix(KernelSpec::gaussian(1.0), one)(0, 0), 1.0);
  PointSet two(2, 1);
  two << 0, 1;
  const Eigen::MatrixXd g = gram_matrix(KernelSpec::polynomial(1.0, 2, 0.0), two);
  EXPECT_EQ(g, (Eigen::MatrixXd(2, 2) << 0, 0, 0, 1).finished());
}

TEST(Gram, SymmetricPsdOnRandomSets) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(2, 30), dim(1, 4);
  for (const auto& k : all_kernels()) {
    for (int trial = 0; trial < 50; ++trial) {
      const PointSet p = random_points(rng, size(rng), dim(rng));
      const Eigen::MatrixXd g = gram_matrix(k, p);
      EXPECT_LE((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, g.cwiseAbs().maxCoeff()));
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
      const double radius = ev.cwiseAbs().maxCoeff();
      EXPECT_GE(ev.minCoeff(), -1e-10 * radius) << to_string(k.kind());
    }
  }
}

TEST(Gram, ParallelMatchesSerial) {
  std::mt19937_64 rng(9);
  for (const auto& k : all_kernels()) {
    const PointSet p = random_points(rng, 150, 2);
    EXPECT_EQ(gram_matrix(k, p), serial::gram_matrix(k, p));
  }
}

TEST(Gram, CrossGramMatchesEntries) {
  std::mt19937_64 rng(3);
  const auto k = KernelSpec::gaussian(0.4);
  const PointSet a = random_points(rng, 7, 2), b = random_points(rng, 5, 2);
  const Eigen::MatrixXd c = cross_gram(k, a, b);
  ASSERT_EQ(c.rows(), 7);
  ASSERT_EQ(c.cols(), 5);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(c(i, j), oracle_kernel(k, a.row(i).transpose(), b.row(j).transpose()));
}

TEST(Gram, JitterIsScaledTrace) {
  const Eigen::MatrixXd g = Eigen::Vector3d(1, 2, 3).asDiagonal();
  EXPECT_DOUBLE_EQ(gram_jitter(g), 1e-10 * 6.0 / 3.0);
}

TEST(RkhsFunction, EvalExamples) {
  std::mt19937_64 rng(1);
  const auto k = KernelSpec::laplacian(0.8);
  const RkhsFunction zero = RkhsFunction::zero(k, random_points(rng, 4, 2));
  EXPECT_EQ(rkhs_eval(zero, pt({0.1, 0.2})), 0.0);
  const Point u = pt({0.5, -1.0});
  EXPECT_DOUBLE_EQ(rkhs_eval(RkhsFunction::section(k, u), u), kernel_eval(k, u, u));
}

TEST(RkhsFunction, EvalMatchesDirectSum) {
  std::mt19937_64 rng(2);
  for (const auto& k : all_kernels()) {
    const RkhsFunction f = random_function(rng, k, 12, 2);
    const PointSet xs = random_points(rng, 100, 2);
    const Eigen::VectorXd many = rkhs_eval_many(f, xs);
    for (int i = 0; i < 100; ++i) {
      double direct = 0.0;
      for (int j = 0; j < f.size(); ++j)
        direct += f.coeffs()[j] * oracle_kernel(k, f.basis().row(j).transpose(), xs.row(i).transpose());
      const double v = rkhs_eval(f, xs.row(i).transpose());
      EXPECT_NEAR(v, direct, 1e-12 * (1.0 + std::abs(direct)));
      EXPECT_NEAR(many[i], v, 1e-12 * (1.0 + std::abs(v)));
    }
  }
}

TEST(RkhsFunction, RejectsMalformed) {
  PointSet b(2, 1);
  b << 0, 1;
  EXPECT_THROW(RkhsFunction(KernelSpec::linear(), b, Eigen::VectorXd::Zero(3)), InputError);
  EXPECT_THROW(RkhsFunction(KernelSpec::linear(), PointSet(0, 1), Eigen::VectorXd()), InputError);
  const RkhsFunction f(KernelSpec::linear(), b, Eigen::Vector2d(1, 1));
  EXPECT_THROW(rkhs_eval(f, pt({1, 2})), InputError);
  const RkhsFunction g(KernelSpec::gaussian(1.0), b, Eigen::Vector2d(1, 1));
  EXPECT_THROW(rkhs_inner(f, g), InputError);
  EXPECT_THROW(rkhs_distance(f, g), InputError);
}

TEST(RkhsInner, ReproducingProperty) {
  std::mt19937_64 rng(4);
  for (const auto& k : all_kernels()) {
    const Point u = pt({0.3, -0.7}), v = pt({1.1, 0.4});
    EXPECT_NEAR(rkhs_inner(RkhsFunction::section(k, u), RkhsFunction::section(k, v)), kernel_eval(k, u, v), 1e-14);
    const RkhsFunction f = random_function(rng, k, 10, 2);
    const double a = rkhs_inner(RkhsFunction::section(k, u), f);
    EXPECT_NEAR(a, rkhs_eval(f, u), 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST(RkhsInner, BilinearSymmetricPositive) {
  std::mt19937_64 rng(6);
  for (const auto& k : all_kernels()) {
    const RkhsFunction f = random_function(rng, k, 8, 3), g = random_function(rng, k, 5, 3);
    const double fg = rkhs_inner(f, g);
    EXPECT_NEAR(rkhs_inner(g, f), fg, 1e-12 * (1.0 + std::abs(fg)));
    EXPECT_NEAR(rkhs_inner(f.scaled(2.0), g), 2.0 * fg, 1e-12 * (1.0 + std::abs(fg)));
    EXPECT_GE(rkhs_inner(f, f), 0.0);
    EXPECT_NEAR(rkhs_norm(f), std::sqrt(rkhs_inner(f, f)), 1e-12);
  }
}

TEST(RkhsDistance, Examples) {
  const auto k = KernelSpec::inverse_multiquadric(1.5, 0.7);
  const Point u = pt({0.2}), v = pt({-0.9});
  const RkhsFunction ku = RkhsFunction::section(k, u), kv = RkhsFunction::section(k, v);
  EXPECT_EQ(rkhs_distance(ku, ku), 0.0);
  EXPECT_NEAR(rkhs_distance(ku, ku.scaled(2.0)), std::sqrt(kernel_eval(k, u, u)), 1e-14);
  EXPECT_NEAR(rkhs_distance(ku, kv),
              std::sqrt(kernel_eval(k, u, u) - 2 * kernel_eval(k, u, v) + kernel_eval(k, v, v)), 1e-14);
}

TEST(RkhsAxpy, MergesSharedBasisPoints) {
  std::mt19937_64 rng(8);
  const auto k = KernelSpec::gaussian(1.0);
  const RkhsFunction f = random_function(rng, k, 6, 1);
  const RkhsFunction g(k, f.basis(), Eigen::VectorXd::Ones(6));
  const RkhsFunction h = rkhs_axpy(f, -1.0, g);
  EXPECT_EQ(h.size(), 6);
  EXPECT_NEAR(rkhs_eval(h, pt({0.4})), rkhs_eval(f, pt({0.4})) - rkhs_eval(g, pt({0.4})), 1e-12);
  const RkhsFunction other = random_function(rng, k, 3, 1);
  EXPECT_EQ(rkhs_axpy(f, 1.0, other).size(), 9);
}

TEST(Projection, Examples) {
  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::Vector2d a(2, -3);
  EXPECT_EQ(project_feasible(a, FeasibleSet::unconstrained(), gram), a);
  EXPECT_EQ(project_feasible(a, FeasibleSet::box(-1.0, 1.0), gram), Eigen::Vector2d(1, -1));
  EXPECT_EQ(project_feasible(a, FeasibleSet::box(Eigen::Vector2d(0, -5), Eigen::Vector2d(1, 5)), gram),
            Eigen::Vector2d(1, -3));
  const Eigen::Vector2d b(2, 0);  // norm 2
  EXPECT_TRUE(project_feasible(b, FeasibleSet::ball(1.0), gram).isApprox(Eigen::Vector2d(1, 0)));
  EXPECT_THROW(FeasibleSet::box(1.0, -1.0), InputError);
  EXPECT_THROW(FeasibleSet::ball(0.0), InputError);
}

TEST(Projection, BallIdempotentNonexpansive) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 3.0);
  const auto k = KernelSpec::gaussian(0.5);
  const PointSet basis = random_points(rng, 10, 2);
  const Eigen::MatrixXd gram = gram_matrix(k, basis);
  const FeasibleSet ball = FeasibleSet::ball(0.8);
  const auto knorm = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(v.dot(gram * v), 0.0)); };
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd a(10), b(10);
    for (int i = 0; i < 10; ++i) a[i] = g(rng), b[i] = g(rng);
    const Eigen::VectorXd pa = project_feasible(a, ball, gram), pb = project_feasible(b, ball, gram);
    EXPECT_LE(knorm(pa), 0.8 + 1e-12);
    EXPECT_LE((project_feasible(pa, ball, gram) - pa).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(knorm(pa - pb), knorm(a - b) + 1e-12);
  }
}

TEST(FeatureMap, LipschitzBoundedForRadialKernels) {
  for (const auto& k : {KernelSpec::gaussian(1.0), KernelSpec::laplacian(1.0)}) {
    const double c = feature_map_lipschitz(k, pt({-1, -1}), pt({1, 1}), 9);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
    // |k_x - k_x'|^2 = 2 - 2 k(x, x') <= 2 gamma |x - x'|^2 (gaussian) or 2 gamma |x - x'| (laplacian).
    if (k.kind() == KernelKind::gaussian) EXPECT_LE(c, std::sqrt(2.0) + 1e-12);
  }
}
