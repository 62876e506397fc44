#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "robustlab/errors.hpp"
#include "robustlab/influence.hpp"
#include "robustlab/perturbations.hpp"

using namespace robustlab;

namespace {

Dataset noisy_square(int n, std::uint64_t seed) {
  return sample_base({0.0, 1.0, Response::square_plus_noise}, n, seed);
}

Point z(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point x1(double x) { return Point::Constant(1, x); }

ErmProblem smooth_problem(int n = 30, double lambda = 0.1, std::uint64_t seed = 1) {
  return ErmProblem(noisy_square(n, seed), KernelSpec::gaussian(1.0), LossSpec::squared(), lambda);
}

// Least-squares slope of log(err) against log(t).
double loglog_slope(const std::vector<double>& t, const std::vector<double>& err) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) mx += std::log(t[i]), my += std::log(err[i]);
  mx /= t.size();
  my /= t.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (std::log(t[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(t[i]) - mx) * (std::log(t[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Influence, ZeroResponsesGiveZero) {
  Dataset d = noisy_square(20, 2);
  d.y.setZero();
  const ErmProblem p(d, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.1);
  const ErmSolution s = solve_erm(p);
  const InfluenceReport r = influence_function(p, s, z(1.3, 0.0));
  EXPECT_LE(r.influence.coeffs().lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_EQ(r.rhs_norm, 0.0);
  EXPECT_EQ(r.influence.size(), 21);
  EXPECT_EQ(r.influence.basis()(20, 0), 1.3);
  EXPECT_FALSE(r.fd_error.has_value());
  EXPECT_FALSE(r.measure.empty());
}

TEST(Influence, MatchesFiniteDifferenceAndConvergesLinearly) {
  for (double lambda : {0.01, 0.1, 1.0}) {
    const ErmProblem p = smooth_problem(30, lambda);
    const ErmSolution s = solve_erm(p);
    const Point outlier = z(2.0, 8.0);
    const InfluenceReport r = influence_function(p, s, outlier);
    const double norm = rkhs_norm(r.influence);
    ASSERT_GT(norm, 0.0);

    const std::vector<double> ts{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    const auto q = influence_fd(p, outlier, ts);
    ASSERT_EQ(q.size(), ts.size());
    std::vector<double> err;
    for (std::size_t i = 0; i < q.size(); ++i) {
      EXPECT_EQ(q[i].t, ts[i]);
      err.push_back(rkhs_distance(r.influence, q[i].quotient));
    }
    EXPECT_LE(err[4] / norm, 1e-2) << lambda;  // t = 1e-4
    for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]) << lambda;
    EXPECT_NEAR(loglog_slope(ts, err), 1.0, 0.3) << lambda;
  }
}

TEST(Influence, SmoothLossesOtherThanSquared) {
  for (const auto& loss : {LossSpec::logloss(), LossSpec::huber()}) {
    Dataset d = noisy_square(30, 3);
    if (loss.kind == LossKind::huber) d.y *= 0.3;  // keep residuals away from the huber kink
    const ErmProblem p(d, KernelSpec::gaussian(1.0), loss, 0.1);
    SolverOptions o;
    o.tol = 1e-12;
    const ErmSolution s = solve_erm(p, 0, o);
    const Point outlier = z(0.5, 0.2);
    const InfluenceReport r = influence_function(p, s, outlier);
    const auto q = influence_fd(p, outlier, {1e-4}, 0, o);
    EXPECT_LE(rkhs_distance(r.influence, q[0].quotient), 1e-2 * rkhs_norm(r.influence)) << to_string(loss.kind);
  }
}

TEST(Influence, QuotientSequenceStable) {
  const ErmProblem p = smooth_problem();
  const Point outlier = z(-1.5, 4.0);
  std::vector<double> c;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const auto q = influence_fd(p, outlier, {t, t / 2});
    c.push_back(rkhs_distance(q[0].quotient, q[1].quotient) / t);
  }
  for (double v : c) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(v, 2.0 * c[0]);
  }
}

TEST(Influence, CoincidentOutlierGivesZeroQuotient) {
  Dataset d = noisy_square(15, 4);
  d.y.setZero();
  const ErmProblem p(d, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.1);
  const auto q = influence_fd(p, z(d.x(3, 0), 0.0), {1e-3, 0.5});
  for (const auto& e : q) EXPECT_LE(rkhs_norm(e.quotient), 1e-12);
  EXPECT_THROW(influence_fd(p, z(0.0, 0.0), {0.0}), InputError);
  EXPECT_THROW(influence_fd(p, z(0.0, 0.0), {1.0}), InputError);
}

TEST(Influence, DecreasesWithLambdaAwayFromData) {
  // Default experiment setup with a large sample.
  const Dataset d = noisy_square(2000, 5);
  const Point outlier = z(1.5, 1.5 * 1.5 * 1.5);
  std::vector<double> norms;
  for (double lambda : {0.01, 0.1}) {
    const ErmProblem p(d, KernelSpec::polynomial(1.0, 2, 0.0), LossSpec::squared(), lambda, FeasibleSet::box(-10, 10));
    norms.push_back(rkhs_norm(influence_function(p, solve_erm(p), outlier).influence));
  }
  EXPECT_GT(norms[0], norms[1]);
}

TEST(Influence, LinearInRightHandSide) {
  const ErmProblem p = smooth_problem();
  const ErmSolution s = solve_erm(p);
  const InfluenceSystem a = influence_system(p, s, z(0.7, 2.0));
  const InfluenceSystem b = influence_system(p, s, z(0.7, -3.0));
  EXPECT_EQ(a.matrix, b.matrix);
  const auto lu = a.matrix.partialPivLu();
  const Eigen::VectorXd lhs = lu.solve(a.rhs + b.rhs), rhs = lu.solve(a.rhs) + lu.solve(b.rhs);
  EXPECT_LE((lhs - rhs).norm(), 1e-10 * (1.0 + rhs.norm()));

  // Squared loss: c' is affine in the outlier response, so the IF is too.
  const auto if_at = [&](double y) { return influence_function(p, s, z(0.7, y)).influence; };
  const RkhsFunction sum = rkhs_axpy(if_at(2.0), 1.0, if_at(-3.0));
  EXPECT_LE(rkhs_distance(sum, if_at(-0.5).scaled(2.0)), 1e-10 * (1.0 + rkhs_norm(sum)));
}

TEST(Influence, ReflectionSymmetry) {
  const Dataset half = sample_base({0.0, 1.0, Response::square}, 20, 6);
  PointSet x(40, 1);
  Eigen::VectorXd y(40);
  x.topRows(20) = half.x;
  x.bottomRows(20) = -half.x;
  y << half.y, half.y;
  const ErmProblem p(Dataset(x, y), KernelSpec::gaussian(1.0), LossSpec::squared(), 0.1);
  const ErmSolution s = solve_erm(p);
  const RkhsFunction right = influence_function(p, s, z(1.7, 2.0)).influence;
  const RkhsFunction left = influence_function(p, s, z(-1.7, 2.0)).influence;
  for (double probe : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
    EXPECT_NEAR(rkhs_eval(right, x1(probe)), rkhs_eval(left, x1(-probe)), 1e-10) << probe;
  }
}

TEST(Influence, OperatorPositiveDefiniteInGramMetric) {
  // Well-separated grid with a laplacian kernel keeps the Gram matrix well conditioned.
  PointSet x(25, 1);
  Eigen::VectorXd y(25);
  for (int i = 0; i < 25; ++i) x(i, 0) = -3.0 + 0.25 * i, y[i] = x(i, 0) * x(i, 0);
  const Dataset grid(x, y);
  for (const auto& loss : {LossSpec::squared(), LossSpec::logloss()}) {
    for (double lambda : {0.01, 0.5}) {
      const ErmProblem p(grid, KernelSpec::laplacian(1.0), loss, lambda);
      const ErmSolution s = solve_erm(p);
      const InfluenceSystem sys = influence_system(p, s, z(3.4, 1.0));
      // G A = G D G + 2 lambda G is symmetric, and A = D G + 2 lambda I has spectrum >= 2 lambda.
      const Eigen::MatrixXd ga = sys.gram * sys.matrix;
      EXPECT_LE((ga - ga.transpose()).norm(), 1e-12 * ga.norm());
      const Eigen::MatrixXd sym = 0.5 * (ga + ga.transpose());
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sym, sys.gram);
      ASSERT_EQ(ges.info(), Eigen::Success);
      EXPECT_GE(ges.eigenvalues().minCoeff(), 2.0 * lambda * (1.0 - 1e-6));
    }
  }
  // Ill-conditioned Gram: the spectrum of A itself stays real and >= 2 lambda.
  for (double lambda : {0.01, 0.5}) {
    const ErmProblem p(noisy_square(25, 7), KernelSpec::gaussian(1.0), LossSpec::logloss(), lambda);
    const InfluenceSystem sys = influence_system(p, solve_erm(p), z(2.5, 1.0));
    const Eigen::EigenSolver<Eigen::MatrixXd> es(sys.matrix);
    EXPECT_LE(es.eigenvalues().imag().cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(es.eigenvalues().real().minCoeff(), 2.0 * lambda * (1.0 - 1e-6));
  }
}

TEST(Influence, CapabilityErrors) {
  const Dataset d = noisy_square(30, 8);
  // Nonsmooth loss: no IF, but the difference quotient still runs.
  const ErmProblem hinge(d, KernelSpec::gaussian(1.0), LossSpec::hinge(), 0.1);
  const ErmSolution hs = solve_erm(hinge);
  EXPECT_THROW(influence_function(hinge, hs, z(1.0, -1.0)), CapabilityError);
  const auto q = influence_fd(hinge, z(1.0, -1.0), {1e-2});
  EXPECT_TRUE(std::isfinite(rkhs_norm(q[0].quotient)));

  // Active ball constraint: boundary solution.
  const ErmProblem ball(d, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.01, FeasibleSet::ball(0.1));
  const ErmSolution bs = solve_erm(ball);
  EXPECT_NEAR(rkhs_norm(bs.f), 0.1, 1e-6);
  EXPECT_THROW(influence_function(ball, bs, z(1.0, 1.0)), CapabilityError);

  // Active coefficient box.
  const ErmProblem box(d, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.01, FeasibleSet::box(-0.01, 0.01));
  EXPECT_THROW(influence_function(box, solve_erm(box), z(1.0, 1.0)), CapabilityError);

  // Wrong outlier dimension.
  const ErmProblem p = smooth_problem();
  EXPECT_THROW(influence_function(p, solve_erm(p), Point::Constant(3, 1.0)), InputError);
}

TEST(Influence, UnregularizedNeedsSampleInput) {
  const ErmProblem p = smooth_problem();
  const ErmSolution s = solve_erm(p);
  ErmProblem bare = p;
  bare.lambda = 0.0;
  EXPECT_THROW(influence_function(bare, s, z(2.2, 5.0)), ConditioningError);
}

TEST(Influence, ApproximationImprovesAndSharpensWithN) {
  const Dataset pool = noisy_square(199, 9);
  const Point outlier = z(2.0, 8.0);
  std::vector<double> errors;
  for (int n : {50, 100, 200}) {
    const Dataset clean(pool.x.topRows(n - 1), pool.y.head(n - 1));
    const ErmProblem p(clean, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.1);
    const ErmSolution s = solve_erm(p);
    const RkhsFunction infl = influence_function(p, s, outlier).influence;

    EXPECT_EQ(rkhs_distance(approximate_contaminated_solution(s.f, infl.scaled(0.0), n), s.f), 0.0);

    // Q_N = (1/N)(sum of clean samples + outlier) is the t = 1/N mixture.
    const ErmSolution contaminated = solve_erm(contaminated_problem(p, outlier, 1.0 / n));
    const RkhsFunction approx = approximate_contaminated_solution(s.f, infl, n);
    const double err = rkhs_distance(approx, contaminated.f);
    EXPECT_LE(err, rkhs_distance(contaminated.f, s.f)) << n;
    errors.push_back(err);
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
}

TEST(Upsilon, ZeroOnFittedCurve) {
  Dataset d = noisy_square(20, 10);
  d.y.setZero();
  const ErmProblem p(d, KernelSpec::gaussian(1.0), LossSpec::squared(), 0.1);
  const UpsilonReport r = upsilon_bound(p, {z(0.5, 0.0), z(3.0, 0.0)});
  ASSERT_EQ(r.entries.size(), 2u);
  for (const auto& e : r.entries) EXPECT_LE(e.upsilon, 1e-14);
  EXPECT_LE(r.sup, 1e-14);
  EXPECT_EQ(r.t_grid, (std::vector<double>{0.0, 0.025, 0.05, 0.075, 0.1}));
}

TEST(Upsilon, GrowsAlongCubicOutliersAndRatioFinite) {
  const ErmProblem p(noisy_square(100, 11), KernelSpec::polynomial(1.0, 2, 0.0), LossSpec::squared(), 0.1,
                     FeasibleSet::box(-10, 10));
  std::vector<Point> grid;
  for (double xt : {2.0, 2.25, 2.5, 2.75, 3.0}) grid.push_back(z(xt, xt * xt * xt));
  const UpsilonReport r = upsilon_bound(p, grid);
  ASSERT_EQ(r.entries.size(), grid.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    EXPECT_EQ(e.outlier, grid[i]);
    EXPECT_GT(e.upsilon, 0.0);
    EXPECT_TRUE(std::isfinite(e.if_norm));
    EXPECT_TRUE(std::isfinite(e.ratio));
    EXPECT_NEAR(e.ratio, e.if_norm / e.upsilon, 1e-12 * e.ratio);
    if (i > 0) EXPECT_GE(e.upsilon, r.entries[i - 1].upsilon);
    sup = std::max(sup, e.upsilon);
  }
  EXPECT_EQ(r.sup, sup);
}

TEST(Upsilon, BoundsTheFirstOrderTermAtZero) {
  // At t = 0 the sup includes the clean right-hand side norm reported with the IF.
  const ErmProblem p = smooth_problem();
  const Point outlier = z(1.2, 3.0);
  const double rhs = influence_function(p, solve_erm(p), outlier).rhs_norm;
  const UpsilonReport r = upsilon_bound(p, {outlier}, {0.0});
  EXPECT_NEAR(r.entries[0].upsilon, rhs, 1e-9 * rhs);
  EXPECT_GE(upsilon_bound(p, {outlier}).entries[0].upsilon, r.entries[0].upsilon);
}
