#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "robustlab/dataset.hpp"
#include "robustlab/errors.hpp"
#include "robustlab/metrics.hpp"
#include "robustlab/perturbations.hpp"
#include "robustlab/random.hpp"

using namespace robustlab;

namespace {

double mean(const Eigen::VectorXd& v) { return v.mean(); }

double variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

std::vector<double> column(const Dataset& d) {
  return std::vector<double>(d.x.data(), d.x.data() + d.size());
}

}  // namespace

TEST(Random, NormalFunctionsMatchBoost) {
  const boost::math::normal_distribution<double> n01;
  for (double p = 1e-12; p < 1.0; p = p < 0.01 ? p * 3.0 : p + 0.01) {
    const double q = normal_quantile(p);
    const double ref = boost::math::quantile(n01, p);
    EXPECT_NEAR(q, ref, 1e-12 * (1.0 + std::abs(ref))) << p;
    const double upper = boost::math::quantile(n01, 1.0 - p);
    EXPECT_NEAR(normal_quantile(1.0 - p), upper, 1e-12 * (1.0 + std::abs(upper))) << p;
  }
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    EXPECT_NEAR(normal_cdf(x), boost::math::cdf(n01, x), 1e-15);
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_TRUE(std::isinf(normal_quantile(0.0)));
  EXPECT_TRUE(std::isinf(normal_quantile(1.0)));
}

TEST(Random, StreamsDeterministicAndOpenInterval) {
  RandomStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs = differs || u != c.uniform();
  }
  EXPECT_TRUE(differs);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 1000; ++s) seeds.insert(derive_seed(7, s));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Random, DerivedStreamsIndependentChiSquare) {
  // 10x10 contingency table of paired uniforms from streams 0 and 1.
  constexpr int bins = 10, n = 100000;
  RandomStream a(2024, 0), b(2024, 1);
  std::vector<double> counts(bins * bins, 0.0);
  for (int i = 0; i < n; ++i) {
    const int r = static_cast<int>(a.uniform() * bins), c = static_cast<int>(b.uniform() * bins);
    counts[r * bins + c] += 1.0;
  }
  std::vector<double> rows(bins, 0.0), cols(bins, 0.0);
  for (int r = 0; r < bins; ++r)
    for (int c = 0; c < bins; ++c) rows[r] += counts[r * bins + c], cols[c] += counts[r * bins + c];
  double stat = 0.0;
  for (int r = 0; r < bins; ++r) {
    for (int c = 0; c < bins; ++c) {
      const double expected = rows[r] * cols[c] / n;
      stat += (counts[r * bins + c] - expected) * (counts[r * bins + c] - expected) / expected;
    }
  }
  const boost::math::chi_squared_distribution<double> chi((bins - 1) * (bins - 1));
  EXPECT_LT(stat, boost::math::quantile(chi, 0.99));
}

TEST(SampleBase, ResponseRulesAndDeterminism) {
  const BaseModel square{0.0, 1.0, Response::square};
  const Dataset d = sample_base(square, 200, 5);
  for (Eigen::Index i = 0; i < d.size(); ++i) EXPECT_EQ(d.y[i], d.x(i, 0) * d.x(i, 0));
  const Dataset again = sample_base(square, 200, 5);
  EXPECT_EQ(d.x, again.x);
  EXPECT_EQ(d.y, again.y);
  EXPECT_NE(sample_base(square, 200, 6).x, d.x);

  const BaseModel noisy{0.0, 1.0, Response::square_plus_noise};
  const Dataset dn = sample_base(noisy, 50000, 8);
  Eigen::VectorXd eps = dn.y - dn.x.col(0).cwiseAbs2();
  EXPECT_NEAR(variance(eps), BaseModel::kNoiseVariance, 0.0005);
  EXPECT_NEAR(mean(eps), 0.0, 0.003);
  EXPECT_EQ(BaseModel({0, 1, Response::cube}).respond(2.0, 0.7), 8.0);
}

TEST(SampleBase, MomentsWithinCltBounds) {
  const Dataset d = sample_base({0.0, 1.0, Response::square}, 100000, 99);
  const Eigen::VectorXd x = d.x.col(0);
  EXPECT_GE(mean(x), -0.02);
  EXPECT_LE(mean(x), 0.02);
  EXPECT_GE(variance(x), 0.97);
  EXPECT_LE(variance(x), 1.03);
}

TEST(SampleBase, RejectsBadParameters) {
  EXPECT_THROW(sample_base({0.0, 0.0, Response::square}, 10, 1), InputError);
  EXPECT_THROW(sample_base({0.0, 1.0, Response::square}, 0, 1), InputError);
  EXPECT_THROW((TailPerturbation{1.0, 0.5}.validate()), InputError);
  EXPECT_THROW((TailPerturbation{0.9, 0.0}.validate()), InputError);
}

TEST(TailPerturbation, CdfInvariants) {
  const BaseModel m{0.3, 1.7, Response::square};
  const TailPerturbation q{0.85, 0.4};
  const double x0 = q.x0(m), x1 = q.x1(m);
  EXPECT_NEAR(x0, m.quantile(0.85), 1e-14);
  EXPECT_NEAR(x1, x0 + 0.15 / 0.4, 1e-14);
  EXPECT_NEAR(q.cdf(m, x0), 0.85, 1e-12);
  double prev = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.001) {
    const double f = q.cdf(m, x);
    EXPECT_GE(f, prev - 1e-15);
    prev = f;
    if (x <= x0) EXPECT_DOUBLE_EQ(f, m.cdf(x));
    if (x > x1) EXPECT_EQ(f, 1.0);
  }
  for (double u = 0.01; u < 0.85; u += 0.01) EXPECT_EQ(q.quantile(m, u), m.quantile(u));
  for (double u = 0.86; u < 1.0; u += 0.01) EXPECT_NEAR(q.quantile(m, u), x0 + (u - 0.85) / 0.4, 1e-12);
}

TEST(TailPerturbation, SamplesBoundedAndKsClose) {
  const BaseModel m{0.0, 1.0, Response::square};
  const TailPerturbation q{0.9, 0.5};
  const Dataset d = sample_tail_perturbed(m, q, 100000, 31);
  const std::vector<double> xs = column(d);
  EXPECT_LE(*std::max_element(xs.begin(), xs.end()), q.x1(m));
  EXPECT_LE(ks_statistic(xs, [&](double x) { return q.cdf(m, x); }), 0.01);
  for (Eigen::Index i = 0; i < d.size(); ++i) EXPECT_EQ(d.y[i], d.x(i, 0) * d.x(i, 0));
}

TEST(TailPerturbation, KantorovichQuadratureMatchesOracle) {
  // d_K(P, Q) = int_0^1 |F_P^{-1}(u) - F_Q^{-1}(u)| du; the quantiles agree below p.
  const BaseModel m{0.0, 1.0, Response::square};
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    const TailPerturbation q{0.9, beta};
    const int steps = 2000000;
    const double h = 0.1 / steps;
    double oracle = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double u = 0.9 + (i + 0.5) * h;
      oracle += std::abs(m.quantile(u) - q.quantile(m, u)) * h;
    }
    EXPECT_NEAR(tail_kantorovich(m, q), oracle, 2e-5 * oracle) << beta;
  }
  EXPECT_EQ(tail_kantorovich(m, TailPerturbation::none()), 0.0);
}

TEST(TailPerturbation, EmpiricalKantorovichNearQuadrature) {
  const BaseModel m{0.0, 1.0, Response::square};
  const TailPerturbation q{0.9, 0.5};
  // Common random numbers: both samples come from the same uniforms.
  const auto p_law = EmpiricalMeasure::uniform(column(sample_base(m, 100000, 77)));
  const auto q_law = EmpiricalMeasure::uniform(column(sample_tail_perturbed(m, q, 100000, 77)));
  const double delta2 = tail_kantorovich(m, q);
  EXPECT_NEAR(kantorovich_1d(p_law, q_law), delta2, 0.05 * delta2);
}

TEST(Mixture, SamplerCounts) {
  const BaseModel m{0.0, 1.0, Response::square};
  Point outlier(2);
  outlier << 50.0, 125000.0;
  const auto count = [&](double t, int n) {
    const Dataset d = sample_mixture({m, outlier, t}, n, 4);
    int c = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) c += d.x(i, 0) == 50.0 && d.y[i] == 125000.0;
    return c;
  };
  EXPECT_EQ(count(0.0, 1000), 0);
  EXPECT_EQ(count(1.0, 1000), 1000);
  const int c = count(0.1, 10000);
  EXPECT_GE(c, 850);
  EXPECT_LE(c, 1150);
  EXPECT_THROW(sample_mixture({m, outlier, 1.5}, 10, 1), InputError);
}

TEST(Mixture, DeterministicMeasureWeights) {
  const Dataset base = sample_base({0.0, 1.0, Response::square}, 9, 3);
  Point outlier(2);
  outlier << 2.0, 8.0;
  const EmpiricalMeasure zero = deterministic_mixture_measure(base, outlier, 0.0);
  for (Eigen::Index i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(zero.weights()[i], 1.0 / 9.0);
  EXPECT_EQ(zero.weights()[9], 0.0);

  const double t = 1.0 / 10.0;  // Q_N = (1/N)(sum of base + outlier), N = 10
  const EmpiricalMeasure qn = deterministic_mixture_measure(base, outlier, t);
  EXPECT_NEAR(qn.weights().sum(), 1.0, 1e-15);
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_NEAR(qn.weights()[i], 0.1, 1e-16);
  EXPECT_EQ(qn.atoms()(9, 0), 2.0);
  EXPECT_EQ(qn.atoms()(9, 1), 8.0);
}

TEST(Dataset, CsvRoundTripIsExact) {
  Dataset d = sample_base({0.1, 2.0, Response::square_plus_noise}, 25, 12);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  EXPECT_EQ(ss.str().rfind("x_1,y\n", 0), 0u);
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.y, d.y);

  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(read_dataset_csv(bad), InputError);
  std::stringstream ragged("x_1,x_2,y\n1,2,3\n1,2\n");
  EXPECT_THROW(read_dataset_csv(ragged), InputError);
}
