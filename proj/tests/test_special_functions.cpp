#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vexmem/ml_table.hpp"
#include "vexmem/special_functions.hpp"

using vexmem::MLParams;
using vexmem::mittag_leffler;

namespace {

// Direct power series in long double; adequate where the terms stay moderate.
long double series_oracle(long double a, long double b, long double z, int terms = 200) {
  long double sum = 0.0L;
  long double zk = 1.0L;
  for (int k = 0; k < terms; ++k) {
    const long double arg = a * k + b;
    sum += zk / std::tgamma(arg);
    zk *= z;
    if (arg > 1700) break;
  }
  return sum;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Gamma, ReferenceValues) {
  EXPECT_DOUBLE_EQ(vexmem::gamma(1.0), 1.0);
  EXPECT_NEAR(vexmem::gamma(0.5), 1.7724538509055160, 1e-13 * 1.78);
  EXPECT_NEAR(vexmem::gamma(2.5), 1.3293403881791370, 1e-13 * 1.33);
}

TEST(Gamma, MatchesStdTgammaAcrossRange) {
  for (double x = 0.01; x < 60.0; x *= 1.07) EXPECT_LT(rel(vexmem::gamma(x), std::tgamma(x)), 1e-13) << x;
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(vexmem::gamma(0.0), vexmem::DomainError);
  EXPECT_THROW(vexmem::gamma(-1.5), vexmem::DomainError);
  EXPECT_THROW(vexmem::digamma(0.0), vexmem::DomainError);
}

TEST(Digamma, ReferenceValues) {
  EXPECT_NEAR(vexmem::digamma(1.0), -0.5772156649015329, 1e-12);
  EXPECT_NEAR(vexmem::digamma(0.5), -1.9635100260214235, 1e-12);
  EXPECT_NEAR(vexmem::digamma(2.0), 0.4227843350984671, 1e-12);
}

TEST(Digamma, RecurrenceProperty) {
  for (double x = 0.05; x < 30.0; x *= 1.13)
    EXPECT_NEAR(vexmem::digamma(x + 1.0), vexmem::digamma(x) + 1.0 / x, 1e-12 * (1.0 + 1.0 / x)) << x;
}

TEST(Digamma, MatchesLogGammaDerivative) {
  for (double x : {0.3, 0.9, 1.7, 4.2, 11.0}) {
    const double h = 1e-4 * x;
    const double d1 = (vexmem::log_gamma(x + h) - vexmem::log_gamma(x - h)) / (2 * h);
    const double d2 = (vexmem::log_gamma(x + 2 * h) - vexmem::log_gamma(x - 2 * h)) / (4 * h);
    EXPECT_NEAR((4 * d1 - d2) / 3, vexmem::digamma(x), 1e-9) << x;
  }
}

TEST(MittagLeffler, ClosedFormExamples) {
  EXPECT_NEAR(mittag_leffler({1.0, 1.0}, -1.0), 0.36787944117144233, 1e-15);
  EXPECT_NEAR(mittag_leffler({2.0, 1.0}, -4.0), -0.4161468365471424, 1e-14);
  EXPECT_NEAR(mittag_leffler({2.0, 2.0}, -4.0), 0.4546487134128409, 1e-14);
}

TEST(MittagLeffler, SeriesOracleAtMinusOne) {
  const double want = static_cast<double>(series_oracle(1.5L, 1.0L, -1.0L));
  EXPECT_LT(rel(mittag_leffler({1.5, 1.0}, -1.0), want), 1e-14);
  const double want2 = static_cast<double>(series_oracle(1.5L, 2.0L, -1.0L));
  EXPECT_LT(rel(mittag_leffler({1.5, 2.0}, -1.0), want2), 1e-14);
}

TEST(MittagLeffler, SeriesOracleInContourRegime) {
  for (double a : {1.2, 1.5, 1.8})
    for (double b : {1.0, 2.0, a})
      for (double z : {-1.5, -3.0, -7.0, -15.0}) {
        const double want = static_cast<double>(series_oracle(a, b, z, 400));
        EXPECT_LT(std::abs(mittag_leffler({a, b}, z) - want), 1e-12 * std::max(1.0, std::abs(want)))
            << a << " " << b << " " << z;
      }
}

TEST(MittagLeffler, ValueAtZeroIsReciprocalGamma) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.05, 2.0), ub(0.05, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double a = ua(rng), b = ub(rng);
    EXPECT_LT(rel(mittag_leffler({a, b}, 0.0), 1.0 / std::tgamma(b)), 1e-12) << a << " " << b;
  }
}

TEST(MittagLeffler, ExponentialIdentity) {
  for (int i = 0; i < 200; ++i) {
    const double z = -30.0 * i / 199.0;
    EXPECT_NEAR(mittag_leffler({1.0, 1.0}, z), std::exp(z), 1e-10);
  }
}

TEST(MittagLeffler, CosineAndSineIdentities) {
  for (int i = 0; i <= 400; ++i) {
    const double x = 20.0 * i / 400.0;
    EXPECT_NEAR(mittag_leffler({2.0, 1.0}, -x * x), std::cos(x), 1e-10) << x;
    if (x > 0) EXPECT_NEAR(mittag_leffler({2.0, 2.0}, -x * x), std::sin(x) / x, 1e-10) << x;
  }
}

TEST(MittagLeffler, RegimesAgreeAtHandover) {
  namespace ml = vexmem::ml;
  for (double a : {0.3, 0.6, 0.9, 1.2, 1.5, 1.8})
    for (double b : {1.0, 2.0, a, 2.5}) {
      const MLParams p{a, b};
      // series / contour at |z| = 1
      const auto s = ml::series(p, -1.0);
      const auto c = ml::contour(p, -1.0);
      EXPECT_LT(std::abs(s.value - c.value), 1e-9 * std::max(std::abs(s.value), 1e-3 * c.scale)) << a << " " << b;
      // contour / asymptotic at the threshold
      const double z = -ml::asymptotic_threshold(a);
      const auto c2 = ml::contour(p, z);
      const auto as = ml::asymptotic(p, z);
      EXPECT_LT(std::abs(c2.value - as.value), 1e-9 * std::max(std::abs(as.value), 1e-3 * c2.scale)) << a << " " << b;
    }
}

TEST(MittagLeffler, DerivativeIdentityOfIntegratedFunction) {
  // d/dt [t E_{a,2}(-lam t^a)] = E_{a,1}(-lam t^a), checked by extrapolated central differences
  for (auto [a0, lam] : {std::pair{0.2, 1.0}, std::pair{0.5, 9.8696}, std::pair{0.8, 100.0}}) {
    const double a = 2.0 - a0;
    auto F = [&](double t) { return t * mittag_leffler({a, 2.0}, -lam * std::pow(t, a)); };
    for (int i = 1; i <= 20; ++i) {
      const double t = 0.05 * i;
      const double h = 1e-3 * t;
      const double d1 = (F(t + h) - F(t - h)) / (2 * h);
      const double d2 = (F(t + h / 2) - F(t - h / 2)) / h;
      const double est = (4 * d2 - d1) / 3;
      EXPECT_NEAR(est, mittag_leffler({a, 1.0}, -lam * std::pow(t, a)), 1e-6) << a0 << " " << t;
    }
  }
}

TEST(MittagLeffler, WeightedFactorIsBounded) {
  for (double a0 : {0.2, 0.5, 0.8}) {
    const MLParams p{2.0 - a0, 2.0};
    double running = 0.0;
    std::vector<double> maxima;
    for (int j = -3; j <= 8; ++j) {
      const double v = vexmem::ml_kernel_weighted(p, std::pow(10.0, j));
      ASSERT_TRUE(std::isfinite(v));
      running = std::max(running, std::abs(v));
      maxima.push_back(running);
    }
    const double top = maxima.back();
    EXPECT_LE(std::abs(top - maxima[maxima.size() - 3]), 1e-3 * top) << a0;
  }
}

TEST(MittagLeffler, WeightedFactorExamples) {
  EXPECT_EQ(vexmem::ml_kernel_weighted({1.5, 2.0}, 0.0), 0.0);
  EXPECT_LT(rel(vexmem::ml_kernel_weighted({1.5, 2.0}, 1.0), static_cast<double>(series_oracle(1.5L, 2.0L, -1.0L))), 1e-14);
  // asymptotic regime against the contour integral
  const double big = vexmem::ml_kernel_weighted({1.5, 2.0}, 1e6);
  const auto c = vexmem::ml::contour({1.5, 2.0}, -1e6);
  EXPECT_LT(rel(big, 1e6 * c.value), 1e-9);
  EXPECT_THROW(vexmem::ml_kernel_weighted({1.5, 2.0}, -1.0), vexmem::DomainError);
  EXPECT_THROW(vexmem::ml_kernel_weighted({1.5, 1.0}, 1.0), vexmem::DomainError);
}

TEST(MittagLeffler, RejectsInvalidParameters) {
  EXPECT_THROW(mittag_leffler({0.0, 1.0}, -1.0), vexmem::DomainError);
  EXPECT_THROW(mittag_leffler({2.5, 1.0}, -1.0), vexmem::DomainError);
  EXPECT_THROW(mittag_leffler({1.0, -1.0}, -1.0), vexmem::DomainError);
  EXPECT_THROW(mittag_leffler({1.0, 1.0}, 0.5), vexmem::DomainError);
}

TEST(MittagLeffler, LargeArgumentLimits) {
  // E_{a,1}(-x) -> 0 and x E_{a,2}(-x) -> 1/Gamma(2-a)
  for (double a : {1.2, 1.5, 1.8}) {
    EXPECT_LT(std::abs(mittag_leffler({a, 1.0}, -1e6)), 1e-5);
    EXPECT_NEAR(1e8 * mittag_leffler({a, 2.0}, -1e8), 1.0 / std::tgamma(2.0 - a), 1e-6);
  }
}

TEST(MittagLefflerTable, ReproducesDirectEvaluation) {
  for (double a : {1.2, 1.5, 1.9})
    for (double b : {1.0, 2.0, 3.0, a}) {
      const MLParams p{a, b};
      const vexmem::MittagLefflerTable table(p, 5000.0);
      for (double x = 0.0; x <= 5000.0; x = x * 1.37 + 0.011) {
        const double want = mittag_leffler(p, -x);
        EXPECT_NEAR(table(x), want, 1e-12 * std::max(1.0, std::abs(want)) + 1e-14) << a << " " << b << " " << x;
      }
    }
}

TEST(MittagLefflerTable, RangeChecks) {
  const vexmem::MittagLefflerTable t({1.5, 1.0}, 10.0);
  EXPECT_THROW(t(11.0), vexmem::DomainError);
  EXPECT_THROW(t(-1.0), vexmem::DomainError);
  const vexmem::MittagLefflerTable zero({1.5, 2.0}, 0.0);
  EXPECT_DOUBLE_EQ(zero(0.0), 1.0);
}
