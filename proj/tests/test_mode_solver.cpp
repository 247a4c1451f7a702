#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "vexmem/mode_solver.hpp"

using vexmem::ExponentFunction;
using vexmem::ModeProblem;
using vexmem::ScalarForcing;
using vexmem::SplitKernel;
using vexmem::TimeGrid;

namespace {

constexpr double pi = std::numbers::pi;

long double series_ml(long double a, long double b, long double z) {
  long double sum = 0.0L, zk = 1.0L;
  for (int k = 0; k < 200; ++k) {
    sum += zk / std::tgamma(a * k + b);
    zk *= z;
  }
  return sum;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Max over coarse nodes of |u_N - u_2N|; the fine grid holds the coarse nodes at even indices.
double self_difference(const vexmem::ModeSolution& coarse, const vexmem::ModeSolution& fine) {
  double m = 0.0;
  for (std::size_t n = 0; n < coarse.values.size(); ++n) m = std::max(m, std::abs(coarse.values[n] - fine.values[2 * n]));
  return m;
}

double trapezoid_sq(const std::vector<double>& v, const TimeGrid& g) {
  double s = 0.0;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) s += 0.5 * g.step(n + 1) * (v[n] * v[n] + v[n + 1] * v[n + 1]);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[v.size() / 2] + v[(v.size() - 1) / 2]);
}

SplitKernel constant_kernel(double a) { return SplitKernel(ExponentFunction::constant(a)); }

}  // namespace

TEST(TimeGrid, NodesAndRefinement) {
  const TimeGrid g(2.0, 10, 3.0);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[10], 2.0);
  for (std::size_t n = 1; n < g.size(); ++n) EXPECT_GT(g[n], g[n - 1]);
  const auto r = g.refined();
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(r[2 * n], g[n], 1e-15);
  const TimeGrid u(1.0, 4);
  EXPECT_DOUBLE_EQ(u[1], 0.25);
  EXPECT_THROW(TimeGrid(1.0, 1), vexmem::DomainError);
  EXPECT_THROW(TimeGrid(1.0, 4, 0.5), vexmem::DomainError);
}

TEST(Oracle, ZeroEigenvalueCases) {
  const TimeGrid g(1.0, 32, 2.0);
  const auto s1 = vexmem::volterra_oracle_solve(ModeProblem(constant_kernel(0.5), 0.0, 1.0), g);
  for (double u : s1.values) EXPECT_EQ(u, 1.0);
  const auto s2 = vexmem::volterra_oracle_solve(ModeProblem(constant_kernel(0.5), 0.0, 0.0, ScalarForcing::constant(1.0)), g);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(s2.values[n], g[n], 1e-14);
  EXPECT_EQ(s2.iterations, 0u);
}

TEST(Oracle, HomogeneousConstantExponentConverges) {
  const ModeProblem p(constant_kernel(0.5), 1.0, 1.0);
  std::vector<double> errors;
  for (std::size_t N : {64, 128, 256, 512}) {
    const TimeGrid g(1.0, N, 4.0);
    const auto s = vexmem::volterra_oracle_solve(p, g);
    EXPECT_EQ(s.values[0], 1.0);
    double err = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n)
      err = std::max(err, std::abs(s.values[n] - vexmem::mittag_leffler({1.5, 1.0}, -std::pow(g[n], 1.5))));
    errors.push_back(err);
  }
  EXPECT_LE(errors.back(), 1e-3);
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GE(std::log2(errors[i - 1] / errors[i]), 0.85) << i;
}

TEST(Oracle, SelfConvergenceWithVariableExponent) {
  const ModeProblem p(SplitKernel(ExponentFunction::affine(0.4, 0.3)), pi * pi, 1.0, ScalarForcing::polynomial({1.0, 1.0}));
  const double gamma = TimeGrid::default_grading(0.4);
  const auto reference = vexmem::volterra_oracle_solve(p, TimeGrid(1.0, 512, gamma));
  std::vector<double> errors;
  for (std::size_t N : {32, 64, 128}) {
    const auto s = vexmem::volterra_oracle_solve(p, TimeGrid(1.0, N, gamma));
    double err = 0.0;
    for (std::size_t n = 0; n < s.values.size(); ++n) err = std::max(err, std::abs(s.values[n] - reference.values[n * (512 / N)]));
    errors.push_back(err);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GE(errors[i - 1] / errors[i], 1.8) << i;
}

TEST(Oracle, RejectsNonFiniteForcing) {
  ScalarForcing bad{[](double t) { return t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; },
                    [](double) { return 0.0; }, "bad"};
  const ModeProblem p(constant_kernel(0.5), 1.0, 1.0, bad);
  EXPECT_THROW(vexmem::volterra_oracle_solve(p, TimeGrid(1.0, 8)), vexmem::InputError);
  EXPECT_THROW(ModeProblem(constant_kernel(0.5), -1.0, 1.0), vexmem::DomainError);
  // grid longer than the kernel horizon
  EXPECT_THROW(vexmem::volterra_oracle_solve(ModeProblem(constant_kernel(0.5), 1.0, 1.0), TimeGrid(2.0, 8)), vexmem::DomainError);
}

TEST(PicardMap, Examples) {
  const TimeGrid g(1.0, 64, 2.0);
  const std::vector<double> zero(g.size(), 0.0);
  const auto w0 = vexmem::apply_picard_map(ModeProblem(SplitKernel(ExponentFunction::affine(0.5, 0.2)), 3.0, 1.0), g, zero);
  for (double w : w0) EXPECT_EQ(w, 0.0);
  const auto w1 = vexmem::apply_picard_map(ModeProblem(constant_kernel(0.5), 0.0, 1.0, ScalarForcing::constant(1.0)), g, zero);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(w1[n], g[n], 1e-14);
  const auto w2 = vexmem::apply_picard_map(ModeProblem(constant_kernel(0.5), 1.0, 1.0, ScalarForcing::constant(1.0)), g, zero);
  EXPECT_EQ(w2[0], 0.0);
  for (std::size_t n = 1; n < g.size(); ++n) {
    const double t = g[n];
    const double want = static_cast<double>(t * series_ml(1.5L, 2.0L, -std::pow(static_cast<long double>(t), 1.5L)));
    EXPECT_NEAR(w2[n], want, 1e-12) << t;
  }
}

TEST(PicardMap, RejectsNonzeroStart) {
  const TimeGrid g(1.0, 8);
  std::vector<double> v(g.size(), 1.0);
  EXPECT_THROW(vexmem::apply_picard_map(ModeProblem(constant_kernel(0.5), 1.0, 1.0), g, v), vexmem::InputError);
  EXPECT_THROW(vexmem::apply_picard_map(ModeProblem(constant_kernel(0.5), 1.0, 1.0), g, std::vector<double>(3, 0.0)),
               vexmem::InputError);
}

TEST(PicardSolve, IterationCountsForTrivialMaps) {
  const TimeGrid g(1.0, 32, 2.0);
  const auto zero = vexmem::picard_solve(ModeProblem(SplitKernel(ExponentFunction::affine(0.5, 0.2)), 5.0, 0.0), g, 1.0);
  EXPECT_LE(zero.iterations, 1u);
  for (double u : zero.values) EXPECT_EQ(u, 0.0);
  const auto constant =
      vexmem::picard_solve(ModeProblem(constant_kernel(0.5), 5.0, 1.0, ScalarForcing::polynomial({1.0, 1.0})), g, 1.0);
  EXPECT_EQ(constant.iterations, 1u);
  EXPECT_EQ(constant.values[0], 1.0);
}

TEST(PicardSolve, HomogeneousConstantExponentIsExact) {
  const TimeGrid g(1.0, 16, 2.0);
  const auto s = vexmem::picard_solve(ModeProblem(constant_kernel(0.5), 1.0, 1.0), g, 1.0);
  for (std::size_t n = 0; n < g.size(); ++n)
    EXPECT_NEAR(s.values[n], vexmem::mittag_leffler({1.5, 1.0}, -std::pow(g[n], 1.5)), 1e-13);
}

TEST(PicardSolve, AgreesWithOracleWithinSelfConvergenceEstimates) {
  const ModeProblem p(SplitKernel(ExponentFunction::affine(0.5, 0.2)), pi * pi, 1.0, ScalarForcing::polynomial({1.0, 1.0}));
  const TimeGrid g(1.0, 128, TimeGrid::default_grading(0.5));
  const TimeGrid fine = g.refined();
  const auto o = vexmem::volterra_oracle_solve(p, g);
  const auto o2 = vexmem::volterra_oracle_solve(p, fine);
  const auto q = vexmem::picard_solve(p, g, 1.0);
  const auto q2 = vexmem::picard_solve(p, fine, 1.0);
  EXPECT_LE(q.residual, 1e-10);
  // each scheme's error is bounded by about twice its N to 2N difference at second order
  const double budget = 2.0 * (self_difference(o, o2) + self_difference(q, q2));
  EXPECT_LE(max_abs_diff(o.values, q.values), budget);
  EXPECT_GT(budget, 0.0);
}

TEST(PicardSolve, IterationCountDecreasesWithSigma) {
  const vexmem::PicardOperator op(ModeProblem(SplitKernel(ExponentFunction::affine(0.3, 0.2)), pi * pi, 1.0,
                                      ScalarForcing::polynomial({1.0, 1.0})),
                          TimeGrid(1.0, 64, 2.0));
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (double sigma : {1.0, 10.0, 100.0, 1000.0}) {
    const auto s = vexmem::picard_solve(op, sigma, 1e-10, 50);
    EXPECT_LE(s.iterations, previous) << sigma;
    previous = s.iterations;
  }
}

TEST(PicardSolve, ReportsNonConvergence) {
  const ModeProblem p(SplitKernel(ExponentFunction::affine(0.5, 0.2)), pi * pi, 1.0);
  try {
    vexmem::picard_solve(p, TimeGrid(1.0, 16, 2.0), 0.0, 1e-15, 1);
    FAIL() << "expected ConvergenceError";
  } catch (const vexmem::ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-15);
  }
  EXPECT_THROW(vexmem::picard_solve(p, TimeGrid(1.0, 16), 1.0, 0.0), vexmem::DomainError);
}

TEST(WeightedNorm, ClosedForms) {
  const TimeGrid g(1.0, 200);
  std::vector<double> lin(g.size()), quad(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) lin[n] = g[n];
  EXPECT_NEAR(vexmem::weighted_norm(lin, g, 0.0), 1.0, 1e-14);
  for (double sigma : {0.5, 2.0, 30.0})
    EXPECT_NEAR(vexmem::weighted_norm(lin, g, sigma), std::sqrt((1.0 - std::exp(-2.0 * sigma)) / (2.0 * sigma)), 1e-14);
  const TimeGrid fine(1.0, 20000);
  quad.resize(fine.size());
  for (std::size_t n = 0; n < fine.size(); ++n) quad[n] = fine[n] * fine[n];
  EXPECT_NEAR(vexmem::weighted_norm(quad, fine, 1.0), std::sqrt(1.0 - 5.0 * std::exp(-2.0)), 5e-5);
  // int_0^1 4 t^2 e^(-2t) dt = 1 - 5 e^(-2), so the norm is 0.568615...
  EXPECT_NEAR(vexmem::weighted_norm(quad, fine, 1.0), 0.568615, 5e-5);
  EXPECT_THROW(vexmem::weighted_norm(lin, g, -1.0), vexmem::DomainError);
  EXPECT_THROW(vexmem::weighted_norm(quad, g, 1.0), vexmem::InputError);
}

TEST(Contraction, TrivialCases) {
  const TimeGrid g(1.0, 32, 2.0);
  const auto c = vexmem::contraction_probe(ModeProblem(constant_kernel(0.4), pi * pi, 1.0), g, {1.0, 10.0, 100.0});
  EXPECT_TRUE(c.trivial());
  EXPECT_TRUE(std::isnan(c.slope));
  const auto z = vexmem::contraction_probe(ModeProblem(SplitKernel(ExponentFunction::affine(0.3, 0.2)), 0.0, 1.0), g, {1.0, 10.0});
  EXPECT_TRUE(z.trivial());
  EXPECT_THROW(vexmem::contraction_probe(ModeProblem(constant_kernel(0.4), 1.0, 1.0), g, {1.0}), vexmem::DomainError);
}

TEST(Contraction, FactorsDecreaseStrictly) {
  const vexmem::PicardOperator op(ModeProblem(SplitKernel(ExponentFunction::affine(0.3, 0.2)), pi * pi, 1.0),
                                  TimeGrid(1.0, 128, TimeGrid::default_grading(0.3)));
  const auto r = vexmem::contraction_probe(op, {1.0, 10.0, 100.0, 1000.0});
  ASSERT_EQ(r.factor.size(), 4u);
  EXPECT_TRUE(r.strictly_decreasing());
  EXPECT_LT(r.factor.back(), 0.5);
  EXPECT_TRUE(r.warnings.empty());
  // decays at least as fast as the half-exponent rate
  EXPECT_TRUE(std::isfinite(r.slope));
  EXPECT_LE(r.slope, -0.3 / 2.0);
  const double sigma = vexmem::select_sigma(op);
  EXPECT_LT(vexmem::contraction_probe(op, {sigma, 10 * sigma}).factor[0], 0.5);
  EXPECT_LE(vexmem::picard_solve(op, sigma, 1e-10, 50).residual, 1e-10);
}

TEST(Singularity, TrivialCases) {
  const TimeGrid g(1.0, 256, 4.0);
  const auto none = vexmem::singularity_probe(ModeProblem(constant_kernel(0.5), 0.0, 1.0), g);
  EXPECT_EQ(none.limit, 0.0);
  EXPECT_EQ(none.predicted, 0.0);
  const auto smooth = vexmem::singularity_probe(ModeProblem(constant_kernel(0.5), pi * pi, 0.0, ScalarForcing::polynomial({1.0, 1.0})), g);
  EXPECT_EQ(smooth.predicted, 0.0);
  // the residual t^alpha0 f'(t) term vanishes only like t^(1/2) at the sampled nodes
  EXPECT_LT(std::abs(smooth.limit), 0.05);
}

TEST(Singularity, LimitMatchesDominantBalance) {
  const ModeProblem p(constant_kernel(0.5), pi * pi, 1.0);
  const double predicted = -pi * pi / std::tgamma(0.5);
  EXPECT_NEAR(predicted, -5.5683, 1e-4);
  for (std::size_t N : {256, 512}) {
    const auto est = vexmem::singularity_probe(p, TimeGrid(1.0, N, 4.0));
    EXPECT_NEAR(est.predicted, predicted, 1e-12);
    EXPECT_LE(std::abs(est.limit - predicted), 0.05 * std::abs(predicted)) << N;
    ASSERT_EQ(est.samples.size(), 3u);
  }
  const ModeProblem v(SplitKernel(ExponentFunction::affine(0.5, 0.2)), pi * pi, 1.0);
  const auto ev = vexmem::singularity_probe(v, TimeGrid(1.0, 512, 4.0));
  EXPECT_LE(std::abs(ev.limit - predicted), 0.05 * std::abs(predicted));
}

TEST(Singularity, CoarseGridIsAResolutionError) {
  EXPECT_THROW(vexmem::singularity_probe(ModeProblem(constant_kernel(0.5), 1.0, 1.0), TimeGrid(1.0, 64)), vexmem::ResolutionError);
}

TEST(Stability, RatioBoundedOverRandomFamily) {
  // ||u||_{H^1} / (lambda |u0| + ||f||_{H^1}) over random eigenvalues and data
  const SplitKernel k(ExponentFunction::affine(0.5, 0.2));
  const TimeGrid g(1.0, 64, TimeGrid::default_grading(0.5));
  const TimeGrid fine(1.0, 2000);
  const auto memory = vexmem::MemoryWeights::build(k, g);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> idx(1, 12);
  std::vector<double> ratios;
  for (int trial = 0; trial < 20; ++trial) {
    const double lam = std::pow(idx(rng) * pi, 2);
    const double a = u(rng), b = u(rng), c = u(rng);
    const ModeProblem p(k, lam, c, ScalarForcing::polynomial({a, b}));
    const auto s = vexmem::volterra_oracle_solve(p, g, memory);
    const double uh1 = std::sqrt(trapezoid_sq(s.values, g) + trapezoid_sq(s.derivative, g));
    std::vector<double> fv(fine.size()), fd(fine.size(), b);
    for (std::size_t n = 0; n < fine.size(); ++n) fv[n] = a + b * fine[n];
    const double fh1 = std::sqrt(trapezoid_sq(fv, fine) + trapezoid_sq(fd, fine));
    ratios.push_back(uh1 / (lam * std::abs(c) + fh1));
  }
  const double mx = *std::max_element(ratios.begin(), ratios.end());
  EXPECT_LE(mx, 10.0 * median(ratios)) << "max " << mx << " median " << median(ratios);
}
