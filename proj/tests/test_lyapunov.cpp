#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mdcf/stats/lyapunov.hpp"

using namespace mdcf;

namespace {

LyapunovOptions small(std::size_t n, std::size_t trials, std::uint64_t seed = 5) {
  LyapunovOptions o;
  o.n = n;
  o.trials = trials;
  o.seed = seed;
  o.burn_in = 200;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(EtaStar, TableRows) {
  EXPECT_NEAR(eta_star(1.72241, -0.691444).value, 1.40144, 5e-6);
  EXPECT_DOUBLE_EQ(eta_star(1.3, 0.0).value, 1.0);
  EXPECT_NEAR(eta_star(1.15930, 0.01889).value, 0.983705, 5e-6);
}

TEST(EtaStar, ErrorPropagation) {
  auto e = eta_star(2.0, -1.0, 0.1, 0.2);
  // d/dl1 = l2/l1^2 = -0.25, d/dl2 = -1/l1 = -0.5
  EXPECT_NEAR(e.error, std::sqrt(0.25 * 0.25 * 0.01 + 0.5 * 0.5 * 0.04), 1e-15);
}

TEST(EtaStar, NonPositiveLambdaOneIsUndefined) {
  EXPECT_THROW(eta_star(0.0, -1.0), DomainError);
  EXPECT_THROW(eta_star(-0.5, -1.0), DomainError);
}

TEST(Welford, MergeMatchesSequential) {
  Welford all, a, b;
  for (int i = 0; i < 100; ++i) {
    double x = std::sin(i * 0.7) * 3 + i * 0.01;
    all.add(x);
    (i < 37 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count, all.count);
  EXPECT_NEAR(a.mean, all.mean, 1e-13);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-12);
}

TEST(Lyapunov, GaussMatchesLevyConstant) {
  auto est = estimate_lyapunov(make_algorithm("gauss", 1), small(100000, 10));
  const double levy = std::numbers::pi * std::numbers::pi / (12 * std::log(2.0));
  EXPECT_NEAR(est.lambda1, levy, 4 * est.stderr1 + 1e-3);
  // 2x2 unimodular cocycle: lambda2 = -lambda1
  EXPECT_NEAR(est.lambda2, -est.lambda1, 1e-9);
}

TEST(Lyapunov, GaussLambdaOneAgreesWithExactConvergentGrowth) {
  auto alg = make_algorithm("gauss", 1);
  LyapunovOptions o = small(20000, 1);
  Welford frame, exact;
  for (std::size_t t = 0; t < 12; ++t) {
    auto x0 = trial_start(alg, o.seed, t, 0);
    auto r = lyapunov_trial(alg, x0, o);
    ASSERT_TRUE(r);
    frame.add(r->lambda1);
    // independent route: same double orbit, exact integer q_n from the digits
    std::vector<double> cur = x0;
    Integer q_prev = 0, q = 1;
    for (std::size_t k = 0; k < o.burn_in + o.n; ++k) {
      auto s = gauss_step(cur[0]);
      ASSERT_TRUE(s);
      cur = s->next;
      if (k < o.burn_in) continue;
      Integer q_next = Integer(s->digits[0]) * q + q_prev;
      q_prev = q;
      q = q_next;
    }
    exact.add(log_abs(q) / static_cast<double>(o.n));
  }
  const double combined = std::hypot(frame.standard_error(), exact.standard_error());
  EXPECT_NEAR(frame.mean, exact.mean, 3 * combined);
  EXPECT_NEAR(frame.mean, exact.mean, 1e-3);
}

TEST(Lyapunov, RenormalizationPeriodDoesNotMatter) {
  auto alg = make_algorithm("nijp", 2);
  LyapunovOptions a = small(20000, 8), b = a;
  a.reorth_every = 1;
  b.reorth_every = 10;
  auto ea = estimate_lyapunov(alg, a), eb = estimate_lyapunov(alg, b);
  EXPECT_NEAR(ea.lambda1, eb.lambda1, 2 * std::max(ea.stderr1, eb.stderr1));
  EXPECT_NEAR(ea.lambda2, eb.lambda2, 2 * std::max(ea.stderr2, eb.stderr2));
}

TEST(Lyapunov, BitReproducibleAcrossRunsAndThreadCounts) {
  auto alg = make_algorithm("jp", 2);
  LyapunovOptions a = small(5000, 6);
  LyapunovOptions b = a;
  b.threads = 4;
  auto e1 = estimate_lyapunov(alg, a), e2 = estimate_lyapunov(alg, a), e3 = estimate_lyapunov(alg, b);
  EXPECT_EQ(e1.lambda1, e2.lambda1);
  EXPECT_EQ(e1.lambda2, e2.lambda2);
  EXPECT_EQ(e1.lambda1, e3.lambda1);
  EXPECT_EQ(e1.stderr2, e3.stderr2);
  auto other = estimate_lyapunov(alg, small(5000, 6, 6));
  EXPECT_NE(e1.lambda1, other.lambda1);
}

TEST(Lyapunov, OrderedExponentsAndEtaStar) {
  for (const char* name : {"jp", "nijp", "brun", "selmer"}) {
    auto est = estimate_lyapunov(make_algorithm(name, 2), small(10000, 4));
    EXPECT_GT(est.lambda1, est.lambda2) << name;
    EXPECT_NEAR(est.eta_star, 1 - est.lambda2 / est.lambda1, 1e-12) << name;
    EXPECT_EQ(est.discarded, 0u) << name;
  }
}

TEST(Lyapunov, HighPrecisionOrbitCrossCheck) {
  auto alg = make_algorithm("nijp", 2);
  LyapunovOptions d = small(20000, 4), h = d;
  h.precision = 256;
  auto ed = estimate_lyapunov(alg, d), eh = estimate_lyapunov(alg, h);
  EXPECT_NEAR(ed.lambda1, eh.lambda1, 3 * std::hypot(ed.stderr1, eh.stderr1) + 1e-3);
  EXPECT_NEAR(ed.lambda2, eh.lambda2, 3 * std::hypot(ed.stderr2, eh.stderr2) + 1e-3);
}

TEST(Lyapunov, HaltingStartIsRejected) {
  auto alg = make_algorithm("gauss", 1);
  EXPECT_FALSE(lyapunov_trial(alg, {0.5}, small(10, 1)));
  LyapunovOptions hp = small(10, 1);
  hp.precision = 128;
  EXPECT_FALSE(lyapunov_trial(alg, {0.25}, hp));
}

TEST(Lyapunov, LogNormHistogramCountsEveryStep) {
  auto est = estimate_lyapunov(make_algorithm("gauss", 1), small(3000, 3));
  std::uint64_t total = est.log_norms.overflow;
  for (auto c : est.log_norms.counts) total += c;
  EXPECT_EQ(total, 9000u);
  EXPECT_GT(est.log_norms.max, 0.0);
}

TEST(Lyapunov, BudgetAndPreconditions) {
  LyapunovOptions o = small(1000, 10);
  o.step_budget = 5000;
  EXPECT_THROW(estimate_lyapunov(make_algorithm("jp", 2), o), BudgetError);
  EXPECT_THROW(estimate_lyapunov(make_algorithm("jp", 2), small(0, 1)), PreconditionError);
  LyapunovOptions p = small(10, 1);
  p.precision = 20;
  EXPECT_THROW(estimate_lyapunov(make_algorithm("jp", 2), p), DomainError);
}
