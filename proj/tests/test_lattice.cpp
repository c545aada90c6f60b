#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdcf/lattice/simultaneous.hpp"

using namespace mdcf;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

LatticeBasis<Rational> rational_basis(std::vector<std::vector<long>> cols) {
  std::vector<std::vector<Rational>> c;
  for (const auto& col : cols) {
    c.emplace_back();
    for (long v : col) c.back().push_back(q(v));
  }
  return LatticeBasis<Rational>(std::move(c));
}

Rational det_rational(const LatticeBasis<Rational>& b) {
  // fraction-free elimination on a copy, rows = coordinates
  const std::size_t n = b.rank();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = b.cols[j][i];
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

Real golden(long prec = 256) { return (sqrt(Real(5L, prec)) - 1L) / 2L; }

bool is_fibonacci(const Integer& n) {
  Integer a = 1, b = 1;
  while (b < n) {
    Integer c = a + b;
    a = b;
    b = c;
  }
  return b == n;
}

}  // namespace

TEST(GramSchmidt, OrthogonalBasisHasZeroMu) {
  auto b = rational_basis({{2, 0, 0}, {0, 3, 0}, {0, 0, 5}});
  gram_schmidt(b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < i; ++k) EXPECT_EQ(b.mu(i, k), 0);
  EXPECT_EQ(b.bstar_sq[1], 9);
}

TEST(GramSchmidt, IdentityIsItsOwnOrthogonalization) {
  auto b = rational_basis({{1, 0}, {0, 1}});
  gram_schmidt(b);
  EXPECT_EQ(b.bstar_sq[0], 1);
  EXPECT_EQ(b.bstar_sq[1], 1);
  EXPECT_EQ(b.mu(1, 0), 0);
}

TEST(GramSchmidt, SkewedPair) {
  auto b = rational_basis({{1, 1}, {0, 1}});
  gram_schmidt(b);
  EXPECT_EQ(b.mu(1, 0), q(1, 2));
  EXPECT_EQ(b.bstar_sq[1], q(1, 2));
  // prod |b_i*|^2 = det^2
  EXPECT_EQ(b.bstar_sq[0] * b.bstar_sq[1], 1);
}

TEST(GramSchmidt, DependentColumnsThrow) {
  auto b = rational_basis({{1, 2}, {2, 4}});
  EXPECT_THROW(gram_schmidt(b), RankError);
  std::vector<std::vector<double>> c{{1.0, 2.0}, {2.0, 4.0}};
  LatticeBasis<double> f(c);
  EXPECT_THROW(gram_schmidt(f), RankError);
}

TEST(IsLllReduced, Examples) {
  auto id = rational_basis({{1, 0}, {0, 1}});
  gram_schmidt(id);
  EXPECT_TRUE(is_lll_reduced(id));
  auto skew = rational_basis({{1, 0}, {1, 1}});
  gram_schmidt(skew);
  EXPECT_EQ(skew.mu(1, 0), 1);
  EXPECT_FALSE(is_lll_reduced(skew));
}

TEST(LllReduce, IdentityAndReducedInputsAreUnchanged) {
  auto id = rational_basis({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto r = lll_reduce(id);
  EXPECT_EQ(r.basis.cols, id.cols);
  EXPECT_EQ(r.transform, IntMatrix::identity(3));
  auto red = rational_basis({{1, 0}, {0, 2}});
  auto r2 = lll_reduce(red);
  EXPECT_EQ(r2.basis.cols, red.cols);
  EXPECT_EQ(r2.swaps, 0u);
}

TEST(LllReduce, DeltaOutOfRangeIsRejected) {
  LllParams<Rational> p;
  p.delta = q(1, 4);
  EXPECT_THROW(lll_reduce(rational_basis({{1, 0}, {0, 1}}), p), DomainError);
  p.delta = 1;
  EXPECT_THROW(lll_reduce(rational_basis({{1, 0}, {0, 1}}), p), DomainError);
}

TEST(LllReduce, SwapCapRaisesBudgetError) {
  LllParams<Rational> p;
  p.max_swaps = 1;
  std::vector<Rational> alpha{q(987, 1597)};
  auto b = lambda_t_basis<Rational>(alpha, q(1, 100000000));
  EXPECT_GT(lll_reduce(b).swaps, 1u);
  EXPECT_THROW(lll_reduce(b, p), BudgetError);
}

TEST(LllReduce, RandomIntegerBasesProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> ent(-40, 40);
  int checked = 0;
  while (checked < 60) {
    std::vector<std::vector<long>> cols(3, std::vector<long>(3));
    for (auto& c : cols)
      for (auto& v : c) v = ent(rng);
    auto in = rational_basis(cols);
    const Rational det = det_rational(in);
    if (det == 0) continue;
    ++checked;
    auto r = lll_reduce(in);
    // unimodular, and reduced = input * U exactly
    EXPECT_EQ(abs(determinant(r.transform)), 1);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 3; ++i) {
        Rational acc = 0;
        for (std::size_t k = 0; k < 3; ++k) acc += in.cols[k][i] * Rational(r.transform(k, j));
        EXPECT_EQ(acc, r.basis.cols[j][i]);
      }
    LatticeBasis<Rational> fresh(r.basis.cols);
    gram_schmidt(fresh);
    EXPECT_TRUE(is_lll_reduced(fresh));
    EXPECT_EQ(fresh.bstar_sq, r.basis.bstar_sq);
    // |b1|^2 <= 2^{n-1} lambda_1^2, and (|b1|^2)^3 <= 2^3 det^2
    auto sv = brute_force_shortest(in);
    ASSERT_TRUE(sv);
    const Rational b1 = detail::dot(r.basis.cols[0], r.basis.cols[0]);
    EXPECT_LE(b1, 4 * sv->norm_sq);
    EXPECT_LE(b1 * b1 * b1, 8 * det * det);
    EXPECT_LE(sv->norm_sq * sv->norm_sq * sv->norm_sq, 8 * det * det);
  }
}

TEST(LllReduce, FloatModeAgreesWithExact) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> ent(-1000, 1000);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<long>> cols(4, std::vector<long>(4));
    for (auto& c : cols)
      for (auto& v : c) v = ent(rng);
    auto ex = rational_basis(cols);
    if (det_rational(ex) == 0) continue;
    std::vector<std::vector<double>> dc;
    for (const auto& c : cols) dc.emplace_back(c.begin(), c.end());
    auto rf = lll_reduce(LatticeBasis<double>(dc));
    auto re = lll_reduce(ex);
    EXPECT_EQ(abs(determinant(rf.transform)), 1);
    // same first-vector length up to the LLL factor either way
    const double nf = detail::dot(rf.basis.cols[0], rf.basis.cols[0]);
    const double ne = detail::dot(re.basis.cols[0], re.basis.cols[0]).get_d();
    EXPECT_LE(nf, 8 * ne);
    EXPECT_LE(ne, 8 * nf);
  }
}

TEST(BruteForceShortest, Examples) {
  auto id = rational_basis({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto s = brute_force_shortest(id);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->norm_sq, 1);

  auto b = rational_basis({{2, 0}, {1, 1}});
  auto t = brute_force_shortest(b);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->norm_sq, 2);
  EXPECT_EQ(abs(t->vec[0]), 1);
  EXPECT_EQ(abs(t->vec[1]), 1);
}

TEST(BruteForceShortest, RationalAlphaHitsExactMultiple) {
  std::vector<Rational> alpha{q(1, 3), q(2, 3)};
  auto b = lambda_t_basis<Rational>(alpha, q(1, 100));
  auto s = brute_force_shortest(b);
  ASSERT_TRUE(s);
  // b = (p - q alpha, q t) with p - q alpha = 0 and q = 3
  EXPECT_EQ(s->vec[0], 0);
  EXPECT_EQ(s->vec[1], 0);
  EXPECT_EQ(abs(s->vec[2]), q(3, 100));
}

TEST(BruteForceShortest, BudgetAndDimension) {
  auto b = rational_basis({{1, 0}, {0, 1}});
  EXPECT_THROW(brute_force_shortest(b, std::optional<Rational>(q(1000000)), 100), BudgetError);
  std::vector<std::vector<long>> big(7, std::vector<long>(7, 0));
  for (int i = 0; i < 7; ++i) big[i][i] = 1;
  EXPECT_THROW(brute_force_shortest(rational_basis(big)), DimensionError);
}

TEST(LambdaT, DeterminantIsT) {
  std::vector<Rational> alpha{q(3, 7), q(1, 5)};
  auto b = lambda_t_basis<Rational>(alpha, q(1, 1000));
  EXPECT_EQ(det_rational(b), q(1, 1000));
  EXPECT_EQ(b.cols[2][0], q(-3, 7));
  EXPECT_THROW(lambda_t_basis<Rational>(alpha, q(0)), DomainError);
}

TEST(SimultaneousApprox, ExactFractionRecovered) {
  std::vector<Rational> alpha{q(2, 5)};
  auto a = simultaneous_approx<Rational>(alpha, q(1, 10000));
  EXPECT_EQ(a.record.q, 5);
  EXPECT_EQ(a.record.p, std::vector<Integer>{2});
  EXPECT_EQ(a.record.error, 0.0);
  EXPECT_TRUE(a.certified);
}

TEST(SimultaneousApprox, ZeroVector) {
  std::vector<Rational> alpha{q(0), q(0), q(0)};
  for (auto t : {q(1, 2), q(1, 1000)}) {
    auto a = simultaneous_approx<Rational>(alpha, t);
    EXPECT_EQ(a.record.q, 1);
    EXPECT_EQ(a.record.p, (std::vector<Integer>{0, 0, 0}));
  }
}

TEST(SimultaneousApprox, SurdPairMeetsCertifiedBounds) {
  const long prec = 256;
  std::vector<Real> alpha{sqrt(Real(2L, prec)) - 1L, sqrt(Real(3L, prec)) - 1L};
  Real t(Rational(1, 1000000), prec);
  auto a = simultaneous_approx<Real>(alpha, t);
  EXPECT_TRUE(a.certified);
  const double bound = std::sqrt(2.0) * 1e-2;
  EXPECT_NEAR(a.certified_bound, bound, 1e-15);
  for (std::size_t i = 0; i < 2; ++i) {
    Real dev = abs(Real(a.record.p[i], prec) - Real(a.record.q, prec) * alpha[i]);
    EXPECT_LE(dev.to_double(), bound);
  }
  EXPECT_LE(a.record.q.get_d(), std::pow(2.0, 0.5) * std::pow(1e-6, -2.0 / 3.0));
}

TEST(SimultaneousApprox, DoubleAndRealAgreeOnModerateT) {
  std::vector<double> ad{std::sqrt(2.0) - 1, std::sqrt(3.0) - 1};
  std::vector<Real> ar{sqrt(Real(2L, 256)) - 1L, sqrt(Real(3L, 256)) - 1L};
  auto d = simultaneous_approx<double>(ad, 1e-4);
  auto r = simultaneous_approx<Real>(ar, Real(Rational(1, 10000), 256));
  EXPECT_EQ(d.record.q, r.record.q);
  EXPECT_EQ(d.record.p, r.record.p);
}

TEST(SimultaneousApprox, Preconditions) {
  std::vector<Rational> alpha{q(1, 2)};
  EXPECT_THROW(simultaneous_approx<Rational>(alpha, q(0)), DomainError);
  EXPECT_THROW(simultaneous_approx<Rational>(alpha, q(1)), DomainError);
  std::vector<Rational> out{q(3, 2)};
  EXPECT_THROW(simultaneous_approx<Rational>(out, q(1, 10)), DomainError);
}

TEST(IteratedApprox, GoldenRatioGivesFibonacciDenominators) {
  std::vector<Real> alpha{golden()};
  auto recs = iterated_approx<Real>(alpha, Real(Rational(1, 10), 256), Real(Rational(1, 10), 256), 5);
  ASSERT_FALSE(recs.empty());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_TRUE(is_fibonacci(recs[i].record.q)) << recs[i].record.q.get_str();
    if (i) {
      EXPECT_LT(recs[i - 1].record.q, recs[i].record.q);
    }
  }
  EXPECT_GE(recs.size(), 3u);
}

TEST(IteratedApprox, SingleStepIsSingleton) {
  std::vector<Rational> alpha{q(3, 11)};
  auto recs = iterated_approx<Rational>(alpha, q(1, 10000), q(1, 2), 1);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].record.q, 11);
  EXPECT_THROW(iterated_approx<Rational>(alpha, q(1, 100), q(1, 2), 0), PreconditionError);
  EXPECT_THROW(iterated_approx<Rational>(alpha, q(1, 100), q(2), 3), DomainError);
}

TEST(IteratedApprox, DirichletRatioWithinBoundForRandomPairs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double bound = std::pow(2.0, 3.0 / 4.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<Real> alpha{Real(u(rng), 256), Real(u(rng), 256)};
    auto recs = iterated_approx<Real>(alpha, Real(0.5, 256), Real(0.5, 256), 20, {}, 2);
    for (const auto& r : recs) {
      ASSERT_TRUE(r.certified);
      EXPECT_LE(r.record.dirichlet_ratio, bound);
    }
  }
}

TEST(IteratedApprox, DeterministicAcrossThreads) {
  std::vector<Real> alpha{sqrt(Real(2L, 256)) - 1L, sqrt(Real(5L, 256)) - 2L};
  auto a = iterated_approx<Real>(alpha, Real(0.1, 256), Real(0.3, 256), 15, {}, 1);
  auto b = iterated_approx<Real>(alpha, Real(0.1, 256), Real(0.3, 256), 15, {}, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].record.q, b[i].record.q);
    EXPECT_EQ(a[i].record.p, b[i].record.p);
  }
}
