#include <gtest/gtest.h>

#include <random>

#include "mdcf/cf/orbit.hpp"

using namespace mdcf;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Integer floor_q(const Rational& x) {
  Integer z;
  mpz_fdiv_q(z.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return z;
}

// Reference: digits and next point of the (nearest-integer) Jacobi–Perron map
// written directly from the defining formulas.
struct RefStep {
  Integer a;
  std::vector<Integer> b;
  std::vector<Rational> next;
};

RefStep reference_jp(const std::vector<Rational>& x, bool nearest) {
  auto dig = [nearest](const Rational& y) { return nearest ? floor_q(y + q(1, 2)) : floor_q(y); };
  RefStep r;
  r.a = dig(1 / x[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    Rational y = x[i] / x[0];
    r.b.push_back(dig(y));
    r.next.push_back(y - r.b.back());
  }
  r.next.push_back(1 / x[0] - r.a);
  return r;
}

Rational random_rational(std::mt19937_64& rng, long lo_num, long hi_num, long den) {
  long n = lo_num + static_cast<long>(rng() % static_cast<unsigned long>(hi_num - lo_num + 1));
  return q(n, den);
}

std::vector<Real> to_real(const std::vector<Rational>& v, long prec) {
  std::vector<Real> out;
  for (const auto& x : v) out.emplace_back(x, prec);
  return out;
}

}  // namespace

TEST(GaussStep, TwoFifths) {
  auto s = gauss_step(q(2, 5));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits[0], 2);
  EXPECT_EQ(s->next[0], q(1, 2));
  EXPECT_EQ(s->theta, q(2, 5));
  EXPECT_EQ(s->int_matrix(), (IntMatrix{{0, 1}, {1, 2}}));
}

TEST(GaussStep, GoldenRatioIsFixed) {
  Real g = (sqrt(Real(5L, 256)) - 1L) / 2L;
  auto s = gauss_step(g);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits[0], 1);
  EXPECT_LT(abs(s->next[0] - g).to_double(), 1e-70);
}

TEST(GaussStep, OneThenHalt) {
  auto s = gauss_step(q(1));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits[0], 1);
  EXPECT_EQ(s->next[0], 0);
  EXPECT_FALSE(gauss_step(s->next[0]));
}

TEST(GaussStep, OutsideDomainThrows) {
  EXPECT_THROW(gauss_step(q(3, 2)), DomainError);
  EXPECT_THROW(gauss_step(q(-1, 3)), DomainError);
}

TEST(NearestIntegerGaussStep, Examples) {
  auto s = nearest_integer_gauss_step(q(5, 12));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits[0], 2);
  EXPECT_EQ(s->next[0], q(2, 5));

  auto t = nearest_integer_gauss_step(q(-1, 3));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->digits[0], -3);
  EXPECT_EQ(t->next[0], 0);
  EXPECT_FALSE(nearest_integer_gauss_step(t->next[0]));

  auto h = nearest_integer_gauss_step(q(1, 2));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->digits[0], 2);
  EXPECT_EQ(h->next[0], 0);
}

TEST(FareyStep, Examples) {
  auto a = farey_step(q(1, 3));
  EXPECT_EQ(a->digits[0], 0);
  EXPECT_EQ(a->next[0], q(1, 2));
  auto b = farey_step(q(1, 2));
  EXPECT_EQ(b->next[0], 1);
  auto c = farey_step(q(2, 3));
  EXPECT_EQ(c->digits[0], 1);
  EXPECT_EQ(c->next[0], q(1, 2));
  // x = 1/2 via the other branch also gives 1
  EXPECT_EQ((1 - q(1, 2)) / q(1, 2), 1);
  EXPECT_TRUE(farey_step(q(0)));
  EXPECT_TRUE(farey_step(q(1)));
}

TEST(JacobiPerronStep, Examples) {
  std::vector<Rational> x{q(1, 2), q(1, 3)};
  auto s = jacobi_perron_step<Rational>(x);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits, (std::vector<Integer>{0, 2}));
  EXPECT_EQ(s->next, (std::vector<Rational>{q(2, 3), 0}));

  std::vector<Rational> y{q(1, 2), q(1, 2)};
  auto t = jacobi_perron_step<Rational>(y);
  EXPECT_EQ(t->digits, (std::vector<Integer>{1, 2}));
  EXPECT_EQ(t->next, (std::vector<Rational>{0, 0}));
}

TEST(JacobiPerronStep, DiagonalCollapsesInOneStep) {
  for (long den : {3L, 7L, 11L}) {
    std::vector<Rational> x{q(2, den), q(2, den)};
    auto s = jacobi_perron_step<Rational>(x);
    EXPECT_EQ(s->digits[0], 1);
    EXPECT_EQ(s->next[0], 0);
    EXPECT_FALSE(jacobi_perron_step<Rational>(s->next));
  }
}

TEST(NijpStep, Examples) {
  std::vector<Rational> x{q(9, 20), q(1, 20)};
  auto s = nijp_step<Rational>(x);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->digits, (std::vector<Integer>{2, 0}));
  EXPECT_EQ(s->next, (std::vector<Rational>{q(1, 9), q(2, 9)}));

  std::vector<Rational> y{q(9, 20), q(1, 10)};
  auto t = nijp_step<Rational>(y);
  EXPECT_EQ(t->digits, (std::vector<Integer>{2, 0}));
  EXPECT_EQ(t->next, (std::vector<Rational>{q(2, 9), q(2, 9)}));

  std::vector<Rational> z{q(-1, 3), 0};
  auto u = nijp_step<Rational>(z);
  EXPECT_EQ(u->digits, (std::vector<Integer>{-3, 0}));
  EXPECT_EQ(u->next, (std::vector<Rational>{0, 0}));
  EXPECT_FALSE(nijp_step<Rational>(u->next));
}

TEST(NijpStep, MatrixMatchesCocycleExactly) {
  std::vector<Rational> x{q(9, 20), q(1, 20)};
  auto s = nijp_step<Rational>(x);
  EXPECT_EQ(s->int_matrix(), (IntMatrix{{0, 0, 1}, {1, 0, 0}, {0, 1, 2}}));
  EXPECT_EQ(cocycle_residual<Rational>(x, *s), 0.0);
}

TEST(SubtractSorted, Rules) {
  std::vector<Rational> u{1, q(7, 10), q(1, 5)};
  EXPECT_EQ(subtract_sorted<Rational>(AlgorithmKind::Brun, u), (std::vector<Rational>{q(3, 10), q(7, 10), q(1, 5)}));
  EXPECT_EQ(subtract_sorted<Rational>(AlgorithmKind::FullySubtractive, u),
            (std::vector<Rational>{q(4, 5), q(1, 2), q(1, 5)}));
  EXPECT_EQ(subtract_sorted<Rational>(AlgorithmKind::Selmer, u), (std::vector<Rational>{q(4, 5), q(7, 10), q(1, 5)}));
  EXPECT_EQ(subtract_sorted<Rational>(AlgorithmKind::Poincare, u),
            (std::vector<Rational>{q(3, 10), q(1, 2), q(1, 5)}));
  std::vector<Rational> unsorted{q(1, 5), 1};
  EXPECT_THROW(subtract_sorted<Rational>(AlgorithmKind::Brun, unsorted), DomainError);
}

TEST(SortedSubtractiveStep, BrunResortsAndProjectivizes) {
  // (x, 1) = (7/10, 1/5, 1): sorted (1, 7/10, 1/5) -> (3/10, 7/10, 1/5) -> (7/10, 3/10, 1/5)
  std::vector<Rational> x{q(7, 10), q(1, 5)};
  auto s = sorted_subtractive_step<Rational>(x, AlgorithmKind::Brun);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->theta, q(7, 10));
  EXPECT_EQ(s->next, (std::vector<Rational>{q(3, 7), q(2, 7)}));
  EXPECT_EQ(cocycle_residual<Rational>(x, *s), 0.0);
  EXPECT_EQ(abs(determinant(s->int_matrix())), 1);
}

TEST(SortedSubtractiveStep, ZeroEntryHalts) {
  std::vector<Rational> x{q(1, 2), 0};
  EXPECT_FALSE(sorted_subtractive_step<Rational>(x, AlgorithmKind::Selmer));
}

TEST(Expand, GaussTwoFifthsHaltsAfterTwoSteps) {
  std::vector<Rational> x{q(2, 5)};
  auto rec = expand<Rational>(make_algorithm("gauss", 1), x, 10);
  ASSERT_EQ(rec.length(), 2u);
  EXPECT_EQ(rec.steps[0].digits[0], 2);
  EXPECT_EQ(rec.steps[1].digits[0], 2);
  ASSERT_TRUE(rec.halted());
  EXPECT_EQ(*rec.halt_index, 2u);
}

TEST(Expand, NijpOneStep) {
  std::vector<Rational> x{q(9, 20), q(1, 20)};
  auto rec = expand<Rational>(make_algorithm("nijp", 2), x, 1);
  ASSERT_EQ(rec.length(), 1u);
  EXPECT_FALSE(rec.halted());
  EXPECT_EQ(rec.steps[0].digits, (std::vector<Integer>{2, 0}));
}

TEST(Expand, GoldenRatioGivesFibonacciDenominators) {
  std::vector<Real> x{(sqrt(Real(5L, 256)) - 1L) / 2L};
  auto rec = expand<Real>(make_algorithm("gauss", 1), x, 20);
  ASSERT_EQ(rec.length(), 20u);
  IntMatrix p = IntMatrix::identity(2);
  Integer f_prev = 1, f = 1;
  for (std::size_t k = 0; k < rec.length(); ++k) {
    EXPECT_EQ(rec.steps[k].digits[0], 1);
    p = mat_mul(p, rec.steps[k].int_matrix());
    EXPECT_EQ(p(1, 1), f) << "k = " << k;
    Integer nxt = f + f_prev;
    f_prev = f;
    f = nxt;
  }
}

TEST(Expand, ChainsInputsAndRejectsBadDimension) {
  std::vector<Rational> x{q(13, 37), q(5, 37)};
  auto rec = expand<Rational>(make_algorithm("jp", 2), x, 30);
  for (std::size_t k = 0; k + 1 < rec.length(); ++k) {
    std::vector<Rational> in = rec.steps[k].next;
    auto s = jacobi_perron_step<Rational>(in);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->digits, rec.steps[k + 1].digits);
  }
  EXPECT_TRUE(rec.halted());
  std::vector<Rational> bad{q(1, 2)};
  EXPECT_THROW(expand<Rational>(make_algorithm("jp", 2), bad, 1), DimensionError);
}

TEST(MakeAlgorithm, DimensionRules) {
  EXPECT_THROW(make_algorithm("gauss", 2), DomainError);
  EXPECT_THROW(make_algorithm("jp", 1), DomainError);
  EXPECT_THROW(make_algorithm("brun", 1), DomainError);
  EXPECT_THROW(make_algorithm("nope", 2), DomainError);
  EXPECT_EQ(make_algorithm("selmer", 3).dim, 3);
}

// Property tests over random rational inputs.

TEST(CfProperties, JacobiPerronAgreesWithReferenceAndDigitLaw) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 400; ++trial) {
    int d = 2 + trial % 3;
    std::vector<Rational> x;
    for (int i = 0; i < d; ++i) x.push_back(random_rational(rng, 1, 997, 997));
    auto s = jacobi_perron_step<Rational>(x);
    ASSERT_TRUE(s);
    RefStep r = reference_jp(x, false);
    ASSERT_EQ(s->digits.back(), r.a);
    for (int i = 0; i + 1 < d; ++i) {
      ASSERT_EQ(s->digits[i], r.b[i]);
      ASSERT_GE(r.b[i], 0);
      ASSERT_LE(r.b[i], r.a);
    }
    ASSERT_EQ(s->next, r.next);
    ASSERT_EQ(cocycle_residual<Rational>(x, *s), 0.0);
    ASSERT_EQ(abs(determinant(s->int_matrix())), 1);
  }
}

TEST(CfProperties, NijpAgreesWithReferenceAndDigitLaw) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 400; ++trial) {
    int d = 2 + trial % 3;
    std::vector<Rational> x;
    for (int i = 0; i < d; ++i) x.push_back(random_rational(rng, -500, 500, 1000));
    if (x[0] == 0) continue;
    auto s = nijp_step<Rational>(x);
    ASSERT_TRUE(s);
    RefStep r = reference_jp(x, true);
    ASSERT_EQ(s->digits[0], r.a);
    ASSERT_GE(abs(r.a), 2);
    Integer cap = (abs(r.a) + 1) / 2;
    for (int i = 0; i + 1 < d; ++i) {
      ASSERT_EQ(s->digits[i + 1], r.b[i]);
      ASSERT_LE(abs(r.b[i]), cap);
    }
    ASSERT_EQ(s->next, r.next);
    for (const auto& v : s->next) {
      ASSERT_GE(v, q(-1, 2));
      ASSERT_LT(v, q(1, 2));
    }
    ASSERT_EQ(cocycle_residual<Rational>(x, *s), 0.0);
    ASSERT_EQ(abs(determinant(s->int_matrix())), 1);
  }
}

TEST(CfProperties, EveryMapSatisfiesCocycleAndUnimodularity) {
  std::mt19937_64 rng(303);
  const char* names[] = {"gauss", "nigauss", "farey", "jp", "nijp", "brun", "selmer", "poincare", "fs"};
  for (const char* name : names) {
    for (int trial = 0; trial < 60; ++trial) {
      AlgorithmKind kind = parse_algorithm_kind(name);
      AlgorithmId alg = make_algorithm(name, is_one_dimensional(kind) ? 1 : 2 + trial % 2);
      const int d = alg.dim;
      bool centered = alg.kind == AlgorithmKind::NearestIntegerGauss ||
                      alg.kind == AlgorithmKind::NearestIntegerJacobiPerron;
      std::vector<Rational> x;
      for (int i = 0; i < d; ++i)
        x.push_back(centered ? random_rational(rng, -499, 499, 998) : random_rational(rng, 1, 1009, 1009));
      auto rec = expand<Rational>(alg, x, 8);
      std::vector<Rational> cur = x;
      for (const auto& s : rec.steps) {
        ASSERT_EQ(cocycle_residual<Rational>(cur, s), 0.0) << name;
        ASSERT_EQ(abs(determinant(s.int_matrix())), 1) << name;
        if (is_nonnegative(alg.kind)) {
          for (std::size_t i = 0; i < s.matrix.rows(); ++i)
            for (std::size_t j = 0; j < s.matrix.cols(); ++j) ASSERT_GE(s.matrix(i, j), 0) << name;
        }
        cur = s.next;
      }
    }
  }
}

// Distance of an exact next point to the places where some digit decision
// flips: integer and half-integer values, and ties between entries.
Rational boundary_margin(const std::vector<Rational>& next) {
  Rational m = 1;
  for (std::size_t i = 0; i < next.size(); ++i) {
    for (const Rational& c : {q(0), q(1, 2), q(-1, 2), q(1)}) m = std::min<Rational>(m, abs(next[i] - c));
    for (std::size_t j = i + 1; j < next.size(); ++j) m = std::min<Rational>(m, abs(next[i] - next[j]));
  }
  return m;
}

TEST(CfProperties, ExactAndHighPrecisionDigitsAgree) {
  std::mt19937_64 rng(404);
  Rational tol(Integer(1), Integer(1) << 128);
  std::size_t compared = 0;
  for (const char* name : {"jp", "nijp", "brun", "selmer"}) {
    for (int trial = 0; trial < 40; ++trial) {
      AlgorithmId alg = make_algorithm(name, 2);
      bool centered = alg.kind == AlgorithmKind::NearestIntegerJacobiPerron;
      std::vector<Rational> x;
      for (int i = 0; i < 2; ++i)
        x.push_back(centered ? random_rational(rng, -49999, 49999, 100003)
                             : random_rational(rng, 1, 100002, 100003));
      auto exact = expand<Rational>(alg, x, 6);
      std::size_t usable = 0;
      while (usable < exact.length() && boundary_margin(exact.steps[usable].next) > tol) ++usable;
      auto rx = to_real(x, 256);
      auto approx = expand<Real>(alg, rx, usable);
      ASSERT_EQ(approx.length(), usable) << name;
      for (std::size_t k = 0; k < usable; ++k) ASSERT_EQ(approx.steps[k].digits, exact.steps[k].digits) << name;
      compared += usable;
    }
  }
  EXPECT_GT(compared, 300u);
}

TEST(CfProperties, GaussConvergentRecurrence) {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> x{random_rational(rng, 1, 100000, 100003)};
    auto rec = expand<Rational>(make_algorithm("gauss", 1), x, 40);
    IntMatrix p = IntMatrix::identity(2);
    Integer q_prev = 0, q_cur = 1;
    for (const auto& s : rec.steps) {
      ASSERT_GE(s.digits[0], 1);
      p = mat_mul(p, s.int_matrix());
      Integer q_next = s.digits[0] * q_cur + q_prev;
      ASSERT_EQ(p(1, 1), q_next);
      q_prev = q_cur;
      q_cur = q_next;
    }
    // the last convergent of a finite expansion is the input itself
    ASSERT_TRUE(rec.halted());
    ASSERT_EQ(Rational(p(0, 1), p(1, 1)), x[0]);
  }
}
