#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "mdcf/core/error.hpp"
#include "mdcf/core/matrix.hpp"
#include "mdcf/core/scalar.hpp"

namespace mdcf {

/// Lattice basis given by its columns b_0..b_{n-1}, with the Gram–Schmidt
/// data mu(i, k) = <b_i, b_k*> / B_k and B_k = |b_k*|^2.
template <class T>
struct LatticeBasis {
  std::vector<std::vector<T>> cols;
  Matrix<T> mu;
  std::vector<T> bstar_sq;

  LatticeBasis() = default;
  explicit LatticeBasis(std::vector<std::vector<T>> c) : cols(std::move(c)) {}

  [[nodiscard]] std::size_t rank() const { return cols.size(); }
  [[nodiscard]] std::size_t ambient() const { return cols.empty() ? 0 : cols[0].size(); }
};

template <class T>
struct LllParams {
  /// Lovász parameter in (1/4, 1).
  Rational delta{3, 4};
  /// Swap cap; exceeding it raises BudgetError.
  std::size_t max_swaps = 1'000'000;
  /// Float mode: tolerance of is_lll_reduced.
  double tolerance = 1e-12;
};

template <class T>
struct LllResult {
  LatticeBasis<T> basis;
  /// Integer unimodular U with reduced columns = input columns * U.
  IntMatrix transform;
  std::size_t swaps = 0;
};

namespace detail {

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = a[0] - a[0];
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T lattice_zero(const LatticeBasis<T>& b) {
  return b.cols[0][0] - b.cols[0][0];
}

template <class T>
T lattice_const(const LatticeBasis<T>& b, const Rational& q) {
  return scalar_traits<T>::from_rational(q, scalar_traits<T>::precision(b.cols[0][0]));
}

template <class T>
bool negligible(const T& bk, const T& scale) {
  if constexpr (scalar_traits<T>::exact) {
    (void)scale;
    return bk == 0;
  } else {
    return !(scalar_traits<T>::to_double(bk) > 1e-24 * scalar_traits<T>::to_double(scale));
  }
}

template <class T>
void check_delta(const LllParams<T>& p) {
  if (!(p.delta > Rational(1, 4) && p.delta < 1)) throw DomainError("LLL: delta must lie in (1/4, 1)");
}

}  // namespace detail

/// Fills mu and B from the columns. Throws RankError on dependent columns.
template <class T>
void gram_schmidt(LatticeBasis<T>& b) {
  const std::size_t n = b.rank();
  if (n == 0) throw DimensionError("gram_schmidt: empty basis");
  for (const auto& c : b.cols)
    if (c.size() != b.ambient()) throw DimensionError("gram_schmidt: ragged basis");
  const T zero = detail::lattice_zero(b);
  b.mu = Matrix<T>(n, n, zero);
  b.bstar_sq.assign(n, zero);
  std::vector<std::vector<T>> star(n);
  for (std::size_t i = 0; i < n; ++i) {
    star[i] = b.cols[i];
    for (std::size_t k = 0; k < i; ++k) {
      b.mu(i, k) = detail::dot(b.cols[i], star[k]) / b.bstar_sq[k];
      for (std::size_t r = 0; r < star[i].size(); ++r) star[i][r] -= b.mu(i, k) * star[k][r];
    }
    b.mu(i, i) = scalar_traits<T>::one(zero);
    b.bstar_sq[i] = detail::dot(star[i], star[i]);
    if (detail::negligible(b.bstar_sq[i], detail::dot(b.cols[i], b.cols[i])))
      throw RankError("gram_schmidt: columns are linearly dependent");
  }
}

/// Properness |mu_ik| <= 1/2 and the Lovász condition
/// delta B_{i-1} <= B_i + mu_{i,i-1}^2 B_{i-1}, exactly in rational
/// arithmetic and up to the relative tolerance in floating point. Uses the
/// stored Gram–Schmidt data, which must be fresh.
template <class T>
bool is_lll_reduced(const LatticeBasis<T>& b, const LllParams<T>& p = {}) {
  using tr = scalar_traits<T>;
  const std::size_t n = b.rank();
  const T half = detail::lattice_const(b, Rational(1, 2));
  const T delta = detail::lattice_const(b, p.delta);
  const double tol = p.tolerance;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if constexpr (tr::exact) {
        if (tr::abs(b.mu(i, k)) > half) return false;
      } else {
        if (tr::to_double(tr::abs(b.mu(i, k))) > 0.5 + tol) return false;
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const T& m = b.mu(i, i - 1);
    T lhs = delta * b.bstar_sq[i - 1];
    T rhs = b.bstar_sq[i] + m * m * b.bstar_sq[i - 1];
    if constexpr (tr::exact) {
      if (lhs > rhs) return false;
    } else {
      if (tr::to_double(lhs - rhs) > tol * tr::to_double(lhs)) return false;
    }
  }
  return true;
}

namespace detail {

template <class T>
struct LllState {
  LatticeBasis<T>& b;
  IntMatrix& u;
  T half;

  // b_k <- b_k - round(mu_kl) b_l
  void reduce(std::size_t k, std::size_t l) {
    using tr = scalar_traits<T>;
    if (!(tr::abs(b.mu(k, l)) > half)) return;
    const auto r = round_half_up(b.mu(k, l));
    const Integer ri = tr::to_integer(r);
    const T rt = tr::from_digit(r, b.mu(k, l));
    for (std::size_t i = 0; i < b.cols[k].size(); ++i) b.cols[k][i] -= rt * b.cols[l][i];
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, k) -= ri * u(i, l);
    b.mu(k, l) -= rt;
    for (std::size_t i = 0; i < l; ++i) b.mu(k, i) -= rt * b.mu(l, i);
  }

  void swap(std::size_t k, std::size_t kmax) {
    std::swap(b.cols[k], b.cols[k - 1]);
    for (std::size_t i = 0; i < u.rows(); ++i) std::swap(u(i, k), u(i, k - 1));
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(b.mu(k, j), b.mu(k - 1, j));
    const T m = b.mu(k, k - 1);
    const T big = b.bstar_sq[k] + m * m * b.bstar_sq[k - 1];
    b.mu(k, k - 1) = m * b.bstar_sq[k - 1] / big;
    b.bstar_sq[k] = b.bstar_sq[k - 1] * b.bstar_sq[k] / big;
    b.bstar_sq[k - 1] = big;
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const T t = b.mu(i, k);
      b.mu(i, k) = b.mu(i, k - 1) - m * t;
      b.mu(i, k - 1) = t + b.mu(k, k - 1) * b.mu(i, k);
    }
  }
};

// Largest relative difference between maintained and recomputed Gram data.
template <class T>
double gram_drift(const LatticeBasis<T>& kept, const LatticeBasis<T>& fresh) {
  using tr = scalar_traits<T>;
  double worst = 0;
  for (std::size_t i = 0; i < kept.rank(); ++i) {
    const double f = tr::to_double(fresh.bstar_sq[i]);
    worst = std::max(worst, std::fabs(tr::to_double(kept.bstar_sq[i]) - f) / f);
    for (std::size_t k = 0; k < i; ++k)
      worst = std::max(worst, std::fabs(tr::to_double(kept.mu(i, k) - fresh.mu(i, k))));
  }
  return worst;
}

}  // namespace detail

/// LLL reduction in two interleaved phases: size reduction to make the
/// basis proper, and swaps of adjacent vectors whenever Lovász' condition
/// fails. Exact for T = Rational. In floating point the incremental
/// Gram–Schmidt data is compared to a fresh computation every 64 swaps and
/// replaced when it drifts by more than 1e-8; columns are rebuilt from the
/// integer transform at that point.
template <class T>
LllResult<T> lll_reduce(LatticeBasis<T> input, const LllParams<T>& p = {}) {
  using tr = scalar_traits<T>;
  detail::check_delta(p);
  const std::size_t n = input.rank();
  gram_schmidt(input);
  LllResult<T> res;
  res.transform = IntMatrix::identity(n);
  res.basis = input;
  if (n == 1) return res;

  LatticeBasis<T>& b = res.basis;
  const T delta = detail::lattice_const(b, p.delta);
  detail::LllState<T> st{b, res.transform, detail::lattice_const(b, Rational(1, 2))};

  auto rebuild = [&] {
    // columns = input columns * U, then fresh Gram–Schmidt
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t r = 0; r < b.ambient(); ++r) {
        T acc = detail::lattice_zero(b);
        for (std::size_t i = 0; i < n; ++i)
          if (res.transform(i, j) != 0) acc += tr::from_rational(Rational(res.transform(i, j)), tr::precision(acc)) * input.cols[i][r];
        b.cols[j][r] = acc;
      }
    }
    gram_schmidt(b);
  };

  for (int pass = 0; pass < 8; ++pass) {
    std::size_t k = 1;
    std::size_t since_check = 0;
    while (k < n) {
      st.reduce(k, k - 1);
      const T& m = b.mu(k, k - 1);
      if (b.bstar_sq[k] < (delta - m * m) * b.bstar_sq[k - 1]) {
        st.swap(k, n - 1);
        if (++res.swaps > p.max_swaps) throw BudgetError("lll_reduce: swap cap exceeded");
        if (!tr::exact && ++since_check >= 64) {
          since_check = 0;
          LatticeBasis<T> kept = b;
          rebuild();
          if (detail::gram_drift(kept, b) <= 1e-8) b = std::move(kept);
        }
        k = std::max<std::size_t>(1, k - 1);
        continue;
      }
      for (std::size_t l = k - 1; l-- > 0;) st.reduce(k, l);
      ++k;
    }
    if constexpr (tr::exact) {
      return res;
    } else {
      rebuild();
      if (is_lll_reduced(b, p)) return res;
    }
  }
  throw ConsistencyError("lll_reduce: floating-point reduction did not settle");
}

/// Shortest nonzero lattice vector by exhaustive Fincke–Pohst enumeration
/// of integer coefficient vectors, within squared radius `radius_sq` (by
/// default |b_0|^2). Coefficient ranges are widened by one in floating
/// point and every candidate is checked in the arithmetic of T.
template <class T>
struct ShortestVector {
  std::vector<long> coeffs;
  std::vector<T> vec;
  T norm_sq;
};

template <class T>
std::optional<ShortestVector<T>> brute_force_shortest(LatticeBasis<T> b, std::optional<T> radius_sq = std::nullopt,
                                                      std::size_t node_budget = 50'000'000) {
  using tr = scalar_traits<T>;
  const std::size_t n = b.rank();
  if (n > 6) throw DimensionError("brute_force_shortest: dimension too large for enumeration");
  gram_schmidt(b);
  T bound = radius_sq ? *radius_sq : detail::dot(b.cols[0], b.cols[0]);
  std::vector<long> x(n, 0), best;
  std::vector<T> partial(n + 1, detail::lattice_zero(b));
  std::size_t nodes = 0;

  // depth-first over levels n-1 .. 0
  auto center = [&](std::size_t i) {
    T c = detail::lattice_zero(b);
    for (std::size_t j = i + 1; j < n; ++j) c -= b.mu(j, i) * tr::from_rational(Rational(x[j]), tr::precision(c));
    return c;
  };
  auto recurse = [&](auto&& self, std::size_t level) -> void {
    const std::size_t i = level;
    const T c = center(i);
    const double room = tr::to_double(bound - partial[i + 1]);
    if (room < 0) return;
    const double w = std::sqrt(room / tr::to_double(b.bstar_sq[i]));
    const double cd = tr::to_double(c);
    const long lo = static_cast<long>(std::floor(cd - w)) - 1, hi = static_cast<long>(std::ceil(cd + w)) + 1;
    for (long v = lo; v <= hi; ++v) {
      if (++nodes > node_budget) throw BudgetError("brute_force_shortest: node budget exceeded");
      x[i] = v;
      const T diff = tr::from_rational(Rational(v), tr::precision(c)) - c;
      partial[i] = partial[i + 1] + diff * diff * b.bstar_sq[i];
      if (partial[i] > bound) continue;
      if (i > 0) {
        self(self, i - 1);
      } else {
        bool nonzero = std::any_of(x.begin(), x.end(), [](long e) { return e != 0; });
        if (nonzero && (best.empty() || partial[0] < bound)) {
          best = x;
          bound = partial[0];
        }
      }
    }
    x[i] = 0;
  };
  recurse(recurse, n - 1);
  if (best.empty()) return std::nullopt;

  ShortestVector<T> out;
  out.coeffs = best;
  out.vec.assign(b.ambient(), detail::lattice_zero(b));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < b.ambient(); ++r)
      out.vec[r] += tr::from_rational(Rational(best[j]), tr::precision(b.cols[j][r])) * b.cols[j][r];
  out.norm_sq = detail::dot(out.vec, out.vec);
  return out;
}

}  // namespace mdcf
