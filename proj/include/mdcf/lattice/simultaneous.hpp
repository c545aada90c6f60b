#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mdcf/cf/convergents.hpp"
#include "mdcf/core/parallel.hpp"
#include "mdcf/lattice/lll.hpp"

namespace mdcf {

/// Columns of M_t: e_1..e_d and (-alpha_1, ..., -alpha_d, t). det = t.
template <class T>
LatticeBasis<T> lambda_t_basis(std::span<const T> alpha, const T& t) {
  using tr = scalar_traits<T>;
  if (alpha.empty()) throw DimensionError("lambda_t_basis: empty vector");
  if (!(t > tr::one(t) - tr::one(t))) throw DomainError("lambda_t_basis: t must be positive");
  const std::size_t d = alpha.size();
  const T zero = t - t, one = tr::one(t);
  std::vector<std::vector<T>> cols(d + 1, std::vector<T>(d + 1, zero));
  for (std::size_t i = 0; i < d; ++i) {
    cols[i][i] = one;
    cols[d][i] = -alpha[i];
  }
  cols[d][d] = t;
  return LatticeBasis<T>(std::move(cols));
}

struct LatticeApproximation {
  double t = 0;
  ApproximationRecord record;
  /// 2^{d/4} t^{1/(d+1)}, the certified bound on |p_i - q alpha_i|.
  double certified_bound = 0;
  /// True when the returned vector is the first reduced vector, so both
  /// certified bounds apply (they are re-checked).
  bool certified = false;
};

namespace detail {

// x^k for a nonnegative exponent.
template <class T>
T power(T x, unsigned k) {
  T r = scalar_traits<T>::one(x);
  while (k--) r *= x;
  return r;
}

// v <= 2^{d/4} t^{1/(d+1)}  <=>  v^{4(d+1)} <= 2^{d(d+1)} t^4   (v >= 0)
template <class T>
bool within_vector_bound(const T& v, const T& t, unsigned d, double slack) {
  using tr = scalar_traits<T>;
  const T lhs = power(v, 4 * (d + 1));
  const T rhs = tr::from_rational(Rational(Integer(1) << (d * (d + 1))), tr::precision(t)) * power(t, 4);
  if constexpr (tr::exact) {
    (void)slack;
    return !(lhs > rhs);
  } else {
    return tr::to_double(lhs) <= tr::to_double(rhs) * (1 + slack);
  }
}

// q <= 2^{d/4} t^{-d/(d+1)}  <=>  q^{4(d+1)} t^{4d} <= 2^{d(d+1)}
template <class T>
bool within_denominator_bound(const Integer& q, const T& t, unsigned d, double slack) {
  using tr = scalar_traits<T>;
  const T qt = tr::from_rational(Rational(q), tr::precision(t));
  const T lhs = power(qt, 4 * (d + 1)) * power(t, 4 * d);
  const T rhs = tr::from_rational(Rational(Integer(1) << (d * (d + 1))), tr::precision(t));
  if constexpr (tr::exact) {
    (void)slack;
    return !(lhs > rhs);
  } else {
    return tr::to_double(lhs) <= tr::to_double(rhs) * (1 + slack);
  }
}

}  // namespace detail

/// Simultaneous approximation from an LLL-reduced basis of Lambda_t. A
/// reduced vector b = U_j applied to M_t gives b = (p - q alpha, q t) with
/// p = U[0..d-1][j] and q = U[d][j]. The first reduced vector with q != 0
/// is used, signed so q > 0. The bound
/// |b_1| <= 2^{d/4} t^{1/(d+1)} is asserted; when b_1 is the chosen vector
/// the bounds on |p_i - q alpha_i| and on q are re-checked as well.
template <class T>
LatticeApproximation simultaneous_approx(std::span<const T> alpha, const T& t, const LllParams<T>& params = {},
                                         Norm norm = Norm::Sup) {
  using tr = scalar_traits<T>;
  const unsigned d = static_cast<unsigned>(alpha.size());
  if (!(t > t - t) || !(t < tr::one(t))) throw DomainError("simultaneous_approx: t must lie in (0, 1)");
  for (const auto& a : alpha)
    if (a < t - t || a > tr::one(t)) throw DomainError("simultaneous_approx: alpha must lie in [0, 1]^d");

  auto red = lll_reduce(lambda_t_basis(alpha, t), params);
  const auto& b = red.basis;
  const double slack = tr::exact ? 0.0 : 1e-9;

  const T b1 = detail::dot(b.cols[0], b.cols[0]);
  // |b_1|^2 <= 2^{d/2} t^{2/(d+1)}, i.e. the vector bound for |b_1|^2 with
  // exponents doubled: (|b_1|^2)^{2(d+1)} <= 2^{d(d+1)} t^4
  {
    const T lhs = detail::power(b1, 2 * (d + 1));
    const T rhs = tr::from_rational(Rational(Integer(1) << (d * (d + 1))), tr::precision(t)) * detail::power(t, 4);
    const bool ok = tr::exact ? !(lhs > rhs) : tr::to_double(lhs) <= tr::to_double(rhs) * (1 + slack);
    if (!ok) throw ConsistencyError("simultaneous_approx: first reduced vector exceeds 2^{d/4} t^{1/(d+1)}");
  }

  std::optional<std::size_t> pick;
  for (std::size_t j = 0; j <= d && !pick; ++j)
    if (red.transform(d, j) != 0) pick = j;
  if (!pick) throw DomainError("simultaneous_approx: no reduced vector has q != 0");

  const std::size_t j = *pick;
  const int sign = red.transform(d, j) > 0 ? 1 : -1;
  Integer q = sign * red.transform(d, j);
  std::vector<Integer> p(d);
  for (unsigned i = 0; i < d; ++i) p[i] = sign * red.transform(i, j);

  LatticeApproximation out;
  out.t = tr::to_double(t);
  out.certified_bound = std::pow(2.0, d / 4.0) * std::pow(tr::to_double(t), 1.0 / (d + 1));
  out.certified = j == 0;
  if (out.certified) {
    for (unsigned i = 0; i < d; ++i) {
      T dev = tr::from_rational(Rational(p[i]), tr::precision(t)) -
              tr::from_rational(Rational(q), tr::precision(t)) * alpha[i];
      if (!detail::within_vector_bound(tr::abs(dev), t, d, slack))
        throw ConsistencyError("simultaneous_approx: |p_i - q alpha_i| exceeds the certified bound");
    }
    if (!detail::within_denominator_bound(q, t, d, slack))
      throw ConsistencyError("simultaneous_approx: q exceeds the certified bound");
  }
  out.record = make_record(alpha, std::move(p), std::move(q), norm);
  return out;
}

/// Geometric schedule t_k = t0 * ratio^k for k < steps; each point is an
/// independent reduction. Records are sorted by q and deduplicated.
template <class T>
std::vector<LatticeApproximation> iterated_approx(std::span<const T> alpha, const T& t0, const T& ratio,
                                                  std::size_t steps, const LllParams<T>& params = {},
                                                  unsigned threads = 1, Norm norm = Norm::Sup) {
  using tr = scalar_traits<T>;
  if (steps < 1) throw PreconditionError("iterated_approx: steps must be at least 1");
  if (!(ratio > ratio - ratio) || !(ratio < tr::one(ratio))) throw DomainError("iterated_approx: ratio must lie in (0, 1)");
  std::vector<T> ts;
  T t = t0;
  for (std::size_t k = 0; k < steps; ++k) {
    ts.push_back(t);
    t = t * ratio;
  }
  std::vector<LatticeApproximation> all(steps);
  parallel_for(steps, threads, [&](std::size_t k) { all[k] = simultaneous_approx<T>(alpha, ts[k], params, norm); });
  std::stable_sort(all.begin(), all.end(),
                   [](const LatticeApproximation& a, const LatticeApproximation& b) { return a.record.q < b.record.q; });
  std::vector<LatticeApproximation> out;
  for (auto& a : all)
    if (out.empty() || out.back().record.q != a.record.q) out.push_back(std::move(a));
  return out;
}

}  // namespace mdcf
