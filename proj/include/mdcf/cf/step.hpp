#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mdcf/cf/algorithm.hpp"
#include "mdcf/core/error.hpp"
#include "mdcf/core/matrix.hpp"
#include "mdcf/core/scalar.hpp"

namespace mdcf {

/// One application of a continued-fraction map T at a point x of dimension d:
/// the digit vector, the partial-quotient matrix A of size d+1, the
/// renormalizer theta and the next point T(x), related by the cocycle
/// identity [x;1] = theta * A * [T(x);1].
template <class T>
struct CfStep {
  std::vector<digit_t<T>> digits;
  Matrix<digit_t<T>> matrix;
  T theta;
  std::vector<T> next;

  /// Partial-quotient matrix with arbitrary-precision entries.
  [[nodiscard]] IntMatrix int_matrix() const {
    IntMatrix m(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (std::size_t j = 0; j < matrix.cols(); ++j) m(i, j) = scalar_traits<T>::to_integer(matrix(i, j));
    return m;
  }
};

namespace detail {

template <class T>
T reciprocal(const T& x) {
  return scalar_traits<T>::one(x) / x;
}

template <class T>
void reset_step(CfStep<T>& out, std::size_t d, const T& like) {
  out.matrix.assign_zero(d + 1, d + 1);
  out.next.resize(d, like);
}

// Jacobi–Perron and its nearest-integer variant; d = 1 gives the Gauss map
// and the nearest-integer Gauss map.
//   T(x) = (x_2/x_1 - b_2, ..., x_d/x_1 - b_d, 1/x_1 - a)
//   x_1 = theta,  x_i = theta * (b_i + T(x)_{i-1}),  1 = theta * (a + T(x)_d)
template <class T>
bool jacobi_perron_like(std::span<const T> x, bool nearest, bool a_first, CfStep<T>& out) {
  using tr = scalar_traits<T>;
  const std::size_t d = x.size();
  const T& x1 = x[0];
  if (x1 == 0) return false;
  auto digit = [nearest](const T& y) { return nearest ? round_half_up(y) : tr::floor_digit(y); };

  reset_step(out, d, x1);
  out.digits.resize(d);
  T inv = reciprocal(x1);
  digit_t<T> a = digit(inv);
  auto& m = out.matrix;
  m(0, d) = 1;
  for (std::size_t i = 1; i < d; ++i) {
    T r = x[i] / x1;
    digit_t<T> b = digit(r);
    out.next[i - 1] = r - tr::from_digit(b, r);
    m(i, i - 1) = 1;
    m(i, d) = b;
    out.digits[a_first ? i : i - 1] = b;
  }
  out.next[d - 1] = inv - tr::from_digit(a, inv);
  m(d, d - 1) = 1;
  m(d, d) = a;
  out.digits[a_first ? 0 : d - 1] = a;
  out.theta = x1;
  return true;
}

template <class T>
bool farey_like(const T& x, CfStep<T>& out) {
  using tr = scalar_traits<T>;
  reset_step(out, 1, x);
  out.digits.resize(1);
  T one = tr::one(x);
  auto& m = out.matrix;
  if (x + x <= one) {
    // x = y / (1 + y),  theta = 1 - x
    T rest = one - x;
    out.next[0] = x / rest;
    out.theta = rest;
    out.digits[0] = 0;
    m(0, 0) = 1;
    m(1, 0) = 1;
    m(1, 1) = 1;
  } else {
    // x = 1 / (1 + y),  theta = x
    out.next[0] = (one - x) / x;
    out.theta = x;
    out.digits[0] = 1;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 1;
  }
  return true;
}

/// Inverse of the subtraction matrix S (u' = S u) for a descending-sorted
/// homogeneous vector of length n, so that u = S^{-1} u'.
inline Matrix<long> subtraction_inverse(AlgorithmKind rule, std::size_t n) {
  Matrix<long> s = Matrix<long>::identity(n);
  switch (rule) {
    case AlgorithmKind::Brun:  // u0 <- u0 - u1
      s(0, 1) = 1;
      break;
    case AlgorithmKind::Selmer:  // u0 <- u0 - u_last
      s(0, n - 1) = 1;
      break;
    case AlgorithmKind::Poincare:  // u_i <- u_i - u_{i+1} for i < last
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) s(i, j) = 1;
      break;
    case AlgorithmKind::FullySubtractive:  // u_i <- u_i - u_last for i < last
      for (std::size_t i = 0; i + 1 < n; ++i) s(i, n - 1) = 1;
      break;
    default:
      throw DomainError("not a sorted subtractive rule");
  }
  return s;
}

template <class T>
std::vector<std::size_t> descending_order(const std::vector<T>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[j] < v[i]; });
  return idx;
}

}  // namespace detail

/// One subtraction pass of a sorted rule on a descending-sorted homogeneous
/// vector, before re-sorting. Brun: largest minus second largest. Selmer:
/// largest minus smallest. Poincaré: each entry minus its successor.
/// Fully subtractive: smallest subtracted from every larger entry.
template <class T>
std::vector<T> subtract_sorted(AlgorithmKind rule, std::span<const T> u) {
  const std::size_t n = u.size();
  if (n < 2) throw DimensionError("subtract_sorted needs at least two entries");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (u[i] < u[i + 1]) throw DomainError("subtract_sorted: vector is not sorted descending");
  std::vector<T> w(u.begin(), u.end());
  switch (rule) {
    case AlgorithmKind::Brun:
      w[0] = u[0] - u[1];
      break;
    case AlgorithmKind::Selmer:
      w[0] = u[0] - u[n - 1];
      break;
    case AlgorithmKind::Poincare:
      for (std::size_t i = 0; i + 1 < n; ++i) w[i] = u[i] - u[i + 1];
      break;
    case AlgorithmKind::FullySubtractive:
      for (std::size_t i = 0; i + 1 < n; ++i) w[i] = u[i] - u[n - 1];
      break;
    default:
      throw DomainError("not a sorted subtractive rule");
  }
  return w;
}

namespace detail {

// Sorted subtractive maps act on the homogeneous vector Y = (x_1..x_d, 1).
// Y is sorted descending (u = Y o pi), one subtraction pass gives u', which
// is re-sorted (w = u' o sigma) and projectivized by its largest entry
// theta = w_0. In the [x;1] layout the largest entry goes last:
// W = (w_1..w_d, w_0) = theta * [T(x);1], and Y = A W with
// A[pi_k][pos(m)] = S^{-1}[k][sigma_m], pos(0) = d, pos(m) = m - 1.
// Digits record sigma.
template <class T>
bool sorted_subtractive(AlgorithmKind rule, std::span<const T> x, CfStep<T>& out) {
  using tr = scalar_traits<T>;
  const std::size_t d = x.size();
  const std::size_t n = d + 1;
  std::vector<T> y(x.begin(), x.end());
  y.push_back(tr::one(x[0]));
  for (const auto& v : y)
    if (v == 0) return false;
  auto pi = descending_order(y);
  std::vector<T> u;
  u.reserve(n);
  for (auto k : pi) u.push_back(y[k]);
  std::vector<T> up = subtract_sorted<T>(rule, u);
  auto sigma = descending_order(up);
  Matrix<long> sinv = subtraction_inverse(rule, n);

  reset_step(out, d, x[0]);
  out.digits.resize(n);
  out.theta = up[sigma[0]];
  for (std::size_t m = 1; m < n; ++m) out.next[m - 1] = up[sigma[m]] / out.theta;
  auto pos = [d](std::size_t m) { return m == 0 ? d : m - 1; };
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m) out.matrix(pi[k], pos(m)) = sinv(k, sigma[m]);
  for (std::size_t m = 0; m < n; ++m) out.digits[m] = static_cast<long>(sigma[m]);
  return true;
}

}  // namespace detail

/// Throws DomainError unless x lies in the closed domain of the map.
template <class T>
void validate_domain(const AlgorithmId& alg, std::span<const T> x) {
  if (x.size() != static_cast<std::size_t>(alg.dim))
    throw DimensionError(to_string(alg) + ": expected a vector of dimension " + std::to_string(alg.dim));
  const Rational half(1, 2);
  auto inside = [&](const T& v, int lo2, int hi2) {  // lo2/2 <= v <= hi2/2
    T twice = v + v;
    return !(twice < static_cast<long>(lo2)) && !(twice > static_cast<long>(hi2));
  };
  bool ok = true;
  for (const auto& v : x) {
    switch (alg.kind) {
      case AlgorithmKind::NearestIntegerGauss:
      case AlgorithmKind::NearestIntegerJacobiPerron:
        ok = ok && inside(v, -1, 1);
        break;
      default:
        ok = ok && inside(v, 0, 2);
        break;
    }
  }
  if (!ok) throw DomainError(to_string(alg) + ": point outside the domain");
}

/// Applies one step of `alg` at x into `out`, reusing its storage. Returns
/// false when the map is undefined at x because a coordinate that would be
/// inverted is zero (a rational dependence was reached). Does not validate
/// the domain.
template <class T>
bool apply_step(const AlgorithmId& alg, std::span<const T> x, CfStep<T>& out) {
  switch (alg.kind) {
    case AlgorithmKind::Gauss:
    case AlgorithmKind::JacobiPerron:
      return detail::jacobi_perron_like(x, false, false, out);
    case AlgorithmKind::NearestIntegerGauss:
    case AlgorithmKind::NearestIntegerJacobiPerron:
      return detail::jacobi_perron_like(x, true, true, out);
    case AlgorithmKind::Farey:
      return detail::farey_like(x[0], out);
    case AlgorithmKind::Brun:
    case AlgorithmKind::Selmer:
    case AlgorithmKind::Poincare:
    case AlgorithmKind::FullySubtractive:
      return detail::sorted_subtractive(alg.kind, x, out);
  }
  return false;
}

/// Validated single step; std::nullopt signals a halt.
template <class T>
std::optional<CfStep<T>> step(const AlgorithmId& alg, std::span<const T> x) {
  validate_domain(alg, x);
  CfStep<T> s;
  if (!apply_step(alg, x, s)) return std::nullopt;
  return s;
}

/// Gauss map x -> 1/x - floor(1/x) on (0,1]; digit a >= 1, theta = x.
template <class T>
std::optional<CfStep<T>> gauss_step(const T& x) {
  std::vector<T> v{x};
  return step<T>({AlgorithmKind::Gauss, 1}, v);
}

/// x -> 1/x - floor(1/x + 1/2) on [-1/2, 1/2]; digit n with |n| >= 2.
template <class T>
std::optional<CfStep<T>> nearest_integer_gauss_step(const T& x) {
  std::vector<T> v{x};
  return step<T>({AlgorithmKind::NearestIntegerGauss, 1}, v);
}

/// Farey map: x/(1-x) on [0,1/2] (digit 0), (1-x)/x on [1/2,1] (digit 1).
template <class T>
std::optional<CfStep<T>> farey_step(const T& x) {
  std::vector<T> v{x};
  return step<T>({AlgorithmKind::Farey, 1}, v);
}

/// Jacobi–Perron on [0,1]^d; digits (b_2, ..., b_d, a).
template <class T>
std::optional<CfStep<T>> jacobi_perron_step(std::span<const T> x) {
  return step<T>({AlgorithmKind::JacobiPerron, static_cast<int>(x.size())}, x);
}

/// Nearest-integer Jacobi–Perron on [-1/2,1/2]^d; digits (a, b_2, ..., b_d).
template <class T>
std::optional<CfStep<T>> nijp_step(std::span<const T> x) {
  return step<T>({AlgorithmKind::NearestIntegerJacobiPerron, static_cast<int>(x.size())}, x);
}

/// Brun, Selmer, Poincaré or fully subtractive step on x in (0,1]^d, viewed
/// as the homogeneous vector (x, 1).
template <class T>
std::optional<CfStep<T>> sorted_subtractive_step(std::span<const T> x, AlgorithmKind rule) {
  if (!is_sorted_subtractive(rule)) throw DomainError("not a sorted subtractive rule");
  return step<T>({rule, static_cast<int>(x.size())}, x);
}

/// Sup-norm residual of the cocycle identity [x;1] - theta * A * [T(x);1],
/// evaluated in the arithmetic of T.
template <class T>
double cocycle_residual(std::span<const T> x, const CfStep<T>& s) {
  using tr = scalar_traits<T>;
  const std::size_t n = x.size() + 1;
  std::vector<T> tx(s.next.begin(), s.next.end());
  tx.push_back(tr::one(x[0]));
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    T acc = tr::from_digit(s.matrix(i, n - 1), x[0]) * tx[n - 1];
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (s.matrix(i, j) == 0) continue;
      acc += tr::from_digit(s.matrix(i, j), x[0]) * tx[j];
    }
    T lhs = i + 1 < n ? x[i] : tr::one(x[0]);
    T diff = lhs - s.theta * acc;
    worst = std::max(worst, tr::to_double(tr::abs(diff)));
  }
  return worst;
}

}  // namespace mdcf
