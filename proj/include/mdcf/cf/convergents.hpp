#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "mdcf/cf/orbit.hpp"
#include "mdcf/core/norm.hpp"

namespace mdcf {

/// Which row of the product holds the convergent denominators.
enum class DenominatorRow { Last, First };

/// Running product A_1 A_2 ... A_n of partial-quotient matrices. With the
/// denominator row last, column j is the convergent vector (p_1..p_d, q).
struct ConvergentProduct {
  AlgorithmId algorithm;
  IntMatrix product;
  std::size_t n = 0;
  DenominatorRow denominator_row = DenominatorRow::Last;

  static ConvergentProduct start(const AlgorithmId& alg) {
    return {alg, IntMatrix::identity(static_cast<std::size_t>(alg.dim) + 1), 0, DenominatorRow::Last};
  }

  [[nodiscard]] std::size_t dim() const { return product.rows() - 1; }

  [[nodiscard]] const Integer& denominator(std::size_t j) const {
    return product(denominator_row == DenominatorRow::Last ? dim() : 0, j);
  }

  [[nodiscard]] std::vector<Integer> numerators(std::size_t j) const {
    std::vector<Integer> p;
    const std::size_t off = denominator_row == DenominatorRow::Last ? 0 : 1;
    for (std::size_t i = 0; i < dim(); ++i) p.push_back(product(i + off, j));
    return p;
  }
};

/// product <- product * a, skipping zero entries of a.
template <class D>
void accumulate(ConvergentProduct& c, const Matrix<D>& a) {
  if (a.rows() != c.product.cols() || !a.square()) throw DimensionError("accumulate: matrix size mismatch");
  const std::size_t rows = c.product.rows(), n = a.cols();
  IntMatrix out(rows, n);
  Integer entry;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(k, j) == 0) continue;
      entry = Integer(a(k, j));
      for (std::size_t i = 0; i < rows; ++i)
        mpz_addmul(out(i, j).get_mpz_t(), c.product(i, k).get_mpz_t(), entry.get_mpz_t());
    }
  }
  c.product = std::move(out);
  ++c.n;
}

template <class T>
void accumulate(ConvergentProduct& c, const CfStep<T>& s) {
  accumulate(c, s.matrix);
}

struct ApproximationRecord {
  Integer q;
  std::vector<Integer> p;
  /// max_i |alpha_i - p_i/q|
  double error = 0;
  /// |||q alpha|||: distance from q alpha to the nearest integer vector.
  double dist = 0;
  /// dist * q^(1/d)
  double dirichlet_ratio = 0;
  /// -log(error) / log(q); NaN for q = 1.
  double exponent = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::size_t bit_size(const Integer& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); }

template <class T>
long working_precision(std::span<const T> alpha, std::size_t bits) {
  long prec = std::max<long>(kDefaultPrecisionBits, 2 * static_cast<long>(bits) + 128);
  if constexpr (std::is_same_v<T, Real>)
    for (const auto& a : alpha) prec = std::max(prec, a.precision());
  return prec;
}

inline Real combine(const std::vector<Real>& v, Norm norm, long prec) {
  Real acc(prec);
  for (const auto& x : v) {
    if (norm == Norm::Sup) {
      Real ax = abs(x);
      if (ax > acc) acc = ax;
    } else {
      acc += x * x;
    }
  }
  return norm == Norm::Sup ? acc : sqrt(acc);
}

}  // namespace detail

/// Quality measures of the approximation p/q to alpha, evaluated with enough
/// binary precision that q alpha keeps well over 64 fractional bits.
template <class T>
ApproximationRecord make_record(std::span<const T> alpha, std::vector<Integer> p, Integer q, Norm norm = Norm::Sup) {
  if (q <= 0) throw PreconditionError("make_record: denominator must be positive");
  if (p.size() != alpha.size()) throw DimensionError("make_record: dimension mismatch");
  std::size_t bits = detail::bit_size(q);
  for (const auto& v : p) bits = std::max(bits, detail::bit_size(v));
  const long prec = detail::working_precision(alpha, bits);
  const std::size_t d = alpha.size();

  Real qr(q, prec);
  std::vector<Real> err, frac;
  for (std::size_t i = 0; i < d; ++i) {
    Real a = to_real(alpha[i], prec);
    err.push_back(a - Real(p[i], prec) / qr);
    Real qa = a * qr;
    frac.push_back(qa - round_half_up(qa));
  }
  Real e = detail::combine(err, Norm::Sup, prec);
  Real dist = detail::combine(frac, norm, prec);

  ApproximationRecord r;
  r.error = e.to_double();
  r.dist = dist.to_double();
  r.dirichlet_ratio = dist.is_zero() ? 0.0 : std::exp(log(dist).to_double() + log_abs(q) / static_cast<double>(d));
  if (q > 1)
    r.exponent = e.is_zero() ? std::numeric_limits<double>::infinity() : -log(e).to_double() / log_abs(q);
  r.q = std::move(q);
  r.p = std::move(p);
  return r;
}

/// One record per column of the product. Columns with a negative denominator
/// are negated (they give the same approximation); zero-denominator columns
/// are skipped and counted in `skipped`.
template <class T>
std::vector<ApproximationRecord> extract_approximations(const ConvergentProduct& c, std::span<const T> alpha,
                                                        Norm norm = Norm::Sup, std::size_t* skipped = nullptr) {
  if (c.dim() != alpha.size()) throw DimensionError("extract_approximations: dimension mismatch");
  std::vector<ApproximationRecord> out;
  std::size_t zero = 0;
  for (std::size_t j = 0; j < c.product.cols(); ++j) {
    Integer q = c.denominator(j);
    if (q == 0) {
      ++zero;
      continue;
    }
    auto p = c.numerators(j);
    if (q < 0) {
      q = -q;
      for (auto& v : p) v = -v;
    }
    out.push_back(make_record(alpha, std::move(p), std::move(q), norm));
  }
  if (skipped) *skipped = zero;
  return out;
}

struct ConvergenceMetrics {
  /// Largest angle between a column and the line R(alpha, 1).
  double weak = 0;
  /// Largest Euclidean distance from a column to that line.
  double strong = 0;
  /// log(strong_n / strong_{n-1}) when the previous metrics are supplied.
  double rate = std::numeric_limits<double>::quiet_NaN();
};

template <class T>
ConvergenceMetrics convergence_metrics(const ConvergentProduct& c, std::span<const T> alpha,
                                       const ConvergenceMetrics* previous = nullptr) {
  const std::size_t d = c.dim();
  if (d != alpha.size()) throw DimensionError("convergence_metrics: dimension mismatch");
  std::size_t bits = 0;
  for (std::size_t i = 0; i <= d; ++i)
    for (std::size_t j = 0; j <= d; ++j) bits = std::max(bits, detail::bit_size(c.product(i, j)));
  const long prec = detail::working_precision(alpha, bits);

  // unit vector along (alpha, 1) in the row layout of the product
  std::vector<Real> u;
  const bool last = c.denominator_row == DenominatorRow::Last;
  if (!last) u.emplace_back(1L, prec);
  for (const auto& a : alpha) u.push_back(to_real(a, prec));
  if (last) u.emplace_back(1L, prec);
  Real un = detail::combine(u, Norm::Euclid, prec);
  for (auto& v : u) v /= un;

  ConvergenceMetrics m;
  for (std::size_t j = 0; j <= d; ++j) {
    std::vector<Real> v;
    for (std::size_t i = 0; i <= d; ++i) v.emplace_back(c.product(i, j), prec);
    Real dot(prec);
    for (std::size_t i = 0; i <= d; ++i) dot += v[i] * u[i];
    if (dot.is_zero() && detail::combine(v, Norm::Sup, prec).is_zero()) continue;
    for (std::size_t i = 0; i <= d; ++i) v[i] -= dot * u[i];
    const double w = detail::combine(v, Norm::Euclid, prec).to_double();
    m.weak = std::max(m.weak, std::atan2(w, std::fabs(dot.to_double())));
    m.strong = std::max(m.strong, w);
  }
  if (previous && previous->strong > 0 && m.strong > 0) m.rate = std::log(m.strong / previous->strong);
  return m;
}

/// One row per step: the best column (largest exponent sample) of the
/// running product together with the convergence metrics.
struct ConvergentRow {
  std::size_t n = 0;
  ApproximationRecord best;
  ConvergenceMetrics metrics;
};

template <class T>
std::vector<ConvergentRow> convergent_series(const AlgorithmId& alg, std::span<const T> x, std::size_t n,
                                             Norm norm = Norm::Sup) {
  auto orbit = expand<T>(alg, x, n);
  auto c = ConvergentProduct::start(alg);
  std::vector<ConvergentRow> rows;
  for (const auto& s : orbit.steps) {
    accumulate(c, s);
    auto recs = extract_approximations(c, x, norm);
    if (recs.empty()) continue;
    auto better = [](const ApproximationRecord& a, const ApproximationRecord& b) {
      const bool an = std::isnan(a.exponent), bn = std::isnan(b.exponent);
      if (an != bn) return bn;
      if (!an && a.exponent != b.exponent) return a.exponent > b.exponent;
      return a.error < b.error;
    };
    ConvergentRow row;
    row.n = c.n;
    row.best = *std::min_element(recs.begin(), recs.end(), better);
    row.metrics = convergence_metrics(c, x, rows.empty() ? nullptr : &rows.back().metrics);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// limsup estimator: largest finite exponent sample over the final 20% of
/// the rows.
inline double exponent_estimate(std::span<const ConvergentRow> rows) {
  double best = std::numeric_limits<double>::quiet_NaN();
  const std::size_t from = rows.size() - rows.size() / 5 - (rows.size() % 5 ? 1 : 0);
  for (std::size_t k = std::min(from, rows.size()); k < rows.size(); ++k) {
    double e = rows[k].best.exponent;
    if (std::isfinite(e) && !(e <= best)) best = e;
  }
  return best;
}

/// True when the window contains at least two disjoint blocks of
/// consecutive steps whose products are strictly positive. Each such block
/// contracts the positive cone, so the columns converge weakly to one ray.
template <class T>
bool furstenberg_certificate(std::span<const CfStep<T>> steps) {
  for (const auto& s : steps)
    for (std::size_t i = 0; i < s.matrix.rows(); ++i)
      for (std::size_t j = 0; j < s.matrix.cols(); ++j)
        if (s.matrix(i, j) < 0) throw PreconditionError("furstenberg_certificate: negative matrix entry");

  auto positive = [](const IntMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) <= 0) return false;
    return true;
  };
  // shortest positive block starting at each index, then greedy selection
  // of disjoint blocks by earliest end
  const std::size_t none = steps.size();
  std::vector<std::size_t> end(steps.size(), none);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    ConvergentProduct c{AlgorithmId{}, IntMatrix::identity(steps[i].matrix.rows()), 0, DenominatorRow::Last};
    for (std::size_t e = i; e < steps.size(); ++e) {
      accumulate(c, steps[e].matrix);
      if (positive(c.product)) {
        end[i] = e;
        break;
      }
    }
  }
  int blocks = 0;
  std::size_t from = 0;
  while (from < steps.size()) {
    std::size_t best = none;
    for (std::size_t i = from; i < steps.size(); ++i) best = std::min(best, end[i]);
    if (best == none) break;
    ++blocks;
    from = best + 1;
  }
  return blocks >= 2;
}

/// Exhaustive scan of q = 1..Q^d for the approximation that satisfies
/// Dirichlet's inequality max_i |q alpha_i - p_i| < 1/Q and minimizes
/// |||q alpha||| in the chosen norm (smallest q on ties).
template <class T>
ApproximationRecord dirichlet_oracle(std::span<const T> alpha, long Q, Norm norm = Norm::Sup,
                                     double scan_budget = 1e8) {
  using tr = scalar_traits<T>;
  if (Q < 1) throw PreconditionError("dirichlet_oracle: Q must be at least 1");
  if (alpha.empty()) throw DimensionError("dirichlet_oracle: empty vector");
  const std::size_t d = alpha.size();
  const double total = std::pow(static_cast<double>(Q), static_cast<double>(d));
  if (total > scan_budget) throw BudgetError("dirichlet_oracle: Q^d exceeds the scan budget");
  const long qmax = static_cast<long>(std::llround(total));

  const long prec = tr::precision(alpha[0]);
  const T big_q = tr::from_rational(Rational(Q), prec);
  std::optional<long> best_q;
  std::vector<Integer> best_p;
  T best_val = tr::one(alpha[0]);
  std::vector<Integer> p(d);
  for (long q = 1; q <= qmax; ++q) {
    T sup = tr::one(alpha[0]) - tr::one(alpha[0]);
    T sq = sup;
    for (std::size_t i = 0; i < d; ++i) {
      T qa = alpha[i] * tr::from_rational(Rational(q), prec);
      auto n = round_half_up(qa);
      T f = tr::abs(qa - tr::from_digit(n, qa));
      p[i] = tr::to_integer(n);
      if (f > sup) sup = f;
      sq += f * f;
    }
    if (!(sup * big_q < tr::one(alpha[0]))) continue;
    const T& val = norm == Norm::Sup ? sup : sq;
    if (!best_q || val < best_val) {
      best_q = q;
      best_p = p;
      best_val = val;
    }
  }
  if (!best_q) throw ConsistencyError("dirichlet_oracle: no q satisfies the Dirichlet bound");
  return make_record(alpha, best_p, Integer(*best_q), norm);
}

}  // namespace mdcf
