#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mdcf/cf/step.hpp"
#include "mdcf/core/parallel.hpp"
#include "mdcf/core/random.hpp"

namespace mdcf {

struct LyapunovOptions {
  std::size_t n = 1'000'000;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  /// Renormalize the frame every k steps (and sooner if entries exceed 1e150).
  std::size_t reorth_every = 10;
  std::size_t burn_in = 1000;
  /// 0: orbit in hardware doubles; otherwise orbit in Real with this many bits.
  long precision = 0;
  /// 0: all cores.
  unsigned threads = 0;
  /// Attempts per trial before giving up when orbits keep halting.
  std::size_t max_attempts = 1000;
  /// Cap on total steps (trials * (burn_in + n)); 0 means no cap.
  double step_budget = 0;
};

/// Counts of log max|A_ij| over all accumulated steps, in bins of width 1/2
/// starting at 0, so heavy tails of the cocycle are visible.
struct LogNormHistogram {
  static constexpr double kBinWidth = 0.5;
  static constexpr std::size_t kBins = 100;
  std::array<std::uint64_t, kBins> counts{};
  std::uint64_t overflow = 0;
  double max = 0;

  void add(double log_norm) {
    max = std::max(max, log_norm);
    auto b = static_cast<std::size_t>(std::max(0.0, log_norm) / kBinWidth);
    if (b < kBins)
      ++counts[b];
    else
      ++overflow;
  }
  void merge(const LogNormHistogram& o) {
    for (std::size_t i = 0; i < kBins; ++i) counts[i] += o.counts[i];
    overflow += o.overflow;
    max = std::max(max, o.max);
  }
};

struct LyapunovTrial {
  double lambda1 = 0;
  double lambda2 = 0;
  std::size_t attempts = 1;
  LogNormHistogram log_norms;
};

struct LyapunovEstimate {
  AlgorithmId algorithm;
  double lambda1 = 0;
  double lambda2 = 0;
  double stderr1 = 0;
  double stderr2 = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Orbits that halted at a rational point and were resampled.
  std::size_t discarded = 0;
  double eta_star = std::numeric_limits<double>::quiet_NaN();
  LogNormHistogram log_norms;
};

/// Running mean and variance (Welford), mergeable.
struct Welford {
  std::size_t count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++count;
    double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / n;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }
  [[nodiscard]] double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  [[nodiscard]] double standard_error() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

/// Uniform random point of the domain of `alg` for (seed, trial, attempt).
inline std::vector<double> trial_start(const AlgorithmId& alg, std::uint64_t seed, std::size_t trial,
                                       std::size_t attempt) {
  Rng rng(derive_seed(seed, trial, attempt));
  const bool centered =
      alg.kind == AlgorithmKind::NearestIntegerGauss || alg.kind == AlgorithmKind::NearestIntegerJacobiPerron;
  std::vector<double> x(static_cast<std::size_t>(alg.dim));
  for (auto& v : x) v = centered ? rng.uniform() - 0.5 : rng.uniform_open_closed();
  return x;
}

namespace detail {

// A 2-frame (f1, f2) pushed through transposed partial-quotient matrices,
// kept as its first vector v = f1 and its bivector w = f1 ^ f2. The volume
// |w| is updated through the second compound matrix, whose entries are
// 2x2 minors of the integer digit matrix, so the volume never has to be
// recovered from the nearly parallel columns by Gram–Schmidt.
struct Frame {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> v, w, vt, wt, minors;
  double sum1 = 0, sum12 = 0;

  explicit Frame(std::size_t dim) : n(dim), v(dim), vt(dim) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    w.assign(pairs.size(), 0.0);
    wt.assign(pairs.size(), 0.0);
    minors.assign(pairs.size() * pairs.size(), 0.0);
    // fixed generic starting frame
    std::vector<double> f2(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 1.0 + 0.1 * static_cast<double>(i);
      f2[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + 0.37 * static_cast<double>(i * i));
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [i, j] = pairs[p];
      w[p] = v[i] * f2[j] - v[j] * f2[i];
    }
    renormalize(false);
  }

  static double norm(const std::vector<double>& x) {
    double s = 0;
    for (double e : x) s += e * e;
    return std::sqrt(s);
  }

  // Rescales v and w to unit length; adds the logs of the removed factors
  // (r11 and r11 * r22 of the frame's QR factorization) when `record`.
  void renormalize(bool record) {
    const double r1 = norm(v), r12 = norm(w);
    for (double& e : v) e /= r1;
    for (double& e : w) e /= r12;
    if (record) {
      sum1 += std::log(r1);
      sum12 += std::log(r12);
    }
  }

  // v <- M v and w <- C2(M) w for M = A^T; returns the largest entry.
  template <class D>
  double apply_transpose(const Matrix<D>& a) {
    double big = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (a(k, i) != 0) acc += to_double_entry(a(k, i)) * v[k];
      vt[i] = acc;
      big = std::max(big, std::fabs(acc));
    }
    v.swap(vt);
    // C2(M)_{(ij),(kl)} = M_ik M_jl - M_il M_jk with M_xy = a(y, x)
    const std::size_t m = pairs.size();
    for (std::size_t p = 0; p < m; ++p) {
      auto [i, j] = pairs[p];
      double acc = 0;
      for (std::size_t q = 0; q < m; ++q) {
        if (w[q] == 0) continue;
        auto [k, l] = pairs[q];
        double minor = 0;
        if (a(k, i) != 0 && a(l, j) != 0) minor += to_double_entry(a(k, i)) * to_double_entry(a(l, j));
        if (a(l, i) != 0 && a(k, j) != 0) minor -= to_double_entry(a(l, i)) * to_double_entry(a(k, j));
        if (minor != 0) acc += minor * w[q];
      }
      wt[p] = acc;
      big = std::max(big, std::fabs(acc));
    }
    w.swap(wt);
    return big;
  }

  static double to_double_entry(double e) { return e; }
  static double to_double_entry(const Integer& e) { return e.get_d(); }
};

template <class D>
double log_max_entry(const Matrix<D>& m) {
  double big = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) big = std::max(big, std::fabs(Frame::to_double_entry(m(i, j))));
  return std::log(big);
}

// Runs burn-in plus n accumulated steps; nullopt if the orbit halts.
template <class T>
std::optional<LyapunovTrial> run_trial(const AlgorithmId& alg, std::vector<T> cur, const LyapunovOptions& opt) {
  CfStep<T> s;
  for (std::size_t k = 0; k < opt.burn_in; ++k) {
    if (!apply_step<T>(alg, cur, s)) return std::nullopt;
    cur.swap(s.next);
  }
  Frame frame(static_cast<std::size_t>(alg.dim) + 1);
  LyapunovTrial out;
  const std::size_t every = std::max<std::size_t>(1, opt.reorth_every);
  std::size_t since = 0;
  for (std::size_t k = 0; k < opt.n; ++k) {
    if (!apply_step<T>(alg, cur, s)) return std::nullopt;
    cur.swap(s.next);
    out.log_norms.add(log_max_entry(s.matrix));
    const double big = frame.apply_transpose(s.matrix);
    if (++since >= every || big > 1e150) {
      frame.renormalize(true);
      since = 0;
    }
  }
  if (since > 0) frame.renormalize(true);
  out.lambda1 = frame.sum1 / static_cast<double>(opt.n);
  out.lambda2 = (frame.sum12 - frame.sum1) / static_cast<double>(opt.n);
  return out;
}

}  // namespace detail

/// One trial from an explicit starting point, orbit in doubles or in Real
/// according to opt.precision. nullopt if the orbit halts.
inline std::optional<LyapunovTrial> lyapunov_trial(const AlgorithmId& alg, const std::vector<double>& x0,
                                                   const LyapunovOptions& opt) {
  if (opt.precision == 0) return detail::run_trial<double>(alg, x0, opt);
  std::vector<Real> x;
  for (double v : x0) x.emplace_back(v, opt.precision);
  return detail::run_trial<Real>(alg, std::move(x), opt);
}

/// Uniform approximation exponent 1 - lambda2/lambda1 with its propagated
/// standard error.
struct EtaStar {
  double value = 0;
  double error = 0;
};

/// Throws DomainError unless lambda1 > 0.
inline EtaStar eta_star(double lambda1, double lambda2, double stderr1 = 0, double stderr2 = 0) {
  if (!(lambda1 > 0)) throw DomainError("eta_star: lambda1 must be positive");
  EtaStar e;
  e.value = 1.0 - lambda2 / lambda1;
  const double d1 = lambda2 / (lambda1 * lambda1), d2 = 1.0 / lambda1;
  e.error = std::sqrt(d1 * d1 * stderr1 * stderr1 + d2 * d2 * stderr2 * stderr2);
  return e;
}

inline EtaStar eta_star(const LyapunovEstimate& est) {
  return eta_star(est.lambda1, est.lambda2, est.stderr1, est.stderr2);
}

/// Monte Carlo estimate of the two top Lyapunov exponents of the cocycle of
/// `alg`: a 2-frame is pushed through the transposed partial-quotient
/// matrices and renormalized every k steps; lambda1 comes from the first
/// vector and lambda1 + lambda2 from the frame volume. Trials are independent (seeded from
/// (seed, trial, attempt)); halted orbits are resampled. The result is
/// bit-identical for any thread count.
inline LyapunovEstimate estimate_lyapunov(const AlgorithmId& alg, const LyapunovOptions& opt) {
  if (opt.n == 0 || opt.trials == 0) throw PreconditionError("estimate_lyapunov: n and trials must be positive");
  if (opt.precision != 0 && opt.precision < kMinPrecisionBits)
    throw DomainError("estimate_lyapunov: precision must be 0 or at least 53 bits");
  const double total = static_cast<double>(opt.trials) * static_cast<double>(opt.n + opt.burn_in);
  if (opt.step_budget > 0 && total > opt.step_budget)
    throw BudgetError("estimate_lyapunov: trials * (n + burn-in) exceeds the step budget");

  std::vector<LyapunovTrial> results(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
      auto r = lyapunov_trial(alg, trial_start(alg, opt.seed, t, attempt), opt);
      if (r) {
        r->attempts = attempt + 1;
        results[t] = std::move(*r);
        return;
      }
    }
    throw ConsistencyError("estimate_lyapunov: every resampled orbit halted");
  });

  Welford w1, w2;
  LyapunovEstimate est;
  for (const auto& r : results) {
    w1.add(r.lambda1);
    w2.add(r.lambda2);
    est.discarded += r.attempts - 1;
    est.log_norms.merge(r.log_norms);
  }
  est.algorithm = alg;
  est.lambda1 = w1.mean;
  est.lambda2 = w2.mean;
  est.stderr1 = w1.standard_error();
  est.stderr2 = w2.standard_error();
  est.n = opt.n;
  est.trials = opt.trials;
  est.seed = opt.seed;
  if (est.lambda1 > 0) est.eta_star = eta_star(est).value;
  return est;
}

}  // namespace mdcf
