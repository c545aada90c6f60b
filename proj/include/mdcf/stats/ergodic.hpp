#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "mdcf/cf/exact_gauss.hpp"
#include "mdcf/cf/step.hpp"
#include "mdcf/core/matrix.hpp"
#include "mdcf/core/norm.hpp"
#include "mdcf/core/parallel.hpp"
#include "mdcf/core/random.hpp"
#include "mdcf/stats/lyapunov.hpp"

namespace mdcf {

// Limits of the Gauss-map ergodic averages.

/// Asymptotic frequency of the digit j: log2((1+j)^2 / (j(j+2))).
inline double gauss_kuzmin_frequency(std::uint64_t j) {
  if (j < 1) throw DomainError("digit frequency: j must be at least 1");
  const double x = static_cast<double>(j);
  return (2 * std::log1p(x) - std::log(x) - std::log(x + 2)) / std::numbers::ln2;
}

/// pi^2 / (12 log 2)
inline double levy_constant() { return std::numbers::pi * std::numbers::pi / (12 * std::numbers::ln2); }

/// Limit distribution of the approximation coefficients.
inline double doeblin_lenstra_cdf(double z) {
  if (!(z >= 0 && z <= 1)) throw DomainError("doeblin_lenstra_cdf: z must lie in [0, 1]");
  if (z <= 0.5) return z / std::numbers::ln2;
  return (1 - z + std::log(2 * z)) / std::numbers::ln2;
}

/// 6 log 2 log 10 / pi^2
inline double lochs_constant() { return 6 * std::numbers::ln2 * std::numbers::ln10 / (std::numbers::pi * std::numbers::pi); }

/// Gauss measure density 1 / ((1 + x) log 2).
inline double gauss_density(double x) { return 1 / ((1 + x) * std::numbers::ln2); }

/// Theta_k = q_k^2 |x - p_k/q_k| from t = T^k x and s = q_{k-1}/q_k.
inline double approximation_coefficient(double t, double s) { return t / (1 + t * s); }

struct ThetaSequence {
  std::vector<Integer> digits;
  /// theta[k] = Theta_k for k = 0..n, Theta_0 = x.
  std::vector<double> theta;
};

/// Digits and approximation coefficients of the first n steps of x in (0, 1).
inline ThetaSequence theta_sequence(const Rational& x, std::size_t n) {
  if (!(x > 0 && x < 1)) throw DomainError("theta_sequence: x must lie in (0, 1)");
  ThetaSequence out;
  out.theta.push_back(x.get_d());
  ExactGaussExpansion ex(x.get_num(), x.get_den());
  ex.run(n, [&](const GaussDigit& g) {
    out.digits.push_back(*g.a);
    out.theta.push_back(approximation_coefficient(g.t, g.s));
  });
  return out;
}

/// Uniform m / 2^bits with 0 < m < 2^bits.
inline Rational random_dyadic(Rng& rng, std::size_t bits) {
  Integer m;
  do {
    m = 0;
    for (std::size_t done = 0; done < bits; done += 64) {
      const std::size_t take = std::min<std::size_t>(64, bits - done);
      std::uint64_t w = rng.next();
      if (take < 64) w >>= 64 - take;
      mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), take);
      mpz_add_ui(m.get_mpz_t(), m.get_mpz_t(), w);
    }
  } while (m == 0);
  Rational r(m, Integer(1) << bits);
  r.canonicalize();
  return r;
}

struct GaussEnsembleOptions {
  std::size_t n = 100'000;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Digits 1..max_digit are counted individually.
  std::uint64_t max_digit = 100;
  /// Points z of the empirical Theta distribution function.
  std::vector<double> z_grid = [] {
    std::vector<double> z;
    for (int i = 1; i <= 20; ++i) z.push_back(i / 20.0);
    return z;
  }();
  std::size_t density_bins = 100;
  /// 0 disables the (Theta_{k-1}, Theta_k) histogram.
  std::size_t jager_bins = 0;
  /// Start bits beyond 3.5 n; the first n digits of m/2^P are those of every
  /// real within 2^-P once q_n^2 < 2^P, i.e. roughly P > 3.42 n.
  std::size_t extra_bits = 64;
};

struct GaussTrial {
  std::size_t n = 0;
  /// counts[j] for digits j = 1..max_digit; counts[0] collects larger digits.
  std::vector<std::uint64_t> digit_counts;
  double levy = 0;
  std::vector<std::uint64_t> theta_below;
  double max_theta = 0;
  std::uint64_t borel_checks = 0;
  std::uint64_t borel_violations = 0;
  std::uint64_t tong_violations = 0;
  /// Checks within 1e-12 relative of the threshold, left undecided in double.
  std::uint64_t undecided = 0;
  std::vector<std::uint64_t> density;
  std::vector<std::uint64_t> jager;
};

/// Borel: min(Theta_{n-1}, Theta_n, Theta_{n+1}) < c and Tong: max(...) > c,
/// c = 1/sqrt(a_{n+1}^2 + 4). Adds the outcome to the trial counters.
inline void borel_tong_update(GaussTrial& tr, double th0, double th1, double th2, double a_next) {
  const double c = 1 / std::sqrt(a_next * a_next + 4);
  const double lo = std::min({th0, th1, th2}), hi = std::max({th0, th1, th2});
  constexpr double eps = 1e-12;
  ++tr.borel_checks;
  if (std::fabs(lo - c) <= eps * c || std::fabs(hi - c) <= eps * c) {
    ++tr.undecided;
    return;
  }
  if (!(lo < c)) ++tr.borel_violations;
  if (!(hi > c)) ++tr.tong_violations;
}

/// Statistics of the first n digits of x = num/den (n must be reachable).
/// Returns nullopt when the expansion terminates before n digits.
inline std::optional<GaussTrial> gauss_trial(const Rational& x, const GaussEnsembleOptions& opt) {
  GaussTrial tr;
  tr.n = opt.n;
  tr.digit_counts.assign(opt.max_digit + 1, 0);
  tr.theta_below.assign(opt.z_grid.size(), 0);
  tr.density.assign(opt.density_bins, 0);
  if (opt.jager_bins) tr.jager.assign(opt.jager_bins * opt.jager_bins, 0);

  ExactGaussExpansion ex(x.get_num(), x.get_den());
  // Theta_0 = x
  double th_prev2 = 0, th_prev = x.get_d();
  const Integer big(opt.max_digit);
  auto bin = [](double v, std::size_t bins) {
    return std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, v) * static_cast<double>(bins)));
  };
  const std::size_t made = ex.run(opt.n, [&](const GaussDigit& g) {
    const Integer& a = *g.a;
    if (a <= big) {
      ++tr.digit_counts[a.get_ui()];
    } else {
      ++tr.digit_counts[0];
    }
    const double th = approximation_coefficient(g.t, g.s);
    tr.max_theta = std::max(tr.max_theta, th);
    for (std::size_t i = 0; i < opt.z_grid.size(); ++i)
      if (th <= opt.z_grid[i]) ++tr.theta_below[i];
    if (g.k >= 2) borel_tong_update(tr, th_prev2, th_prev, th, a.get_d());
    if (opt.density_bins) ++tr.density[bin(g.t, opt.density_bins)];
    if (opt.jager_bins) ++tr.jager[bin(th_prev, opt.jager_bins) * opt.jager_bins + bin(th, opt.jager_bins)];
    th_prev2 = th_prev;
    th_prev = th;
  });
  if (made < opt.n) return std::nullopt;
  tr.levy = log_abs(ex.q()) / static_cast<double>(opt.n);
  return tr;
}

struct GaussEnsemble {
  GaussEnsembleOptions options;
  std::size_t bits = 0;
  std::size_t resampled = 0;
  std::vector<GaussTrial> trials;
  /// Across-trial statistics.
  std::vector<Welford> digit_frequency;  // index j, 0 = digits above max_digit
  Welford levy;
  std::vector<Welford> theta_cdf;
  std::uint64_t borel_checks = 0, borel_violations = 0, tong_violations = 0, undecided = 0;
  double max_theta = 0;
  std::vector<std::uint64_t> density;
  std::vector<std::uint64_t> jager;
};

/// Exact Gauss-map ensemble from uniform dyadic starts m/2^P.
inline GaussEnsemble gauss_ensemble(const GaussEnsembleOptions& opt) {
  if (opt.n < 3) throw PreconditionError("gauss_ensemble: n must be at least 3");
  if (opt.trials < 1) throw PreconditionError("gauss_ensemble: trials must be at least 1");
  if (opt.max_digit < 1) throw PreconditionError("gauss_ensemble: max_digit must be at least 1");
  for (double z : opt.z_grid)
    if (!(z >= 0 && z <= 1)) throw DomainError("gauss_ensemble: z must lie in [0, 1]");
  GaussEnsemble ens;
  ens.options = opt;
  ens.bits = static_cast<std::size_t>(std::ceil(3.5 * static_cast<double>(opt.n))) + opt.extra_bits;
  ens.trials.resize(opt.trials);
  std::vector<std::size_t> attempts(opt.trials, 0);
  const unsigned threads = opt.threads ? opt.threads : default_threads();
  parallel_for(opt.trials, threads, [&](std::size_t t) {
    for (std::size_t attempt = 0; attempt < 100; ++attempt) {
      Rng rng(derive_seed(opt.seed, t, attempt));
      auto r = gauss_trial(random_dyadic(rng, ens.bits), opt);
      if (r) {
        ens.trials[t] = std::move(*r);
        attempts[t] = attempt;
        return;
      }
    }
    throw ConsistencyError("gauss_ensemble: every resampled start terminated early");
  });

  const double n = static_cast<double>(opt.n);
  ens.digit_frequency.resize(opt.max_digit + 1);
  ens.theta_cdf.resize(opt.z_grid.size());
  ens.density.assign(opt.density_bins, 0);
  ens.jager.assign(opt.jager_bins * opt.jager_bins, 0);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto& tr = ens.trials[t];
    ens.resampled += attempts[t];
    for (std::size_t j = 0; j <= opt.max_digit; ++j) ens.digit_frequency[j].add(static_cast<double>(tr.digit_counts[j]) / n);
    ens.levy.add(tr.levy);
    for (std::size_t i = 0; i < opt.z_grid.size(); ++i) ens.theta_cdf[i].add(static_cast<double>(tr.theta_below[i]) / n);
    ens.borel_checks += tr.borel_checks;
    ens.borel_violations += tr.borel_violations;
    ens.tong_violations += tr.tong_violations;
    ens.undecided += tr.undecided;
    ens.max_theta = std::max(ens.max_theta, tr.max_theta);
    for (std::size_t i = 0; i < ens.density.size(); ++i) ens.density[i] += tr.density[i];
    for (std::size_t i = 0; i < ens.jager.size(); ++i) ens.jager[i] += tr.jager[i];
  }
  return ens;
}

/// Borel/Tong violations along the first n digits of a single x in (0, 1).
inline GaussTrial borel_tong_check(const Rational& x, std::size_t n) {
  if (n < 3) throw PreconditionError("borel_tong_check: orbit length must be at least 3");
  GaussEnsembleOptions o;
  o.n = n;
  o.max_digit = 1;
  o.z_grid.clear();
  o.density_bins = 0;
  GaussTrial tr;
  tr.n = 0;
  ExactGaussExpansion ex(x.get_num(), x.get_den());
  double th_prev2 = 0, th_prev = x.get_d();
  tr.n = ex.run(n, [&](const GaussDigit& g) {
    const double th = approximation_coefficient(g.t, g.s);
    if (g.k >= 2) borel_tong_update(tr, th_prev2, th_prev, th, g.a->get_d());
    th_prev2 = th_prev;
    th_prev = th;
  });
  return tr;
}

// Lochs

/// Number of leading continued-fraction digits shared by every point of
/// [lo, hi], 0 < lo < hi < 1: Euclid on both ends in lockstep, stopping
/// before either end terminates.
inline std::size_t common_cf_prefix(const Rational& lo, const Rational& hi) {
  Integer u1 = lo.get_den(), v1 = lo.get_num(), u2 = hi.get_den(), v2 = hi.get_num();
  Integer a1, a2, r1, r2;
  std::size_t m = 0;
  while (v1 != 0 && v2 != 0) {
    mpz_fdiv_qr(a1.get_mpz_t(), r1.get_mpz_t(), u1.get_mpz_t(), v1.get_mpz_t());
    mpz_fdiv_qr(a2.get_mpz_t(), r2.get_mpz_t(), u2.get_mpz_t(), v2.get_mpz_t());
    if (a1 != a2 || r1 == 0 || r2 == 0) break;
    ++m;
    std::swap(u1, v1);
    std::swap(v1, r1);
    std::swap(u2, v2);
    std::swap(v2, r2);
  }
  return m;
}

/// m_n / n, where m_n counts the continued-fraction digits of x fixed by its
/// first n decimal digits, i.e. shared by [0.d1..dn, 0.d1..dn + 10^-n].
inline double lochs_ratio(const Rational& x, std::size_t n) {
  if (n < 1) throw PreconditionError("lochs_ratio: n must be at least 1");
  if (!(x > 0 && x < 1)) throw DomainError("lochs_ratio: x must lie in (0, 1)");
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, n);
  Integer d;
  mpz_fdiv_q(d.get_mpz_t(), Integer(x.get_num() * ten).get_mpz_t(), x.get_den().get_mpz_t());
  if (d == 0 || d + 1 == ten) return 0.0;
  Rational lo(d, ten), hi(d + 1, ten);
  lo.canonicalize();
  hi.canonicalize();
  return static_cast<double>(common_cf_prefix(lo, hi)) / static_cast<double>(n);
}

inline double lochs_ratio(const Real& x, std::size_t n) {
  if (x.precision() < static_cast<long>(4 * n)) throw PreconditionError("lochs_ratio: x needs at least 4n bits");
  return lochs_ratio(x.to_rational(), n);
}

/// Ensemble mean of m_n / n over uniform dyadic starts with 4n + 64 bits.
inline Welford lochs_ensemble(std::size_t n, std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  std::vector<double> r(trials);
  parallel_for(trials, threads ? threads : default_threads(), [&](std::size_t t) {
    Rng rng(derive_seed(seed, t, 0x10c5));
    r[t] = lochs_ratio(random_dyadic(rng, 4 * n + 64), n);
  });
  Welford w;
  for (double v : r) w.add(v);
  return w;
}

// Best approximations

struct BestApproximation {
  Integer q;
  std::vector<Integer> p;
  double dist = 0;
};

struct BestApproxList {
  Norm norm = Norm::Sup;
  std::vector<BestApproximation> records;
};

/// Strict record minima of |||q alpha||| over q = 1..Q, by exhaustive scan.
/// Throws BudgetError when Q * d exceeds the budget.
template <class T>
BestApproxList best_approximations(std::span<const T> alpha, std::uint64_t Q, Norm norm = Norm::Sup,
                                   std::uint64_t budget = 1'000'000'000) {
  using tr = scalar_traits<T>;
  if (alpha.empty()) throw DimensionError("best_approximations: empty vector");
  if (Q < 1) throw PreconditionError("best_approximations: Q must be at least 1");
  if (Q > budget / alpha.size()) throw BudgetError("best_approximations: scan exceeds budget");
  const std::size_t d = alpha.size();
  BestApproxList out;
  out.norm = norm;
  std::optional<T> best;
  std::vector<T> qa(alpha.begin(), alpha.end());
  std::vector<Integer> p(d);
  for (std::uint64_t q = 1; q <= Q; ++q) {
    if (q > 1)
      for (std::size_t i = 0; i < d; ++i) qa[i] += alpha[i];
    T dist = alpha[0] - alpha[0];
    for (std::size_t i = 0; i < d; ++i) {
      const auto n = round_half_up(qa[i]);
      p[i] = tr::to_integer(n);
      T e = tr::abs(qa[i] - tr::from_digit(n, qa[i]));
      if (norm == Norm::Sup) {
        if (e > dist) dist = e;
      } else {
        dist += e * e;
      }
    }
    if (!best || dist < *best) {
      best = dist;
      BestApproximation b{Integer(static_cast<unsigned long>(q)), p, tr::to_double(dist)};
      if (norm == Norm::Euclid) b.dist = std::sqrt(b.dist);
      out.records.push_back(std::move(b));
      if (dist == alpha[0] - alpha[0]) break;
    }
  }
  return out;
}

/// Determinants of the (d+1)x(d+1) matrices whose columns are d+1
/// consecutive best-approximation vectors (p_1, ..., p_d, q).
inline std::vector<Integer> best_approx_determinants(const BestApproxList& list, std::size_t d) {
  if (list.records.size() < d + 1) throw PreconditionError("best_approx_determinants: list too short");
  std::vector<Integer> out;
  for (std::size_t n = 0; n + d < list.records.size(); ++n) {
    IntMatrix m(d + 1, d + 1);
    for (std::size_t j = 0; j <= d; ++j) {
      const auto& r = list.records[n + j];
      for (std::size_t i = 0; i < d; ++i) m(i, j) = r.p[i];
      m(d, j) = r.q;
    }
    out.push_back(determinant(m));
  }
  return out;
}

// Invariant densities

struct DensityHistogram {
  AlgorithmId algorithm;
  std::size_t bins = 0;
  /// Axes: the first min(d, 2) coordinates, each on [lo, hi].
  std::size_t axes = 1;
  double lo = 0, hi = 1;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  [[nodiscard]] double bin_width() const { return (hi - lo) / static_cast<double>(bins); }
  /// Normalized density in a cell (per unit length or area).
  [[nodiscard]] double density(std::size_t idx) const {
    const double cell = std::pow(bin_width(), static_cast<double>(axes));
    return total ? static_cast<double>(counts[idx]) / (static_cast<double>(total) * cell) : 0.0;
  }
  void add(std::span<const double> x) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes; ++a) {
      const double u = (x[a] - lo) / (hi - lo);
      const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, u) * static_cast<double>(bins)));
      idx = idx * bins + b;
    }
    ++counts[idx];
    ++total;
  }
};

inline DensityHistogram make_histogram(const AlgorithmId& alg, std::size_t bins) {
  if (bins < 1) throw PreconditionError("histogram: bins must be positive");
  DensityHistogram h;
  h.algorithm = alg;
  h.bins = bins;
  h.axes = std::min(alg.dim, 2);
  const bool centered =
      alg.kind == AlgorithmKind::NearestIntegerGauss || alg.kind == AlgorithmKind::NearestIntegerJacobiPerron;
  h.lo = centered ? -0.5 : 0.0;
  h.hi = centered ? 0.5 : 1.0;
  h.counts.assign(h.axes == 1 ? bins : bins * bins, 0);
  return h;
}

/// Histogram of explicitly given points, e.g. a constant orbit.
inline DensityHistogram occupancy(const AlgorithmId& alg, std::size_t bins, const std::vector<std::vector<double>>& points) {
  DensityHistogram h = make_histogram(alg, bins);
  for (const auto& x : points) {
    if (x.size() < h.axes) throw DimensionError("occupancy: point has too few coordinates");
    h.add(x);
  }
  return h;
}

struct DensityOptions {
  std::size_t n = 100'000;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t burn_in = 1000;
  unsigned threads = 0;
};

/// Orbit-occupancy histogram of double orbits from random starts, with
/// halted orbits resampled. Deterministic for a given seed.
inline DensityHistogram empirical_density(const AlgorithmId& alg, std::size_t bins, const DensityOptions& opt) {
  if (bins < 10) throw PreconditionError("empirical_density: bins must be at least 10");
  if (opt.n < 1 || opt.trials < 1) throw PreconditionError("empirical_density: empty ensemble");
  std::vector<DensityHistogram> part(opt.trials, make_histogram(alg, bins));
  parallel_for(opt.trials, opt.threads ? opt.threads : default_threads(), [&](std::size_t t) {
    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
      DensityHistogram h = make_histogram(alg, bins);
      std::vector<double> x = trial_start(alg, derive_seed(opt.seed, 0xde5), t, attempt);
      CfStep<double> s;
      bool ok = true;
      for (std::size_t k = 0; k < opt.burn_in + opt.n && ok; ++k) {
        ok = apply_step<double>(alg, x, s);
        if (!ok) break;
        x = s.next;
        if (k >= opt.burn_in) h.add(x);
      }
      if (ok) {
        part[t] = std::move(h);
        return;
      }
    }
    throw ConsistencyError("empirical_density: every resampled orbit halted");
  });
  DensityHistogram out = make_histogram(alg, bins);
  for (const auto& h : part) {
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += h.counts[i];
    out.total += h.total;
  }
  return out;
}

}  // namespace mdcf
