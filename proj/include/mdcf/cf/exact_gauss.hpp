#pragma once

#include <cmath>
#include <cstddef>

#include "mdcf/core/error.hpp"
#include "mdcf/core/real.hpp"

namespace mdcf {

/// One digit of an exact regular continued-fraction expansion.
struct GaussDigit {
  std::size_t k = 0;          // 1-based index
  const Integer* a = nullptr;  // a_k
  double t = 0;                // T^k x
  double s = 0;                // q_{k-1} / q_k
};

/// Regular continued fraction of a rational x = num/den in (0, 1), digit by
/// digit, with the denominators q_k kept exactly. Long expansions of huge
/// rationals are read in batches (Lehmer): Euclid runs on both ends of the
/// interval enclosing the leading bits of the remainder pair and digits are
/// accepted while both ends agree, then the accumulated 2x2 transforms are
/// applied to the full remainders and to (q_{k-1}, q_k). The remainders are
/// checked to stay in 0 <= cur < prev after every batch.
class ExactGaussExpansion {
 public:
  static constexpr std::size_t kWindowBits = 4096;

  ExactGaussExpansion(const Integer& num, const Integer& den) : prev_(den), cur_(num) {
    if (!(num > 0 && num < den)) throw DomainError("ExactGaussExpansion: x must lie in (0, 1)");
  }

  /// Produces up to n further digits, calling visit(const GaussDigit&) for
  /// each; returns the number produced (fewer when x terminates).
  template <class F>
  std::size_t run(std::size_t n, F&& visit) {
    std::size_t made = 0;
    while (made < n && cur_ != 0) {
      std::size_t got = 0;
      if (mpz_sizeinbase(prev_.get_mpz_t(), 2) > 2 * kWindowBits) got = batch(n - made, visit);
      if (got == 0) got = exact_step(visit);
      made += got;
    }
    return made;
  }

  [[nodiscard]] std::size_t index() const { return k_; }
  [[nodiscard]] bool terminated() const { return cur_ == 0; }
  [[nodiscard]] const Integer& q() const { return q_; }
  [[nodiscard]] const Integer& q_prev() const { return q_prev_; }
  /// Remainder pair with T^k x = cur / prev.
  [[nodiscard]] const Integer& remainder() const { return cur_; }
  [[nodiscard]] const Integer& remainder_prev() const { return prev_; }

 private:
  static double ratio(const Integer& num, const Integer& den) {
    if (num == 0) return 0.0;
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
    const double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
    return std::ldexp(mn / md, static_cast<int>(en - ed));
  }

  template <class F>
  void emit(const Integer& a, double t, F& visit) {
    s_ = 1.0 / (a.get_d() + s_);
    ++k_;
    visit(GaussDigit{k_, &a, t, s_});
  }

  template <class F>
  std::size_t exact_step(F& visit) {
    mpz_fdiv_qr(a_.get_mpz_t(), rem_.get_mpz_t(), prev_.get_mpz_t(), cur_.get_mpz_t());
    std::swap(prev_, cur_);
    std::swap(cur_, rem_);
    mpz_addmul(q_prev_.get_mpz_t(), a_.get_mpz_t(), q_.get_mpz_t());
    std::swap(q_prev_, q_);
    emit(a_, ratio(cur_, prev_), visit);
    return 1;
  }

  template <class F>
  std::size_t batch(std::size_t limit, F& visit) {
    const std::size_t shift = mpz_sizeinbase(prev_.get_mpz_t(), 2) - kWindowBits;
    // prev/cur lies in (A/(B+1), (A+1)/B)
    mpz_fdiv_q_2exp(ulo_.get_mpz_t(), prev_.get_mpz_t(), shift);
    mpz_fdiv_q_2exp(vhi_.get_mpz_t(), cur_.get_mpz_t(), shift);
    if (vhi_ == 0) return 0;
    uhi_ = ulo_ + 1;
    vlo_ = vhi_ + 1;
    u00_ = 1, u01_ = 0, u10_ = 0, u11_ = 1;
    w00_ = 1, w01_ = 0, w10_ = 0, w11_ = 1;
    std::size_t got = 0;
    while (got < limit) {
      mpz_fdiv_qr(a_.get_mpz_t(), rlo_.get_mpz_t(), ulo_.get_mpz_t(), vlo_.get_mpz_t());
      mpz_fdiv_qr(ahi_.get_mpz_t(), rhi_.get_mpz_t(), uhi_.get_mpz_t(), vhi_.get_mpz_t());
      if (a_ != ahi_ || rlo_ == 0 || rhi_ == 0) break;
      // T^k x lies between the two ends; both must round to the same double
      const double tlo = ratio(rlo_, vlo_), thi = ratio(rhi_, vhi_);
      if (std::fabs(tlo - thi) > 0x1.0p-60 * std::fabs(tlo)) break;
      std::swap(ulo_, vlo_);
      std::swap(vlo_, rlo_);
      std::swap(uhi_, vhi_);
      std::swap(vhi_, rhi_);
      // U <- [[0,1],[1,-a]] U and W <- [[0,1],[1,a]] W
      u00_ -= a_ * u10_;
      std::swap(u00_, u10_);
      u01_ -= a_ * u11_;
      std::swap(u01_, u11_);
      w00_ += a_ * w10_;
      std::swap(w00_, w10_);
      w01_ += a_ * w11_;
      std::swap(w01_, w11_);
      emit(a_, 0.5 * (tlo + thi), visit);
      ++got;
    }
    if (got == 0) return 0;
    // (prev, cur) <- U (prev, cur);  (q_prev, q) <- W (q_prev, q)
    rlo_ = u00_ * prev_ + u01_ * cur_;
    rhi_ = u10_ * prev_ + u11_ * cur_;
    std::swap(prev_, rlo_);
    std::swap(cur_, rhi_);
    rlo_ = w00_ * q_prev_ + w01_ * q_;
    rhi_ = w10_ * q_prev_ + w11_ * q_;
    std::swap(q_prev_, rlo_);
    std::swap(q_, rhi_);
    if (!(cur_ > 0 && cur_ < prev_)) throw ConsistencyError("ExactGaussExpansion: batch left an invalid remainder pair");
    return got;
  }

  Integer prev_, cur_;
  Integer q_prev_ = 0, q_ = 1;
  double s_ = 0;
  std::size_t k_ = 0;
  // scratch
  Integer a_, ahi_, rem_, ulo_, vlo_, uhi_, vhi_, rlo_, rhi_;
  Integer u00_, u01_, u10_, u11_, w00_, w01_, w10_, w11_;
};

}  // namespace mdcf
