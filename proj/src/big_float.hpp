#pragma once

// Minimal RAII handle over an MPFR number. Precision is carried per value, so
// concurrent callers never share precision state.

#include <mpfr.h>

#include <cmath>
#include <utility>

namespace krein::detail {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t precision, double value = 0.0) {
    mpfr_init2(v_, precision);
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
  BigFloat& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }

  void set(double x) { mpfr_set_d(v_, x, MPFR_RNDN); }
  void set(const BigFloat& o) { mpfr_set(v_, o.v_, MPFR_RNDN); }
  /// this = a * b
  void set_product(const BigFloat& a, const BigFloat& b) { mpfr_mul(v_, a.v_, b.v_, MPFR_RNDN); }
  void add_product(const BigFloat& a, const BigFloat& b, BigFloat& scratch) {
    mpfr_mul(scratch.v_, a.v_, b.v_, MPFR_RNDN);
    mpfr_add(v_, v_, scratch.v_, MPFR_RNDN);
  }

  void set_factorial(unsigned long n) { mpfr_fac_ui(v_, n, MPFR_RNDN); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

inline BigFloat ratio(const BigFloat& num, const BigFloat& den) {
  BigFloat out(num);
  out /= den;
  return out;
}

/// Working precision for an n-fold product sum whose terms of total size
/// abs_sum^n cancel down to |signed_sum|^n, plus headroom for rounding over
/// `terms` additions.
inline mpfr_prec_t cancellation_precision(double abs_sum, double signed_sum, int n, double terms) {
  double extra = 0.0;
  if (signed_sum != 0.0 && abs_sum > 0.0) extra = n * std::log2(abs_sum / std::abs(signed_sum));
  extra += std::log2(std::max(terms, 1.0));
  return static_cast<mpfr_prec_t>(128 + std::ceil(std::max(extra, 0.0)));
}

}  // namespace krein::detail
