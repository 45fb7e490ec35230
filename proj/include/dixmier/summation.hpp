#pragma once

// Compensated accumulation and Euler-Maclaurin power sums.
//
// power_sum(q, a, b) returns sum_{n=a}^{b} n^{-q} (b may be +infinity when
// q > 1) together with a rigorous bound on the truncation error.  For
// f(x) = x^{-q} every derivative f^{(j)} has constant sign, so the
// Euler-Maclaurin remainder after K Bernoulli corrections is bounded by
//
//     |R_K| <= |B_2K| / (2K)! * |f^{(2K-1)}(b) - f^{(2K-1)}(a)|,
//
// i.e. by the magnitude of the last correction term that was added.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dixmier/errors.hpp"

namespace dixmier {

/// Neumaier-compensated running sum.
template <typename Real>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(Real initial) : sum_(initial) {}

  constexpr void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(Real x) {
    add(x);
    return *this;
  }

  [[nodiscard]] constexpr Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

/// A sum together with an absolute error bound.
struct BoundedSum {
  long double value = 0;
  long double error = 0;

  BoundedSum& operator+=(const BoundedSum& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

inline BoundedSum operator*(long double c, BoundedSum s) {
  return {c * s.value, std::abs(c) * s.error};
}

namespace detail {

// B_2, B_4, ..., B_16
inline constexpr std::array<long double, 8> kBernoulliEven = {
    1.0L / 6.0L,       -1.0L / 30.0L, 1.0L / 42.0L,  -1.0L / 30.0L,
    5.0L / 66.0L,      -691.0L / 2730.0L, 7.0L / 6.0L, -3617.0L / 510.0L};

inline constexpr long double kInf = std::numeric_limits<long double>::infinity();

// x^{-q} computed through logs so that astronomically large x underflows
// cleanly instead of overflowing an intermediate.
inline long double inv_pow(long double x, long double q) {
  return std::exp(-q * std::log(x));
}

// \int_a^b x^{-q} dx, accurate for q near 1.
inline long double power_integral(long double q, long double a, long double b) {
  const long double t = 1.0L - q;
  const long double la = std::log(a);
  if (std::isinf(b)) {
    if (q <= 1.0L) {
      throw DomainError("divergent tail: exponent must exceed 1");
    }
    return std::exp(t * la) / (q - 1.0L);
  }
  const long double lr = std::log(b) - la;
  if (t == 0.0L) return lr;
  return std::exp(t * la) * std::expm1(t * lr) / t;
}

}  // namespace detail

/// sum_{n=a}^{b} n^{-q} for integer-valued a >= 1; b may be +inf (q > 1).
inline BoundedSum power_sum(long double q, long double a, long double b) {
  using detail::inv_pow;
  if (!(a >= 1.0L)) throw DomainError("power_sum: start index must be >= 1");
  if (b < a) return {};
  constexpr long double kShift = 24.0L;
  constexpr int kTerms = 7;

  CompensatedSum<long double> direct;
  long double n = a;
  // Short ranges and the stiff start of the series are summed term by term.
  // Past 2^62 unit steps are no longer exact, and Euler-Maclaurin is
  // accurate there anyway.
  if (a < 0x1p62L) {
    const long double direct_end = (b - a < 64.0L) ? b : std::max(a, kShift) - 1.0L;
    for (; n <= direct_end; n += 1.0L) direct.add(inv_pow(n, q));
  }
  if (n > b) return {direct.value(), 0.0L};

  const long double lo = n;
  const bool infinite = std::isinf(b);
  CompensatedSum<long double> em;
  em.add(detail::power_integral(q, lo, b));
  em.add(0.5L * (inv_pow(lo, q) + (infinite ? 0.0L : inv_pow(b, q))));

  // f^{(2k-1)}(x) = -(q)_{2k-1} x^{-q-2k+1}, rising factorial (q)_j.
  long double rising = q;  // (q)_1
  long double factorial = 2.0L;  // (2k)!
  long double last = 0.0L;
  for (int k = 1; k <= kTerms; ++k) {
    if (k > 1) {
      rising *= (q + 2 * k - 3) * (q + 2 * k - 2);
      factorial *= (2.0L * k - 1.0L) * (2.0L * k);
    }
    const long double e = q + 2 * k - 1;
    const long double da = -rising * inv_pow(lo, e);
    const long double db = infinite ? 0.0L : -rising * inv_pow(b, e);
    last = detail::kBernoulliEven[k - 1] / factorial * (db - da);
    em.add(last);
  }
  direct.add(em.value());
  // Remainder bound plus a few ulps of the accumulated magnitude.
  const long double roundoff =
      16.0L * std::numeric_limits<long double>::epsilon() * std::abs(direct.value());
  return {direct.value(), std::abs(last) + roundoff};
}

}  // namespace dixmier
