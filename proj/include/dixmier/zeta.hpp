#pragma once

// zeta_{A,T}(s) = sum_m mu_m^s diag(m), log averages and the finite-window
// l^{1,infinity} estimate.
//
// zeta() sums an explicit window [1, E] exactly (walking runs of equal
// eigenvalues and runs of equal diagonal values) and certifies the rest:
//   diag constant past E      c * sum mu^s
//   convergent diag           limit * sum mu^s  +/-  c_A * c_T^s * sum m^{-p s - alpha}
//   otherwise                 hull midpoint * sum mu^s  +/-  half-width * sum mu^s
// E grows geometrically until the reported error meets the tolerance.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dixmier/eigenvalue_sequence.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/summation.hpp"

namespace dixmier {

struct ZetaValue {
  Complex value;
  long double error = 0;
  Index window = 0;  // last explicitly summed index
};

struct ZetaOptions {
  Index initial_window = 65536;
  Index max_window = 67108864;  // 2^26
  long double growth = 4;
};

struct ZetaPoint {
  long double s;
  Complex value;
  long double error;
};

/// Points sorted by s descending toward 1.
struct ZetaSamples {
  std::vector<ZetaPoint> points;
};

namespace detail {

struct ComplexAccumulator {
  CompensatedSum<long double> re, im;
  long double error = 0;

  void add(Complex d, const BoundedSum& s) {
    re.add(d.real() * s.value);
    im.add(d.imag() * s.value);
    error += std::abs(d) * s.error;
  }
  [[nodiscard]] Complex value() const { return {re.value(), im.value()}; }
};

// Index after `last`.  Past 2^64 unit steps vanish in long double; there
// positions are approximate to one term, far below any tolerance.
inline Index next_index(Index last) {
  const Index n = last + 1.0L;
  return n > last ? n : std::nextafter(last, kInfiniteIndex);
}

// Exact sum over positions [a, b] (all pointwise known).
inline void head_sum(const DiagonalObservable& A, const EigenvalueSequence& T, long double s,
                     Index a, Index b, ComplexAccumulator& acc) {
  const Index p = static_cast<Index>(T.prefix_size());
  Index m = a;
  while (m <= b) {
    const Index seg_last = std::min(A.segment_end(m) - 1.0L, b);
    if (m <= p) {
      std::size_t i = T.run_of(m);
      const Index run_last = std::min(static_cast<Index>(T.run_end(i)), b);
      if (seg_last >= run_last) {
        // the diagonal segment covers the rest of this run and maybe more
        const Index hi = std::min(seg_last, p);
        acc.add(A(m), T.power_sum(s, m, hi));
        m = next_index(hi);
        continue;
      }
      // several diagonal segments inside one run: mu^s is common
      CompensatedSum<long double> re, im;
      Index n = m;
      while (n <= run_last) {
        const Index e = std::min(A.segment_end(n) - 1.0L, run_last);
        const Complex d = A(n);
        re.add(d.real() * (e - n + 1.0L));
        im.add(d.imag() * (e - n + 1.0L));
        n = next_index(e);
      }
      const long double vs = std::exp(s * std::log(T.runs()[i].value));
      acc.re.add(vs * re.value());
      acc.im.add(vs * im.value());
      m = next_index(run_last);
      continue;
    }
    if (seg_last > m) {
      acc.add(A(m), T.power_sum(s, m, seg_last));
    } else {
      const long double v = T.mu(m);
      acc.add(A(m), {std::exp(s * std::log(v)), 0.0L});
    }
    m = next_index(seg_last);
  }
}

// Certified sum over positions (E, infinity).
inline void tail_sum(const DiagonalObservable& A, const EigenvalueSequence& T, long double s,
                     Index E, ComplexAccumulator& acc) {
  const Index a = next_index(E);
  if (T.finite_support() && a > static_cast<Index>(T.prefix_size())) return;
  if (const auto c = A.constant_from(a)) {
    if (*c != Complex(0.0L)) acc.add(*c, T.power_sum(s, a, kInfiniteIndex));
    return;
  }
  const BoundedSum rest = T.power_sum(s, a, kInfiniteIndex);
  const Box box = A.hull_from(a);
  const long double hull_err = box.half_width() * (rest.value + rest.error);
  const auto& conv = A.convergent();
  if (conv && conv->from <= a) {
    const PowerEnvelope env = T.envelope_from(a);
    const BoundedSum rem = dixmier::power_sum(env.p * s + conv->alpha, a, kInfiniteIndex);
    const long double conv_err = conv->c * std::pow(env.c, s) * (rem.value + rem.error);
    if (conv_err < hull_err) {
      acc.add(conv->limit, rest);
      acc.error += conv_err;
      return;
    }
  }
  acc.add(box.mid(), rest);
  acc.error += hull_err;
}

}  // namespace detail

/// zeta_{A,T}(s) with |error| <= tol.
inline ZetaValue zeta(const DiagonalObservable& A, const EigenvalueSequence& T, long double s,
                      long double tol, const ZetaOptions& opts = {}) {
  if (!(s > 1.0L)) throw DomainError("zeta needs s > 1");
  if (!(tol > 0.0L)) throw DomainError("tolerance must be positive");
  if (!T.has_tail() && !T.finite_support()) {
    throw InsufficientSpectralData("zeta needs a tail descriptor or finite support");
  }

  // Whole-spectrum shortcut for constant observables.
  if (const auto c = A.constant_value()) {
    detail::ComplexAccumulator acc;
    if (*c != Complex(0.0L)) acc.add(*c, T.power_sum(s, 1.0L, kInfiniteIndex));
    if (acc.error > tol) {
      throw UnachievableTolerance("zeta: tail bound exceeds tolerance", static_cast<double>(acc.error));
    }
    return {acc.value(), acc.error, 0.0L};
  }

  const Index p = static_cast<Index>(T.prefix_size());
  Index cap = std::min(opts.max_window, T.exact_end() - 1.0L);
  if (T.finite_support()) cap = p;
  Index E = std::min(std::max(opts.initial_window, 1.0L), cap);
  if (T.finite_support()) E = p;

  detail::ComplexAccumulator head;
  detail::head_sum(A, T, s, 1.0L, E, head);
  long double best = std::numeric_limits<long double>::infinity();
  while (true) {
    detail::ComplexAccumulator total = head;
    detail::tail_sum(A, T, s, E, total);
    best = std::min(best, total.error);
    if (total.error <= tol) return {total.value(), total.error, E};
    if (E >= cap) {
      throw UnachievableTolerance("zeta: cannot certify tolerance within the explicit window",
                                  static_cast<double>(best));
    }
    const Index next = std::min(std::floor(E * opts.growth), cap);
    detail::head_sum(A, T, s, detail::next_index(E), next, head);
    E = next;
  }
}

inline ZetaSamples zeta_samples(const DiagonalObservable& A, const EigenvalueSequence& T,
                                std::vector<long double> s_values, long double tol,
                                const ZetaOptions& opts = {}) {
  std::sort(s_values.begin(), s_values.end(), std::greater<>());
  ZetaSamples out;
  for (long double s : s_values) {
    const ZetaValue z = zeta(A, T, s, tol, opts);
    out.points.push_back({s, z.value, z.error});
  }
  return out;
}

/// gamma_N(T) = (1/log(1+N)) sum_{n<=N} mu_n.
inline long double log_average(const EigenvalueSequence& T, Index N) {
  return T.partial_sum(N).value / std::log1p(N);
}

inline BoundedSum log_average_bounded(const EigenvalueSequence& T, Index N) {
  const BoundedSum s = T.partial_sum(N);
  const long double l = std::log1p(N);
  return {s.value / l, s.error / l};
}

/// max_{N <= N_max} gamma_N(T): a lower estimate of the (1,infinity) norm.
inline long double l1inf_norm_estimate(const EigenvalueSequence& T, std::uint64_t N_max) {
  if (N_max == 0) throw DomainError("N_max must be positive");
  CompensatedSum<long double> sum;
  long double best = 0.0L;
  for (std::uint64_t n = 1; n <= N_max; ++n) {
    sum.add(T.mu(static_cast<Index>(n)));
    best = std::max(best, sum.value() / std::log1p(static_cast<long double>(n)));
  }
  return best;
}

}  // namespace dixmier
