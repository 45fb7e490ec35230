#pragma once

// Sequence and step-function transforms and generalized-limit surrogates.
//
// An honest executable stand-in for an invariant state omega: evaluate the
// (iterated Cesaro) means of a sequence along a geometric ladder; if the tail
// of the ladder has settled within the threshold report converged(value),
// otherwise report the band [min, max] of the tail.  Any generalized limit
// of a sequence lies between its liminf and limsup, so both outcomes are
// confined to the observed tail window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/summation.hpp"

namespace dixmier {

class BoundedSequence {
 public:
  using Rule = std::function<long double(std::uint64_t)>;

  BoundedSequence() : BoundedSequence(constant(0.0L)) {}

  /// rule(k) for k >= 1 with |rule(k)| <= bound.  `length` limits the
  /// available data; `zero_from` declares a_k = 0 for all k >= zero_from.
  BoundedSequence(Rule rule, long double bound, std::optional<std::uint64_t> length = std::nullopt,
                  std::optional<std::uint64_t> zero_from = std::nullopt)
      : rule_(std::move(rule)), bound_(bound), length_(length), zero_from_(zero_from) {
    if (!(bound >= 0.0L)) throw DomainError("bound must be nonnegative");
  }

  [[nodiscard]] long double operator()(std::uint64_t k) const {
    if (k == 0) throw DomainError("sequence index must be >= 1");
    if (zero_from_ && k >= *zero_from_) return 0.0L;
    if (length_ && k > *length_) {
      throw InsufficientSequenceData("sequence data exhausted at index " + std::to_string(k));
    }
    const long double v = rule_(k);
    if (std::abs(v) > bound_ * (1.0L + 1e-12L) + 1e-300L) {
      throw DomainError("sequence value exceeds its bound at index " + std::to_string(k));
    }
    return v;
  }

  [[nodiscard]] long double bound() const { return bound_; }
  [[nodiscard]] const std::optional<std::uint64_t>& length() const { return length_; }
  [[nodiscard]] const std::optional<std::uint64_t>& zero_from() const { return zero_from_; }
  [[nodiscard]] bool finitely_supported() const { return zero_from_.has_value(); }
  [[nodiscard]] const Rule& rule() const { return rule_; }
  /// Set by constant(): lets consumers take exact shortcuts.
  [[nodiscard]] const std::optional<long double>& known_constant() const { return constant_; }

  static BoundedSequence constant(long double c) {
    BoundedSequence a([c](std::uint64_t) { return c; }, std::abs(c));
    a.constant_ = c;
    return a;
  }

  /// values followed by zeros.
  static BoundedSequence finite(std::vector<long double> values) {
    long double b = 0.0L;
    for (auto v : values) b = std::max(b, std::abs(v));
    const std::uint64_t n = values.size();
    auto data = std::make_shared<const std::vector<long double>>(std::move(values));
    return BoundedSequence([data](std::uint64_t k) { return (*data)[k - 1]; }, b, std::nullopt, n + 1);
  }

  /// values with no information beyond them.
  static BoundedSequence from_values(std::vector<long double> values) {
    long double b = 0.0L;
    for (auto v : values) b = std::max(b, std::abs(v));
    const std::uint64_t n = values.size();
    auto data = std::make_shared<const std::vector<long double>>(std::move(values));
    return BoundedSequence([data](std::uint64_t k) { return (*data)[k - 1]; }, b, n);
  }

 private:
  Rule rule_;
  long double bound_ = 0;
  std::optional<std::uint64_t> length_;
  std::optional<std::uint64_t> zero_from_;
  std::optional<long double> constant_;
};

/// T_j: k -> a_{k+j}.
inline BoundedSequence shift(const BoundedSequence& a, std::uint64_t j) {
  if (j == 0) throw DomainError("shift needs j >= 1");
  std::optional<std::uint64_t> len, zf;
  if (a.length()) len = *a.length() > j ? *a.length() - j : 0;
  if (a.zero_from()) zf = *a.zero_from() > j ? *a.zero_from() - j : 1;
  return BoundedSequence([a, j](std::uint64_t k) { return a(k + j); }, a.bound(), len, zf);
}

/// D_j: k -> a_{ceil(k/j)}.
inline BoundedSequence dilate(const BoundedSequence& a, std::uint64_t j) {
  if (j == 0) throw DomainError("dilate needs j >= 1");
  std::optional<std::uint64_t> len, zf;
  if (a.length()) len = *a.length() * j;
  if (a.zero_from()) zf = (*a.zero_from() - 1) * j + 1;
  return BoundedSequence([a, j](std::uint64_t k) { return a((k + j - 1) / j); }, a.bound(), len, zf);
}

namespace detail {

// Running iterated means C^1..C^order; call push(a_k) for k = 1, 2, ...
class CesaroRunner {
 public:
  explicit CesaroRunner(int order) : sums_(static_cast<std::size_t>(order)) {
    if (order < 0 || order > 3) throw DomainError("Cesaro order must be 0..3");
  }

  long double push(long double x) {
    ++n_;
    long double v = x;
    for (auto& s : sums_) {
      s.add(v);
      v = s.value() / static_cast<long double>(n_);
    }
    return v;
  }

 private:
  std::vector<CompensatedSum<long double>> sums_;
  std::uint64_t n_ = 0;
};

}  // namespace detail

/// Iterated arithmetic mean of order `order` (1..3) of a_1..a_N.
inline long double cesaro(const BoundedSequence& a, int order, std::uint64_t N) {
  if (order < 1 || order > 3) throw DomainError("Cesaro order must be 1, 2 or 3");
  if (N == 0) throw DomainError("N must be >= 1");
  detail::CesaroRunner run(order);
  long double v = 0.0L;
  for (std::uint64_t k = 1; k <= N; ++k) v = run.push(a(k));
  return v;
}

struct EvaluationPlan {
  std::vector<std::uint64_t> points;  // increasing sample indices
  int cesaro_order = 1;               // 0 = raw samples
  long double threshold = 1e-3;       // relative agreement for convergence
  long double tail_fraction = 0.5;    // fraction of the ladder judged

  static EvaluationPlan geometric(std::uint64_t n_min = 1024, std::uint64_t n_max = 1ULL << 26,
                                  long double ratio = 2.0L) {
    if (!(n_min >= 1 && n_min < n_max)) throw DomainError("ladder needs 1 <= N_min < N_max");
    if (!(ratio > 1.0L)) throw DomainError("ladder ratio must exceed 1");
    EvaluationPlan p;
    long double x = static_cast<long double>(n_min);
    while (x <= static_cast<long double>(n_max) * (1.0L + 1e-12L)) {
      const auto k = static_cast<std::uint64_t>(std::llround(x));
      if (p.points.empty() || k > p.points.back()) p.points.push_back(k);
      x *= ratio;
    }
    if (p.points.back() != n_max) p.points.push_back(n_max);
    return p;
  }

  static EvaluationPlan all_points(std::uint64_t n_min, std::uint64_t n_max) {
    EvaluationPlan p;
    for (std::uint64_t k = n_min; k <= n_max; ++k) p.points.push_back(k);
    return p;
  }
};

struct LimitEstimate {
  enum class Status { converged, band };

  Status status = Status::band;
  long double value = 0;  // converged: the limit; band: midpoint
  long double error = 0;  // converged: error bound; band: half-width
  long double lo = 0;
  long double hi = 0;
  std::string method;
  // observed [min, max] of the judged tail samples
  long double sample_min = 0;
  long double sample_max = 0;

  [[nodiscard]] bool converged() const { return status == Status::converged; }
  [[nodiscard]] long double width() const { return hi - lo; }
  [[nodiscard]] bool contains(long double x, long double slack = 0) const {
    return x >= lo - slack && x <= hi + slack;
  }
  [[nodiscard]] bool overlaps(const LimitEstimate& o, long double slack = 0) const {
    return lo <= o.hi + slack && o.lo <= hi + slack;
  }

  static LimitEstimate make_converged(long double v, long double err, std::string method) {
    LimitEstimate e;
    e.status = Status::converged;
    e.value = v;
    e.error = err;
    e.lo = v - err;
    e.hi = v + err;
    e.sample_min = e.sample_max = v;
    e.method = std::move(method);
    return e;
  }

  static LimitEstimate make_band(long double lo, long double hi, std::string method) {
    LimitEstimate e;
    e.status = Status::band;
    e.lo = lo;
    e.hi = hi;
    e.value = 0.5L * (lo + hi);
    e.error = 0.5L * (hi - lo);
    e.sample_min = lo;
    e.sample_max = hi;
    e.method = std::move(method);
    return e;
  }

  /// Endpoint-wise division by a positive scalar.
  [[nodiscard]] LimitEstimate divided(long double d) const {
    if (!(d > 0.0L)) throw DomainError("division by a nonpositive normalization");
    LimitEstimate e = *this;
    e.value /= d;
    e.error /= d;
    e.lo /= d;
    e.hi /= d;
    e.sample_min /= d;
    e.sample_max /= d;
    return e;
  }
};

inline std::string to_string(LimitEstimate::Status s) {
  return s == LimitEstimate::Status::converged ? "converged" : "band";
}

/// Judge samples x_1..x_J (in ladder order) by the rule described above.
inline LimitEstimate estimate_from_samples(const std::vector<long double>& samples, long double threshold,
                                           long double tail_fraction, const std::string& method) {
  if (samples.empty()) throw DomainError("no samples to judge");
  const std::size_t J = samples.size();
  const std::size_t t = std::min(J, std::max<std::size_t>(2, static_cast<std::size_t>(
                                                                 std::ceil(tail_fraction * J))));
  const auto first = samples.end() - static_cast<std::ptrdiff_t>(t);
  const auto [mn, mx] = std::minmax_element(first, samples.end());
  long double max_step = 0.0L;
  for (auto it = first + 1; it < samples.end(); ++it) max_step = std::max(max_step, std::abs(*it - *(it - 1)));
  const long double last = samples.back();
  const long double scale = std::max(1.0L, std::abs(last));
  LimitEstimate e;
  if (J >= 2 && max_step <= threshold * scale) {
    e = LimitEstimate::make_converged(last, threshold * scale, method);
  } else {
    e = LimitEstimate::make_band(*mn, *mx, method);
  }
  e.sample_min = *mn;
  e.sample_max = *mx;
  return e;
}

/// Cesaro means along the plan's ladder.
inline std::vector<long double> ladder_samples(const BoundedSequence& a, const EvaluationPlan& plan) {
  if (plan.points.empty()) throw DomainError("evaluation plan has no points");
  std::vector<long double> out;
  out.reserve(plan.points.size());
  if (plan.cesaro_order == 0) {
    for (auto k : plan.points) out.push_back(a(k));
    return out;
  }
  detail::CesaroRunner run(plan.cesaro_order);
  std::uint64_t k = 0;
  long double v = 0.0L;
  for (auto target : plan.points) {
    while (k < target) v = run.push(a(++k));
    out.push_back(v);
  }
  return out;
}

inline LimitEstimate limit_estimate(const BoundedSequence& a, const EvaluationPlan& plan = EvaluationPlan::geometric()) {
  std::ostringstream m;
  m << "cesaro" << plan.cesaro_order << " ladder " << plan.points.front() << ".." << plan.points.back();
  return estimate_from_samples(ladder_samples(a, plan), plan.threshold, plan.tail_fraction, m.str());
}

// ---------------------------------------------------------------------------
// Step functions

/// Piecewise-constant function presented through its segments: segment(t)
/// returns the maximal [start, end) containing t and the value there.
class StepFunction {
 public:
  struct Segment {
    long double start;
    long double end;
    long double value;
  };
  using Source = std::function<Segment(long double)>;

  StepFunction(Source src, long double domain_start) : src_(std::move(src)), domain_start_(domain_start) {}

  /// Breakpoints b_0 < ... < b_n with values[i] on [b_i, b_{i+1}) and
  /// tail_value on [b_n, infinity); zero before b_0.
  static StepFunction from_breakpoints(std::vector<long double> breaks, std::vector<long double> values,
                                       long double tail_value) {
    if (breaks.empty() || values.size() + 1 != breaks.size()) {
      throw DomainError("step function needs n+1 breakpoints for n values");
    }
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      if (!(breaks[i] > breaks[i - 1])) throw DomainError("breakpoints must increase strictly");
    }
    auto b = std::make_shared<const std::vector<long double>>(std::move(breaks));
    auto v = std::make_shared<const std::vector<long double>>(std::move(values));
    const long double inf = std::numeric_limits<long double>::infinity();
    return StepFunction(
        [b, v, tail_value, inf](long double t) -> Segment {
          if (t < b->front()) return {-inf, b->front(), 0.0L};
          const auto it = std::upper_bound(b->begin(), b->end(), t);
          if (it == b->end()) return {b->back(), inf, tail_value};
          const auto i = static_cast<std::size_t>(it - b->begin()) - 1;
          return {(*b)[i], (*b)[i + 1], (*v)[i]};
        },
        b->front());
  }

  [[nodiscard]] long double operator()(long double t) const { return src_(t).value; }
  [[nodiscard]] Segment segment(long double t) const { return src_(t); }
  [[nodiscard]] long double domain_start() const { return domain_start_; }

  /// Exact integral over [a, b] by walking breakpoints.
  [[nodiscard]] long double integral(long double a, long double b) const {
    CompensatedSum<long double> acc;
    long double t = a;
    while (t < b) {
      const Segment s = src_(t);
      const long double e = std::min(s.end, b);
      acc.add(s.value * (e - t));
      if (!(e > t)) throw DomainError("step function segment does not advance");
      t = e;
    }
    return acc.value();
  }

 private:
  Source src_;
  long double domain_start_;
};

/// p(a)(t) = a_k on [k, k+1); zero on [0, 1).
inline StepFunction floor_lift(const BoundedSequence& a) {
  return StepFunction(
      [a](long double t) -> StepFunction::Segment {
        if (t < 1.0L) return {0.0L, 1.0L, 0.0L};
        const long double k = std::floor(t);
        return {k, k + 1.0L, a(static_cast<std::uint64_t>(k))};
      },
      1.0L);
}

/// L^{-1}(g)(t) = g(e^t) for g defined on [1, infinity).
inline StepFunction exp_substitute(const StepFunction& g) {
  if (g.domain_start() < 1.0L) throw DomainError("exp_substitute: breakpoint below 1");
  return StepFunction(
      [g](long double t) -> StepFunction::Segment {
        const auto s = g.segment(std::exp(t));
        const long double lo = s.start > 0.0L ? std::log(s.start) : -std::numeric_limits<long double>::infinity();
        const long double hi = std::log(s.end);
        // guard against rounding putting t just outside [lo, hi)
        return {std::min(lo, t), std::max(hi, std::nextafter(t, std::numeric_limits<long double>::infinity())),
                s.value};
      },
      0.0L);
}

/// E_k(f) = integral of f over [k-1, k].
inline long double average_E(const StepFunction& f, std::uint64_t k) {
  if (k == 0) throw DomainError("average_E needs k >= 1");
  return f.integral(static_cast<long double>(k - 1), static_cast<long double>(k));
}

/// E_k(L^{-1}(p(a))) = sum_j a_j |{t in [k-1, k) : e^t in [j, j+1)}| in closed form.
inline long double calL_sequence(const BoundedSequence& a, std::uint64_t k) {
  if (k == 0) throw DomainError("calL_sequence needs k >= 1");
  const long double lo = static_cast<long double>(k - 1);
  const long double hi = static_cast<long double>(k);
  const long double elo = std::exp(lo);
  const long double ehi = std::exp(hi);
  auto j0 = static_cast<std::uint64_t>(std::floor(elo));
  auto j1 = static_cast<std::uint64_t>(std::ceil(ehi)) - 1;  // last j with j < e^k
  if (j0 < 1) j0 = 1;
  if (a.zero_from()) {
    if (j0 >= *a.zero_from()) return 0.0L;
    j1 = std::min(j1, *a.zero_from() - 1);
  }
  if (a.length() && j1 > *a.length()) {
    throw InsufficientSequenceData("calL_sequence needs a_j up to j = " + std::to_string(j1));
  }
  CompensatedSum<long double> acc;
  for (std::uint64_t j = j0; j <= j1; ++j) {
    const long double jl = static_cast<long double>(j);
    // [log j, log(j+1)) clipped to [k-1, k)
    const long double left = (jl <= elo) ? lo : std::log(jl);
    const long double right = (jl + 1.0L >= ehi) ? hi : std::log(jl) + std::log1p(1.0L / jl);
    const long double len = right - left;
    if (len > 0.0L) acc.add(a(j) * len);
  }
  return acc.value();
}

/// k -> calL_sequence(a, k), for k up to k_max.
inline BoundedSequence calL(const BoundedSequence& a, std::uint64_t k_max) {
  std::vector<long double> vals;
  for (std::uint64_t k = 1; k <= k_max; ++k) vals.push_back(calL_sequence(a, k));
  return BoundedSequence::from_values(std::move(vals));
}

// ---------------------------------------------------------------------------
// Named test sequences

/// 1.5 on dyadic blocks [2^{2i}, 2^{2i+1}), 0.5 on [2^{2i+1}, 2^{2i+2}).
/// Cesaro means oscillate between about 0.833 and 1.167 forever.
inline BoundedSequence dyadic_blocks() {
  return BoundedSequence(
      [](std::uint64_t k) {
        const int b = 63 - __builtin_clzll(k);
        return (b % 2 == 0) ? 1.5L : 0.5L;
      },
      1.5L);
}

}  // namespace dixmier
