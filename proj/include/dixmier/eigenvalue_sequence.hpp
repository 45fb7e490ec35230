#pragma once

// Singular-value data of a positive compact operator T.
//
// Values are stored as a nonincreasing run-length prefix (value, multiplicity)
// followed by an optional tail model that describes mu_n past the prefix.
// Positions are 1-based and refer to the sorted spectrum; the eigenbasis is
// ordered the same way, so diag(m) of an observable pairs with mu_m.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/laws.hpp"
#include "dixmier/summation.hpp"

namespace dixmier {

struct Run {
  long double value;
  std::uint64_t count;
};

/// Description of mu_n for n >= start().
class TailModel {
 public:
  virtual ~TailModel() = default;

  [[nodiscard]] virtual Index start() const = 0;
  /// mu_n is known exactly for start() <= n < exact_end().
  [[nodiscard]] virtual Index exact_end() const = 0;
  [[nodiscard]] virtual long double value(Index n) const = 0;
  /// Power envelope valid for every n >= a (a >= start()).
  [[nodiscard]] virtual PowerEnvelope envelope_from(Index a) const = 0;
  /// sum_{n=a}^{b} mu_n^s with certified error; b may be infinite.
  [[nodiscard]] virtual BoundedSum power_sum(long double s, Index a, Index b) const = 0;
  [[nodiscard]] virtual std::shared_ptr<const TailModel> scaled(long double c) const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

/// Tail given by an exact closed-form law.
class LawTail final : public TailModel {
 public:
  explicit LawTail(PiecewiseLaw law) : law_(std::move(law)) {}

  [[nodiscard]] Index start() const override { return law_.start(); }
  [[nodiscard]] Index exact_end() const override { return law_.horizon(); }
  [[nodiscard]] long double value(Index n) const override { return law_.value(n); }

  [[nodiscard]] PowerEnvelope envelope_from(Index a) const override {
    const long double p = law_.tail_exponent();
    long double c = 0.0L;
    for (const auto& pc : law_.pieces()) {
      if (pc.end <= a) continue;
      const Index lo = std::max(a, pc.start);
      c = std::max(c, piece_envelope(pc, lo, p));
    }
    if (a >= law_.horizon() || law_.beyond()) {
      if (law_.beyond() && law_.beyond()->p >= p) {
        const Index lo = std::max(a, law_.horizon());
        c = std::max(c, law_.beyond()->c * std::exp((p - law_.beyond()->p) * std::log(lo)));
      }
    }
    return {c, p};
  }

  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const override {
    return law_.power_sum(s, a, b);
  }

  [[nodiscard]] std::shared_ptr<const TailModel> scaled(long double c) const override {
    return std::make_shared<LawTail>(scale_law(law_, c));
  }

  [[nodiscard]] std::string name() const override { return "law"; }
  [[nodiscard]] const PiecewiseLaw& law() const { return law_; }

 private:
  // sup_{n in piece, n >= lo} mu_n n^p, assuming the piece exponent is >= p
  static long double piece_envelope(const LawPiece& pc, Index lo, long double p) {
    return std::visit(
        [&](const auto& l) -> long double {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, PowerPiece>) {
            return l.c * std::exp((p - l.p) * std::log(lo));
          } else if constexpr (std::is_same_v<L, SteppedPiece>) {
            // ceil(n/r) >= n/r
            return l.c * std::pow(l.multiplicity, l.p) * std::exp((p - l.p) * std::log(lo));
          } else {
            if (std::isinf(pc.end)) throw DomainError("constant piece cannot extend to infinity");
            return l.c * std::exp(p * std::log(pc.end - 1.0L));
          }
        },
        pc.law);
  }

  PiecewiseLaw law_;
};

/// Only an upper bound mu_n <= c n^{-p} is known; sums report the midpoint of
/// [0, envelope sum] with half-width error.
class BoundTail final : public TailModel {
 public:
  BoundTail(Index start, PowerEnvelope env) : start_(start), env_(env) {
    if (!(env.c > 0.0L)) throw InvalidSpectralData("tail bound must be positive");
  }

  [[nodiscard]] Index start() const override { return start_; }
  [[nodiscard]] Index exact_end() const override { return start_; }
  [[nodiscard]] long double value(Index) const override {
    throw InsufficientSpectralData("tail is only known through an upper bound");
  }
  [[nodiscard]] PowerEnvelope envelope_from(Index) const override { return env_; }

  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const override {
    const BoundedSum env = std::pow(env_.c, s) * dixmier::power_sum(env_.p * s, a, b);
    return {0.5L * env.value, 0.5L * env.value + env.error};
  }

  [[nodiscard]] std::shared_ptr<const TailModel> scaled(long double c) const override {
    return std::make_shared<BoundTail>(start_, PowerEnvelope{env_.c * c, env_.p});
  }

  [[nodiscard]] std::string name() const override { return "bound"; }

 private:
  Index start_;
  PowerEnvelope env_;
};

/// Tail of the spectrum c/(m^2+n^2) over the lattice points outside the
/// closed disk m^2+n^2 <= X.  With N(t) = #{m^2+n^2 <= t} = pi t + E(t),
///   sum_{r^2 > X} r^{-2s} = pi X^{1-s}/(s-1) - X^{-s} E(X) + s int_X^inf E(t) t^{-s-1} dt,
/// and |E(t)| <= sqrt(2) pi sqrt(t) + pi/2 (+1 slack) bounds the integral.
/// Only the complete sum to infinity is available.
class LatticeDiskTail final : public TailModel {
 public:
  LatticeDiskTail(Index start, long double radius2, long double count_with_origin,
                  long double scale = 1.0L)
      : start_(start), x_(radius2), count_(count_with_origin), scale_(scale) {}

  [[nodiscard]] Index start() const override { return start_; }
  [[nodiscard]] Index exact_end() const override { return start_; }
  [[nodiscard]] long double value(Index) const override {
    throw InsufficientSpectralData("lattice tail values are not enumerated");
  }

  // N(t) <= pi (sqrt t + 1/sqrt 2)^2, and r_n^2 >= t with N(t) >= n + 1.
  [[nodiscard]] PowerEnvelope envelope_from(Index a) const override {
    const long double pi = std::numbers::pi_v<long double>;
    const long double r = std::sqrt((a + 1.0L) / pi) - std::numbers::sqrt2_v<long double> / 2.0L;
    return {scale_ * a / (r * r), 1.0L};
  }

  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const override {
    if (a != start_ || !std::isinf(b)) {
      throw InsufficientSpectralData("lattice tail supports only the full sum from its start");
    }
    if (!(s > 1.0L)) throw DomainError("divergent tail: exponent must exceed 1");
    const long double pi = std::numbers::pi_v<long double>;
    const long double alpha = std::numbers::sqrt2_v<long double> * pi;
    const long double beta = pi / 2.0L + 1.0L;
    const long double lx = std::log(x_);
    const long double e_x = count_ - pi * x_;
    const long double xs = std::exp(-s * lx);
    const long double main = pi * std::exp((1.0L - s) * lx) / (s - 1.0L) - xs * e_x;
    const long double err =
        s * (alpha * std::exp((0.5L - s) * lx) / (s - 0.5L) + beta * xs / s);
    const long double cs = std::pow(scale_, s);
    return {cs * main, cs * err};
  }

  [[nodiscard]] std::shared_ptr<const TailModel> scaled(long double c) const override {
    return std::make_shared<LatticeDiskTail>(start_, x_, count_, scale_ * c);
  }

  [[nodiscard]] std::string name() const override { return "lattice-disk"; }

 private:
  Index start_;
  long double x_;
  long double count_;
  long double scale_;
};

class EigenvalueSequence {
 public:
  using LabelFn = std::function<std::int64_t(std::uint64_t)>;

  EigenvalueSequence() = default;

  /// Nonincreasing positive values; trailing zeros mark finite rank.
  static EigenvalueSequence from_list(const std::vector<long double>& values,
                                      std::shared_ptr<const TailModel> tail = nullptr) {
    std::size_t rank = values.size();
    while (rank > 0 && values[rank - 1] == 0.0L) --rank;
    const bool padded = rank < values.size();
    std::vector<Run> runs;
    for (std::size_t i = 0; i < rank; ++i) {
      const long double v = values[i];
      if (!(v > 0.0L)) throw InvalidSpectralData("eigenvalue " + std::to_string(i + 1) + " is not positive");
      if (!runs.empty() && v > runs.back().value) {
        throw InvalidSpectralData("eigenvalues increase at index " + std::to_string(i + 1));
      }
      if (!runs.empty() && v == runs.back().value) {
        ++runs.back().count;
      } else {
        runs.push_back({v, 1});
      }
    }
    if (padded && tail) throw InvalidSpectralData("zero padding cannot be followed by a tail");
    EigenvalueSequence out(std::move(runs), std::move(tail));
    out.finite_rank_ = padded;
    return out;
  }

  /// Values in enumeration order; sorted nonincreasing with ties broken by
  /// enumeration index.  label(n) returns the enumeration index.
  static EigenvalueSequence from_enumeration(const std::vector<long double>& values,
                                             std::shared_ptr<const TailModel> tail = nullptr) {
    std::vector<std::uint64_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (!(values[i] > 0.0L)) {
        throw InvalidSpectralData("enumerated eigenvalue " + std::to_string(i + 1) + " is not positive");
      }
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return values[a] > values[b]; });
    std::vector<long double> sorted(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = values[order[i]];
    EigenvalueSequence out = from_list(sorted, std::move(tail));
    out.labels_ = [order](std::uint64_t n) -> std::int64_t {
      if (n == 0 || n > order.size()) return -1;
      return static_cast<std::int64_t>(order[n - 1] + 1);
    };
    return out;
  }

  static EigenvalueSequence from_law(PiecewiseLaw law) {
    if (law.start() != 1.0L) throw InvalidSpectralData("a bare law must start at index 1");
    return EigenvalueSequence({}, std::make_shared<LawTail>(std::move(law)));
  }

  static EigenvalueSequence from_runs(std::vector<Run> runs, std::shared_ptr<const TailModel> tail,
                                      LabelFn labels = {}) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!(runs[i].value > 0.0L) || runs[i].count == 0) {
        throw InvalidSpectralData("run " + std::to_string(i) + " is empty or not positive");
      }
      if (i > 0 && !(runs[i].value < runs[i - 1].value)) {
        throw InvalidSpectralData("runs must be strictly decreasing");
      }
    }
    EigenvalueSequence out(std::move(runs), std::move(tail));
    out.labels_ = std::move(labels);
    return out;
  }

  [[nodiscard]] std::uint64_t prefix_size() const { return run_end_.empty() ? 0 : run_end_.back(); }
  [[nodiscard]] const std::vector<Run>& runs() const { return runs_; }
  [[nodiscard]] bool has_tail() const { return static_cast<bool>(tail_); }
  [[nodiscard]] const TailModel* tail() const { return tail_.get(); }
  /// Declared zero beyond the prefix (explicit zero padding).
  [[nodiscard]] bool finite_rank() const { return finite_rank_; }
  /// No tail: sums beyond the prefix vanish.
  [[nodiscard]] bool finite_support() const { return !tail_; }

  /// Exclusive end of the range where mu_n is pointwise known.
  [[nodiscard]] Index exact_end() const {
    if (!tail_) return finite_rank_ ? kInfiniteIndex : prefix_size() + 1.0L;
    return tail_->exact_end();
  }

  [[nodiscard]] long double mu(Index n) const {
    require_index(n);
    const Index p = prefix_size();
    if (n <= p) return runs_[run_of(n)].value;
    if (!tail_) {
      if (finite_rank_) return 0.0L;
      throw InsufficientSpectralData("index " + index_str(n) + " beyond explicit data and no law");
    }
    if (n >= tail_->exact_end()) {
      throw InsufficientSpectralData("index " + index_str(n) + " beyond the exact range of the tail");
    }
    return tail_->value(n);
  }

  [[nodiscard]] std::optional<std::int64_t> label(std::uint64_t n) const {
    if (!labels_) return std::nullopt;
    const std::int64_t v = labels_(n);
    if (v < 0) return std::nullopt;
    return v;
  }

  /// sum_{n=1}^{N} mu_n.
  [[nodiscard]] BoundedSum partial_sum(Index N) const {
    require_index(N);
    const Index p = prefix_size();
    if (N <= p) return {prefix_sum(N), 0.0L};
    BoundedSum out{total_prefix(), 0.0L};
    if (!tail_) {
      if (finite_rank_) return out;
      throw InsufficientSpectralData("index " + index_str(N) + " beyond explicit data and no law");
    }
    if (N >= tail_->exact_end()) {
      throw InsufficientSpectralData("index " + index_str(N) + " beyond the exact range of the tail");
    }
    out += tail_->power_sum(1.0L, p + 1.0L, N);
    return out;
  }

  /// sum_{n=a}^{b} mu_n^s; b may be infinite.  Without a tail the operator
  /// is treated as finite rank past its prefix.
  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const {
    BoundedSum out;
    if (b < a) return out;
    require_index(a);
    const Index p = prefix_size();
    if (a <= p) {
      CompensatedSum<long double> acc;
      std::size_t i = run_of(a);
      Index pos = a;
      const Index last = std::min(b, p);
      while (pos <= last) {
        const Index run_end = static_cast<Index>(run_end_[i]);
        const Index hi = std::min(last, run_end);
        acc.add((hi - pos + 1.0L) * std::exp(s * std::log(runs_[i].value)));
        pos = hi + 1.0L;
        ++i;
      }
      out.value = acc.value();
    }
    if (b > p && tail_) out += tail_->power_sum(s, std::max(a, p + 1.0L), b);
    return out;
  }

  /// Envelope mu_n <= c n^{-p} valid for all n >= a.
  [[nodiscard]] PowerEnvelope envelope_from(Index a) const {
    require_index(a);
    const Index p = prefix_size();
    if (!tail_) {
      // finite support: any envelope works past the data; use p = 1
      long double c = 0.0L;
      for (std::size_t i = (a <= p ? run_of(a) : runs_.size()); i < runs_.size(); ++i) {
        c = std::max(c, runs_[i].value * static_cast<long double>(run_end_[i]));
      }
      return {c, 1.0L};
    }
    PowerEnvelope env = tail_->envelope_from(std::max(a, p + 1.0L));
    if (a <= p) {
      for (std::size_t i = run_of(a); i < runs_.size(); ++i) {
        const long double last = static_cast<long double>(run_end_[i]);
        env.c = std::max(env.c, runs_[i].value * std::exp(env.p * std::log(last)));
      }
    }
    return env;
  }

  [[nodiscard]] EigenvalueSequence scaled(long double c) const {
    if (!(c > 0.0L)) throw DomainError("scale factor must be positive");
    std::vector<Run> runs = runs_;
    for (auto& r : runs) r.value *= c;
    EigenvalueSequence out(std::move(runs), tail_ ? tail_->scaled(c) : nullptr);
    out.finite_rank_ = finite_rank_;
    out.labels_ = labels_;
    return out;
  }

  /// Throws InvalidSpectralData if mu fails to be positive and nonincreasing
  /// on the pointwise-known part of [a, b].
  void verify_window(Index a, Index b) const {
    const Index hi = std::min(b, exact_end() - 1.0L);
    long double prev = std::numeric_limits<long double>::infinity();
    for (Index n = a; n <= hi; n += 1.0L) {
      const long double v = mu(n);
      if (v > prev) throw InvalidSpectralData("eigenvalues increase at index " + index_str(n));
      if (!(v > 0.0L) && !finite_rank_) throw InvalidSpectralData("nonpositive eigenvalue at " + index_str(n));
      prev = v;
    }
  }

  /// Index of the run containing prefix position n (1 <= n <= prefix_size()).
  [[nodiscard]] std::size_t run_of(Index n) const {
    const auto it = std::lower_bound(run_end_.begin(), run_end_.end(), n,
                                     [](std::uint64_t e, Index v) { return static_cast<Index>(e) < v; });
    return static_cast<std::size_t>(it - run_end_.begin());
  }
  /// Last prefix position covered by run i.
  [[nodiscard]] std::uint64_t run_end(std::size_t i) const { return run_end_[i]; }

 private:
  EigenvalueSequence(std::vector<Run> runs, std::shared_ptr<const TailModel> tail)
      : runs_(std::move(runs)), tail_(std::move(tail)) {
    run_end_.reserve(runs_.size());
    cum_sum_.reserve(runs_.size());
    std::uint64_t count = 0;
    CompensatedSum<long double> acc;
    for (const auto& r : runs_) {
      count += r.count;
      acc.add(r.value * static_cast<long double>(r.count));
      run_end_.push_back(count);
      cum_sum_.push_back(acc.value());
    }
    if (tail_) {
      if (tail_->start() != static_cast<Index>(count) + 1.0L) {
        throw InvalidSpectralData("tail must start right after the explicit prefix");
      }
      if (!runs_.empty() && tail_->exact_end() > tail_->start() &&
          tail_->value(tail_->start()) > runs_.back().value * (1.0L + 1e-12L)) {
        throw InvalidSpectralData("tail exceeds the last explicit eigenvalue");
      }
    }
  }

  static void require_index(Index n) {
    if (!(n >= 1.0L) || n != std::floor(n)) throw DomainError("index must be a positive integer");
  }

  static std::string index_str(Index n) {
    if (n < 1e18L) return std::to_string(static_cast<std::uint64_t>(n));
    return "exp(" + std::to_string(static_cast<double>(std::log(n))) + ")";
  }

  [[nodiscard]] long double total_prefix() const { return cum_sum_.empty() ? 0.0L : cum_sum_.back(); }

  [[nodiscard]] long double prefix_sum(Index N) const {
    const std::size_t i = run_of(N);
    const long double before = i == 0 ? 0.0L : cum_sum_[i - 1];
    const long double start = i == 0 ? 0.0L : static_cast<long double>(run_end_[i - 1]);
    return before + (N - start) * runs_[i].value;
  }

  std::vector<Run> runs_;
  std::vector<std::uint64_t> run_end_;
  std::vector<long double> cum_sum_;
  std::shared_ptr<const TailModel> tail_;
  bool finite_rank_ = false;
  LabelFn labels_;
};

}  // namespace dixmier
