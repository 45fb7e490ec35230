#pragma once

// Diagonal matrix elements m -> <h_m, A h_m> of a bounded operator A in the
// eigenbasis of T.  Besides the pointwise rule an observable may declare
// structure that lets infinite sums be certified:
//   segment_end(m)  exclusive end of a run of equal values starting at m
//   hull_from(m)    box containing every diag(m'), m' >= m
//   convergent      |diag(m) - limit| <= c m^{-alpha} for m >= from

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/laws.hpp"

namespace dixmier {

using Complex = std::complex<long double>;

struct Box {
  long double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

  [[nodiscard]] Complex mid() const { return {0.5L * (re_lo + re_hi), 0.5L * (im_lo + im_hi)}; }
  [[nodiscard]] long double half_width() const { return 0.5L * ((re_hi - re_lo) + (im_hi - im_lo)); }

  static Box around(Complex c, long double r) {
    return {c.real() - r, c.real() + r, c.imag() - r, c.imag() + r};
  }
};

struct ConvergentTail {
  Complex limit;
  long double c;
  long double alpha;
  Index from = 1;
};

struct DiagFlags {
  bool real = true;
  bool nonneg = false;
};

class DiagonalObservable {
 public:
  using Rule = std::function<Complex(Index)>;
  using SegmentFn = std::function<Index(Index)>;
  using HullFn = std::function<Box(Index)>;

  using Flags = DiagFlags;

  DiagonalObservable() : DiagonalObservable(constant(0.0L)) {}

  /// diag(m) for m >= 1; checks |diag(m)| <= bound.
  [[nodiscard]] Complex operator()(Index m) const {
    const Complex v = rule_(m);
    const long double lim = bound_ * (1.0L + 1e-12L) + 1e-300L;
    if (std::norm(v) > lim * lim) {
      throw InvalidSpectralData("diagonal value exceeds the declared bound at m = " +
                                std::to_string(static_cast<double>(m)));
    }
    return v;
  }

  [[nodiscard]] long double bound() const { return bound_; }
  [[nodiscard]] bool is_real() const { return flags_.real; }
  [[nodiscard]] bool is_nonneg() const { return flags_.nonneg; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::optional<ConvergentTail>& convergent() const { return convergent_; }

  [[nodiscard]] Index segment_end(Index m) const { return segment_ ? std::max(segment_(m), m + 1.0L) : m + 1.0L; }

  [[nodiscard]] Box hull_from(Index m) const {
    if (hull_) return hull_(m);
    if (flags_.nonneg) return {0.0L, bound_, 0.0L, 0.0L};
    if (flags_.real) return {-bound_, bound_, 0.0L, 0.0L};
    return Box::around(0.0L, bound_);
  }

  /// Value if diag is constant on [m, infinity).
  [[nodiscard]] std::optional<Complex> constant_from(Index m) const {
    if (std::isinf(segment_end(m))) return (*this)(m);
    return std::nullopt;
  }

  [[nodiscard]] std::optional<Complex> constant_value() const { return constant_from(1.0L); }

  DiagonalObservable& named(std::string n) {
    name_ = std::move(n);
    return *this;
  }

  // ---- factories ----

  static DiagonalObservable constant(Complex c) {
    DiagonalObservable a{Raw{}};
    a.rule_ = [c](Index) { return c; };
    a.bound_ = std::abs(c);
    a.segment_ = [](Index) { return kInfiniteIndex; };
    a.hull_ = [c](Index) { return Box::around(c, 0.0L); };
    a.flags_ = {c.imag() == 0.0L, c.imag() == 0.0L && c.real() >= 0.0L};
    a.convergent_ = ConvergentTail{c, 0.0L, 1.0L, 1.0L};
    a.name_ = "constant";
    return a;
  }

  /// Arbitrary bounded rule; tails are only controlled by the bound.
  static DiagonalObservable from_rule(Rule rule, long double bound, Flags flags = {}) {
    if (!(bound >= 0.0L)) throw DomainError("bound must be nonnegative");
    DiagonalObservable a{Raw{}};
    a.rule_ = std::move(rule);
    a.bound_ = bound;
    a.flags_ = flags;
    a.name_ = "rule";
    return a;
  }

  /// Rule with a certified convergence rate |diag(m) - limit| <= c m^{-alpha}, m >= from.
  static DiagonalObservable convergent(Rule rule, Complex limit, long double c, long double alpha,
                                       long double bound, Flags flags = {}, Index from = 1) {
    if (!(alpha > 0.0L) || !(c >= 0.0L)) throw DomainError("convergence rate must be positive");
    DiagonalObservable a = from_rule(std::move(rule), bound, flags);
    a.convergent_ = ConvergentTail{limit, c, alpha, from};
    a.hull_ = [limit, c, alpha, from, bound, flags](Index m) {
      if (m < from) {
        if (flags.real) return Box{flags.nonneg ? 0.0L : -bound, bound, 0.0L, 0.0L};
        return Box::around(0.0L, bound);
      }
      const long double r = c * std::exp(-alpha * std::log(m));
      Box b = Box::around(limit, r);
      if (flags.real) b.im_lo = b.im_hi = 0.0L;
      return b;
    };
    a.name_ = "convergent";
    return a;
  }

  /// values[m-1] for m <= size, zero beyond.
  static DiagonalObservable finite(std::vector<Complex> values) {
    DiagonalObservable a{Raw{}};
    long double bound = 0.0L;
    bool real = true, nonneg = true;
    for (const auto& v : values) {
      bound = std::max(bound, std::abs(v));
      real = real && v.imag() == 0.0L;
      nonneg = nonneg && v.imag() == 0.0L && v.real() >= 0.0L;
    }
    const auto len = static_cast<Index>(values.size());
    auto data = std::make_shared<const std::vector<Complex>>(std::move(values));
    a.rule_ = [data, len](Index m) -> Complex {
      if (m > len) return 0.0L;
      return (*data)[static_cast<std::size_t>(m) - 1];
    };
    a.bound_ = bound;
    a.flags_ = {real, nonneg};
    a.segment_ = [len](Index m) { return m > len ? kInfiniteIndex : m + 1.0L; };
    a.hull_ = [bound, len, real, nonneg](Index m) {
      if (m > len) return Box{};
      if (nonneg) return Box{0.0L, bound, 0.0L, 0.0L};
      if (real) return Box{-bound, bound, 0.0L, 0.0L};
      return Box::around(0.0L, bound);
    };
    a.convergent_ = ConvergentTail{0.0L, 0.0L, 1.0L, len + 1.0L};
    a.name_ = "finite";
    return a;
  }

  struct Piece {
    long double value;
    Index end;  // exclusive
  };

  /// Real piecewise-constant diagonal: piece(m) gives the value at m and the
  /// end of the constant run containing m.  Values lie in [lo, hi].
  static DiagonalObservable blocks(std::function<Piece(Index)> piece, long double lo, long double hi) {
    if (!(lo <= hi)) throw DomainError("blocks: lo > hi");
    DiagonalObservable a{Raw{}};
    a.rule_ = [piece](Index m) -> Complex { return piece(m).value; };
    a.bound_ = std::max(std::abs(lo), std::abs(hi));
    a.flags_ = {true, lo >= 0.0L};
    a.segment_ = [piece](Index m) { return piece(m).end; };
    a.hull_ = [lo, hi](Index) { return Box{lo, hi, 0.0L, 0.0L}; };
    a.name_ = "blocks";
    return a;
  }

  // ---- combinators ----

  /// alpha A + beta B.
  static DiagonalObservable linear(Complex alpha, const DiagonalObservable& A, Complex beta,
                                   const DiagonalObservable& B) {
    DiagonalObservable out{Raw{}};
    out.rule_ = [alpha, beta, ra = A.rule_, rb = B.rule_](Index m) { return alpha * ra(m) + beta * rb(m); };
    out.bound_ = std::abs(alpha) * A.bound_ + std::abs(beta) * B.bound_;
    const bool real_coeffs = alpha.imag() == 0.0L && beta.imag() == 0.0L;
    out.flags_.real = real_coeffs && A.flags_.real && B.flags_.real;
    out.flags_.nonneg = real_coeffs && A.flags_.nonneg && B.flags_.nonneg && alpha.real() >= 0.0L &&
                        beta.real() >= 0.0L;
    out.segment_ = [A, B](Index m) { return std::min(A.segment_end(m), B.segment_end(m)); };
    out.hull_ = [alpha, beta, A, B](Index m) {
      const Box x = A.hull_from(m), y = B.hull_from(m);
      const Complex c = alpha * x.mid() + beta * y.mid();
      const long double r = std::abs(alpha) * x.half_width() + std::abs(beta) * y.half_width();
      return Box::around(c, r);
    };
    if (A.convergent_ && B.convergent_) {
      const auto& ca = *A.convergent_;
      const auto& cb = *B.convergent_;
      out.convergent_ = ConvergentTail{alpha * ca.limit + beta * cb.limit,
                                       std::abs(alpha) * ca.c + std::abs(beta) * cb.c,
                                       std::min(ca.alpha, cb.alpha), std::max(ca.from, cb.from)};
    }
    out.name_ = "linear";
    return out;
  }

  /// min(A, t) for a real observable.
  static DiagonalObservable clamp_above(const DiagonalObservable& A, long double t) {
    if (!A.flags_.real) throw DomainError("clamp needs a real observable");
    DiagonalObservable out{Raw{}};
    out.rule_ = [ra = A.rule_, t](Index m) -> Complex { return std::min(ra(m).real(), t); };
    if (t < -A.bound_) {
      out.bound_ = -t;
    } else if (A.flags_.nonneg && t >= 0.0L) {
      out.bound_ = std::min(A.bound_, t);
    } else {
      out.bound_ = A.bound_;
    }
    out.flags_ = {true, A.flags_.nonneg && t >= 0.0L};
    out.segment_ = [A](Index m) { return A.segment_end(m); };
    out.hull_ = [A, t](Index m) {
      Box b = A.hull_from(m);
      b.re_lo = std::min(b.re_lo, t);
      b.re_hi = std::min(b.re_hi, t);
      return b;
    };
    if (A.convergent_) {
      auto c = *A.convergent_;
      c.limit = std::min(c.limit.real(), t);
      out.convergent_ = c;
    }
    out.name_ = "clamp";
    return out;
  }

 private:
  struct Raw {};
  explicit DiagonalObservable(Raw) {}

  Rule rule_;
  long double bound_ = 0;
  SegmentFn segment_;
  HullFn hull_;
  std::optional<ConvergentTail> convergent_;
  Flags flags_;
  std::string name_;
};

}  // namespace dixmier
