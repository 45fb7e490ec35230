#pragma once

// Closed-form singular-value laws.  A law is a contiguous list of pieces,
// each of which is one of
//   power     mu_n = c * n^{-p}
//   stepped   mu_n = c * ceil(n / r)^{-p}      (each value repeated r times)
//   constant  mu_n = c
// over a half-open index range [start, end).  Indices are long double so a
// law can be queried at astronomically large n; explicit data never needs
// more than uint64.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/summation.hpp"

namespace dixmier {

using Index = long double;

inline constexpr Index kInfiniteIndex = std::numeric_limits<Index>::infinity();

struct PowerPiece {
  long double c;
  long double p;
};

struct SteppedPiece {
  long double c;
  long double p;
  long double multiplicity;
};

struct ConstantPiece {
  long double c;
};

using PieceLaw = std::variant<PowerPiece, SteppedPiece, ConstantPiece>;

struct LawPiece {
  Index start;  // inclusive
  Index end;    // exclusive, may be infinite
  PieceLaw law;

  [[nodiscard]] long double value(Index n) const {
    return std::visit(
        [n](const auto& l) -> long double {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, PowerPiece>) {
            return l.c * std::exp(-l.p * std::log(n));
          } else if constexpr (std::is_same_v<L, SteppedPiece>) {
            return l.c * std::exp(-l.p * std::log(std::ceil(n / l.multiplicity)));
          } else {
            return l.c;
          }
        },
        law);
  }

  /// Decay exponent of the piece (0 for constants).
  [[nodiscard]] long double exponent() const {
    return std::visit(
        [](const auto& l) -> long double {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, ConstantPiece>) {
            return 0.0L;
          } else {
            return l.p;
          }
        },
        law);
  }

  /// sum_{n=a}^{b} mu_n^s with [a, b] inside [start, end).
  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const {
    if (b < a) return {};
    return std::visit(
        [&](const auto& l) -> BoundedSum {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, PowerPiece>) {
            return std::pow(l.c, s) * dixmier::power_sum(l.p * s, a, b);
          } else if constexpr (std::is_same_v<L, SteppedPiece>) {
            const long double r = l.multiplicity;
            const long double cs = std::pow(l.c, s);
            const Index ja = std::ceil(a / r);
            const Index jb = std::isinf(b) ? kInfiniteIndex : std::ceil(b / r);
            auto term = [&](Index j) { return cs * std::exp(-l.p * s * std::log(j)); };
            if (ja == jb) return {(b - a + 1.0L) * term(ja), 0.0L};
            BoundedSum out{(ja * r - a + 1.0L) * term(ja), 0.0L};
            if (!std::isinf(jb)) out.value += (b - (jb - 1.0L) * r) * term(jb);
            const Index full_end = std::isinf(jb) ? kInfiniteIndex : jb - 1.0L;
            out += (r * cs) * dixmier::power_sum(l.p * s, ja + 1.0L, full_end);
            return out;
          } else {
            if (std::isinf(b)) throw DomainError("divergent tail: constant law piece");
            return {(b - a + 1.0L) * std::pow(l.c, s), 0.0L};
          }
        },
        law);
  }
};

/// Upper envelope mu_n <= c * n^{-p} used beyond a law's horizon.
struct PowerEnvelope {
  long double c;
  long double p;

  [[nodiscard]] long double operator()(Index n) const { return c * std::exp(-p * std::log(n)); }
};

/// Contiguous sequence of law pieces.  Beyond the last finite piece an
/// optional envelope bounds the values; sums there are reported as the
/// midpoint of [0, envelope sum] with half-width error.
class PiecewiseLaw {
 public:
  PiecewiseLaw() = default;

  PiecewiseLaw(std::vector<LawPiece> pieces, std::optional<PowerEnvelope> beyond = std::nullopt)
      : pieces_(std::move(pieces)), beyond_(beyond) {
    if (pieces_.empty()) throw InvalidSpectralData("law has no pieces");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& pc = pieces_[i];
      if (!(pc.start >= 1.0L) || !(pc.end > pc.start)) {
        throw InvalidSpectralData("law piece has an empty or invalid index range");
      }
      if (!(pc.value(pc.start) > 0.0L)) {
        throw InvalidSpectralData("law values must be strictly positive");
      }
      if (pc.exponent() < 0.0L) throw InvalidSpectralData("law piece increases");
      if (i + 1 < pieces_.size()) {
        const auto& next = pieces_[i + 1];
        if (next.start != pc.end) throw InvalidSpectralData("law pieces are not contiguous");
        const long double before = pc.value(pc.end - 1.0L);
        const long double after = next.value(next.start);
        if (after > before * (1.0L + 1e-12L)) {
          throw InvalidSpectralData("law is not nonincreasing at a piece boundary");
        }
      }
    }
    if (!std::isinf(horizon()) && !beyond_) {
      throw InvalidSpectralData("finite law horizon needs an envelope beyond it");
    }
  }

  [[nodiscard]] Index start() const { return pieces_.front().start; }
  [[nodiscard]] Index horizon() const { return pieces_.back().end; }
  [[nodiscard]] const std::vector<LawPiece>& pieces() const { return pieces_; }
  [[nodiscard]] const std::optional<PowerEnvelope>& beyond() const { return beyond_; }

  /// Smallest decay exponent among pieces that reach infinity.
  [[nodiscard]] long double tail_exponent() const {
    if (std::isinf(horizon())) return pieces_.back().exponent();
    return beyond_->p;
  }

  [[nodiscard]] bool exact_at(Index n) const { return n >= start() && n < horizon(); }

  [[nodiscard]] long double value(Index n) const {
    const auto& pc = locate(n);
    return pc.value(n);
  }

  /// Upper bound on mu_n, valid everywhere in the law's domain.
  [[nodiscard]] long double envelope(Index n) const {
    if (n < horizon()) return value(n);
    return (*beyond_)(n);
  }

  [[nodiscard]] BoundedSum power_sum(long double s, Index a, Index b) const {
    BoundedSum out;
    if (b < a) return out;
    if (a < start()) throw DomainError("law queried below its start index");
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), a,
                               [](Index v, const LawPiece& pc) { return v < pc.start; });
    --it;
    for (; it != pieces_.end() && it->start <= b; ++it) {
      const Index lo = std::max(a, it->start);
      const Index hi = std::min(b, it->end - 1.0L);
      if (hi >= lo) out += it->power_sum(s, lo, hi);
    }
    if (!std::isinf(horizon()) && b >= horizon()) {
      const Index lo = std::max(a, horizon());
      const BoundedSum env = std::pow(beyond_->c, s) * dixmier::power_sum(beyond_->p * s, lo, b);
      out.value += 0.5L * env.value;
      out.error += 0.5L * env.value + env.error;
    }
    return out;
  }

 private:
  [[nodiscard]] const LawPiece& locate(Index n) const {
    if (!exact_at(n)) {
      throw InsufficientSpectralData("index outside the exact range of the law");
    }
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), n,
                               [](Index v, const LawPiece& pc) { return v < pc.start; });
    return *std::prev(it);
  }

  std::vector<LawPiece> pieces_;
  std::optional<PowerEnvelope> beyond_;
};

/// mu_n = c n^{-p} for all n >= start.
inline PiecewiseLaw power_law(long double c, long double p, Index start = 1) {
  return PiecewiseLaw({LawPiece{start, kInfiniteIndex, PowerPiece{c, p}}});
}

/// mu_n = c * ceil(n / r)^{-p} for all n >= start.
inline PiecewiseLaw stepped_power_law(long double c, long double p, long double r,
                                      Index start = 1) {
  return PiecewiseLaw({LawPiece{start, kInfiniteIndex, SteppedPiece{c, p, r}}});
}

/// Multiplies every value of a law by c > 0.
inline PiecewiseLaw scale_law(const PiecewiseLaw& law, long double c) {
  std::vector<LawPiece> pieces = law.pieces();
  for (auto& pc : pieces) {
    std::visit([c](auto& l) { l.c *= c; }, pc.law);
  }
  std::optional<PowerEnvelope> beyond = law.beyond();
  if (beyond) beyond->c *= c;
  return PiecewiseLaw(std::move(pieces), beyond);
}

}  // namespace dixmier
