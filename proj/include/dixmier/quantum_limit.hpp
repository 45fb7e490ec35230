#pragma once

// The normalized noncommutative integral phi(A) = Tr(AT)/Tr(T) and its
// eigenvector form: for a diagonal observable, phi(A) is a generalized limit
// of the vector states <h_m, A h_m>.  structure_check computes both sides.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dixmier/eigenvalue_sequence.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/residue.hpp"

namespace dixmier {

/// |a_k - limit| <= c k^{-alpha} for k >= from.
struct SequenceRate {
  long double limit;
  long double c;
  long double alpha;
  std::uint64_t from = 1;
};

/// theta(a) = sum_k a_k P_k, seen through its diagonal.  Constants and
/// finitely supported sequences map to exact observables; a declared rate
/// gives a certified tail; anything else is only bounded.
inline DiagonalObservable theta(const BoundedSequence& a, std::optional<SequenceRate> rate = std::nullopt,
                                bool nonneg = false) {
  if (const auto& c = a.known_constant()) return DiagonalObservable::constant(*c).named("theta");
  if (a.zero_from()) {
    const std::uint64_t n = *a.zero_from() - 1;
    if (n > (1ULL << 26)) throw DomainError("theta: finite support too long to tabulate");
    std::vector<Complex> v;
    v.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k) v.emplace_back(a(k));
    return DiagonalObservable::finite(std::move(v)).named("theta");
  }
  auto rule = [a](Index m) -> Complex { return a(static_cast<std::uint64_t>(m)); };
  if (rate) {
    return DiagonalObservable::convergent(rule, rate->limit, rate->c, rate->alpha, a.bound(), {true, nonneg},
                                          static_cast<Index>(rate->from))
        .named("theta");
  }
  return DiagonalObservable::from_rule(rule, a.bound(), {true, nonneg}).named("theta");
}

/// Base operator T with a converged, positive Tr(T).
class NormalizedIntegral {
 public:
  explicit NormalizedIntegral(EigenvalueSequence T, ResidueOptions opts = {})
      : T_(std::move(T)), opts_(std::move(opts)) {
    norm_ = dixmier_residue(DiagonalObservable::constant(1.0L), T_, opts_);
    validate();
  }
  NormalizedIntegral(EigenvalueSequence T, LimitEstimate normalization, ResidueOptions opts = {})
      : T_(std::move(T)), opts_(std::move(opts)), norm_(std::move(normalization)) {
    validate();
  }

  [[nodiscard]] const EigenvalueSequence& base() const { return T_; }
  [[nodiscard]] const LimitEstimate& normalization() const { return norm_; }
  [[nodiscard]] const ResidueOptions& options() const { return opts_; }

 private:
  void validate() const {
    if (!norm_.converged() || !(norm_.value - norm_.error > 0.0L)) {
      throw IllPosed("ill-posed normalized integral: Tr(T) is not a converged positive value (" + norm_.method + ")");
    }
  }

  EigenvalueSequence T_;
  ResidueOptions opts_;
  LimitEstimate norm_;
};

/// Divide an estimate by a normalization d +/- e (d - e > 0), widening by
/// the worst case over the normalization interval.
inline LimitEstimate divide_estimate(const LimitEstimate& r, const LimitEstimate& norm) {
  const long double d = norm.value, e = norm.error;
  LimitEstimate out = r.divided(d);
  const long double mag = std::max(std::abs(r.lo), std::abs(r.hi));
  const long double widen = mag * e / (d * (d - e));
  out.lo -= widen;
  out.hi += widen;
  out.error += widen;
  return out;
}

inline LimitEstimate phi(const DiagonalObservable& A, const NormalizedIntegral& I) {
  LimitEstimate out = divide_estimate(dixmier_residue(A, I.base(), I.options()), I.normalization());
  if (A.is_nonneg()) {
    out.lo = std::max(out.lo, 0.0L);
    out.value = std::max(out.value, 0.0L);
  }
  return out;
}

struct StructureReport {
  LimitEstimate phi;             // weighted side: residue route over Tr(T)
  LimitEstimate diagonal_limit;  // unweighted side: the diagonal sequence itself
  bool both_converged = false;
  std::optional<long double> difference;  // when both converge
  long double tolerance = 0;              // phi.error + diagonal_limit.error
  bool agreement = false;                 // both converge and agree within tolerance
  bool overlap = false;
};

inline EvaluationPlan default_diagonal_plan() { return EvaluationPlan::geometric(1024, 1ULL << 22, 2.0L); }

inline StructureReport structure_check(const DiagonalObservable& A, const NormalizedIntegral& I,
                                       const EvaluationPlan& plan = default_diagonal_plan()) {
  StructureReport rep;
  rep.phi = phi(A, I);
  BoundedSequence d([A](std::uint64_t m) { return A(static_cast<Index>(m)).real(); }, A.bound());
  rep.diagonal_limit = limit_estimate(d, plan);
  rep.both_converged = rep.phi.converged() && rep.diagonal_limit.converged();
  rep.tolerance = rep.phi.error + rep.diagonal_limit.error;
  rep.overlap = rep.phi.overlaps(rep.diagonal_limit);
  if (rep.both_converged) {
    rep.difference = std::abs(rep.phi.value - rep.diagonal_limit.value);
    rep.agreement = *rep.difference <= rep.tolerance;
  }
  return rep;
}

}  // namespace dixmier
