#pragma once

// Domination of eigenvector profiles and monotone convergence of the
// normalized integral along increasing chains.
//
// Two witness encodings:
//   grid     |h_m|^2 sampled on a common grid (multiplication algebras);
//            dominated iff |h_m|^2 <= |h|^2 + tol pointwise.
//   fourier  vectors h_{m,n} = u^m v^n of the rotation algebra tested against
//            a family of (approximate) projections P: |P h_{m,n}| <= |P h|.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/models.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/quantum_limit.hpp"

namespace dixmier {

struct GridProfile {
  std::int64_t m;
  std::vector<long double> density;  // |h_m|^2 on the grid
};

struct GridFamily {
  std::vector<long double> grid;
  std::vector<long double> weights;  // quadrature weights, same length as grid
  std::vector<GridProfile> profiles;
  std::vector<long double> dominator;  // |h|^2
};

struct FourierFamily {
  long double theta = 0;
  std::vector<FourierElement> projections;
  std::vector<LatticePoint> vectors;
  LatticePoint reference{0, 0};
};

struct DominationWitness {
  std::variant<GridFamily, FourierFamily> family;
  long double tolerance = 1e-12;
};

struct DominationResult {
  bool dominated = true;
  std::int64_t m = 0;         // first violating profile (grid) or vector index (fourier)
  std::string location;       // where it fails
  long double excess = 0;     // largest |h_m|^2 - |h|^2 (or |Ph_m|^2 - |Ph|^2) seen
  long double max_defect = 0; // fourier: largest idempotency defect among the projections
};

namespace detail {

inline void validate_grid(const GridFamily& g) {
  const std::size_t n = g.grid.size();
  if (n == 0) throw IncomparableProfiles("empty grid");
  if (g.weights.size() != n || g.dominator.size() != n) {
    throw IncomparableProfiles("weights and dominator must be sampled on the profile grid");
  }
  long double mass = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(g.dominator[i] >= 0.0L) || !(g.weights[i] >= 0.0L)) throw DomainError("profiles must be nonnegative");
    mass += g.weights[i] * g.dominator[i];
  }
  if (!std::isfinite(mass)) throw DomainError("dominator has infinite mass on the grid");
  for (const auto& p : g.profiles) {
    if (p.density.size() != n) {
      throw IncomparableProfiles("profile " + std::to_string(p.m) + " is sampled on a different grid");
    }
    for (long double v : p.density) {
      if (!(v >= 0.0L)) throw DomainError("profile " + std::to_string(p.m) + " has a negative density");
    }
  }
}

inline DominationResult check_grid(const GridFamily& g, long double tol) {
  validate_grid(g);
  DominationResult r;
  r.excess = -std::numeric_limits<long double>::infinity();
  for (const auto& p : g.profiles) {
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
      const long double ex = p.density[i] - g.dominator[i];
      r.excess = std::max(r.excess, ex);
      if (r.dominated && ex > tol) {
        r.dominated = false;
        r.m = p.m;
        std::ostringstream loc;
        loc << "x=" << static_cast<double>(g.grid[i]);
        r.location = loc.str();
      }
    }
  }
  return r;
}

inline DominationResult check_fourier(const FourierFamily& f, long double tol) {
  DominationResult r;
  r.excess = -std::numeric_limits<long double>::infinity();
  for (std::size_t j = 0; j < f.projections.size(); ++j) {
    const FourierElement& P = f.projections[j];
    if (P.theta() != f.theta) throw ThetaMismatch("projection " + std::to_string(j) + " has a different theta");
    r.max_defect = std::max(r.max_defect, idempotency_defect(P));
    const long double ref = nct_vector_norm2(P, f.reference.first, f.reference.second);
    for (std::size_t i = 0; i < f.vectors.size(); ++i) {
      const long double v = nct_vector_norm2(P, f.vectors[i].first, f.vectors[i].second);
      const long double ex = v - ref;
      r.excess = std::max(r.excess, ex);
      if (r.dominated && ex > tol * std::max(1.0L, ref)) {
        r.dominated = false;
        r.m = static_cast<std::int64_t>(i);
        std::ostringstream loc;
        loc << "projection " << j << " at (" << f.vectors[i].first << "," << f.vectors[i].second << ")";
        r.location = loc.str();
      }
    }
  }
  return r;
}

}  // namespace detail

inline DominationResult dominated_check(const DominationWitness& w) {
  if (const auto* g = std::get_if<GridFamily>(&w.family)) return detail::check_grid(*g, w.tolerance);
  return detail::check_fourier(std::get<FourierFamily>(w.family), w.tolerance);
}

/// int g |h_m|^2 on the grid: <h_m, M_g h_m>.
inline long double profile_expectation(const std::vector<long double>& g, const std::vector<long double>& density,
                                       const std::vector<long double>& weights) {
  if (g.size() != density.size() || g.size() != weights.size()) {
    throw IncomparableProfiles("function, density and weights must share the grid");
  }
  CompensatedSum<long double> s;
  for (std::size_t i = 0; i < g.size(); ++i) s.add(g[i] * density[i] * weights[i]);
  return s.value();
}

// ---------------------------------------------------------------------------
// Witness builders

/// Midpoint grid on [-pi, pi) with weights 2pi/n.
inline std::pair<std::vector<long double>, std::vector<long double>> torus_grid(std::size_t n) {
  std::vector<long double> x(n), w(n, kTwoPi / static_cast<long double>(n));
  for (std::size_t i = 0; i < n; ++i) x[i] = -kTwoPi / 2 + kTwoPi * (static_cast<long double>(i) + 0.5L) / n;
  return {x, w};
}

/// Torus eigenfunctions f_m = e^{imx}/sqrt(2 pi) for the given modes,
/// dominated by h = f_0.
inline DominationWitness torus_witness(const std::vector<std::int64_t>& modes, std::size_t grid = 512,
                                       long double tol = 1e-12) {
  auto [x, w] = torus_grid(grid);
  GridFamily g;
  g.grid = x;
  g.weights = w;
  auto density = [&](std::int64_t m) {
    const TorusFunction f{{{m, 1.0L / std::sqrt(kTwoPi)}}};
    std::vector<long double> d;
    for (long double t : x) d.push_back(std::norm(f(t)));
    return d;
  };
  for (auto m : modes) g.profiles.push_back({m, density(m)});
  g.dominator = density(0);
  return {g, tol};
}

/// Rotation-algebra witness: approximate projections drawn at random arcs
/// of random monomial unitaries, tested on the given lattice vectors.
inline DominationWitness nc_torus_witness(std::mt19937_64& rng, long double theta, std::size_t n_projections,
                                          const std::vector<LatticePoint>& vectors, int fejer_order = 32,
                                          long double tol = 1e-12) {
  FourierFamily f;
  f.theta = theta;
  f.vectors = vectors;
  std::uniform_int_distribution<int> pq(-3, 3);
  std::uniform_real_distribution<long double> ang(0.0L, kTwoPi);
  while (f.projections.size() < n_projections) {
    const int p = pq(rng), q = pq(rng);
    if (p == 0 && q == 0) continue;
    long double a = ang(rng), b = ang(rng);
    if (a > b) std::swap(a, b);
    f.projections.push_back(approximate_projection(theta, p, q, a, b, fejer_order));
  }
  return {f, tol};
}

// ---------------------------------------------------------------------------
// Monotone convergence

struct MonotoneOptions {
  std::uint64_t dense_check = 10000;       // every m up to here
  std::uint64_t sparse_check = 1ULL << 30; // then geometric samples up to here
  long double tolerance = 1e-2;
};

struct MonotoneReport {
  std::vector<LimitEstimate> chain;  // phi(A_j)
  LimitEstimate limit;               // phi(A)
  long double sup = 0;               // sup_j phi(A_j)
  long double difference = 0;        // |sup - phi(A)|
  bool decidable = false;            // every estimate converged
  bool equal = false;                // decidable and difference within tolerance + errors
};

namespace detail {

inline std::vector<Index> chain_sample_points(const MonotoneOptions& o) {
  std::vector<Index> pts;
  for (std::uint64_t m = 1; m <= o.dense_check; ++m) pts.push_back(static_cast<Index>(m));
  for (long double m = static_cast<long double>(o.dense_check) * 1.1L; m <= static_cast<long double>(o.sparse_check);
       m *= 1.1L)
    pts.push_back(std::floor(m));
  return pts;
}

}  // namespace detail

/// chain must increase pointwise with supremum A.  Equality
/// sup_j phi(A_j) = phi(A) is asserted only when every estimate converged.
inline MonotoneReport monotone_convergence_check(const NormalizedIntegral& I,
                                                 const std::vector<DiagonalObservable>& chain,
                                                 const DiagonalObservable& A, const MonotoneOptions& opts = {}) {
  if (chain.empty()) throw DomainError("monotone chain is empty");
  const auto pts = detail::chain_sample_points(opts);
  constexpr long double slack = 1e-15L;
  for (Index m : pts) {
    long double prev = 0.0L;
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const Complex v = chain[j](m);
      if (v.imag() != 0.0L || v.real() < 0.0L) {
        throw NonMonotoneChain("chain element " + std::to_string(j) + " is not nonnegative at m=" +
                               std::to_string(static_cast<double>(m)));
      }
      if (j > 0 && v.real() < prev - slack) {
        throw NonMonotoneChain("chain decreases between elements " + std::to_string(j - 1) + " and " +
                               std::to_string(j) + " at m=" + std::to_string(static_cast<double>(m)));
      }
      prev = v.real();
    }
    if (A(m).real() < prev - slack) {
      throw NonMonotoneChain("last chain element exceeds the supremum at m=" + std::to_string(static_cast<double>(m)));
    }
  }
  MonotoneReport rep;
  rep.decidable = true;
  rep.sup = -std::numeric_limits<long double>::infinity();
  long double sup_err = 0.0L;
  for (const auto& Aj : chain) {
    rep.chain.push_back(phi(Aj, I));
    rep.decidable = rep.decidable && rep.chain.back().converged();
    if (rep.chain.back().value > rep.sup) {
      rep.sup = rep.chain.back().value;
      sup_err = rep.chain.back().error;
    }
  }
  rep.limit = phi(A, I);
  rep.decidable = rep.decidable && rep.limit.converged();
  rep.difference = std::abs(rep.sup - rep.limit.value);
  rep.equal = rep.decidable && rep.difference <= opts.tolerance + sup_err + rep.limit.error;
  return rep;
}

/// A_j = min(A, t_j) for increasing thresholds.
inline std::vector<DiagonalObservable> threshold_chain(const DiagonalObservable& A,
                                                       const std::vector<long double>& thresholds) {
  std::vector<DiagonalObservable> out;
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    if (j > 0 && thresholds[j] < thresholds[j - 1]) throw NonMonotoneChain("thresholds must increase");
    out.push_back(DiagonalObservable::clamp_above(A, thresholds[j]));
  }
  return out;
}

}  // namespace dixmier
