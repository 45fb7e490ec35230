#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dixmier/models.hpp"
#include "dixmier/normality.hpp"

using namespace dixmier;

namespace {

DiagonalObservable shifted_inverse(long double d) {
  return DiagonalObservable::convergent([d](Index m) -> Complex { return d + 1.0L / m; }, d, 1.0L, 1.0L,
                                        std::abs(d) + 1.0L, {true, d >= 0.0L});
}

// unit-mass bump of width 2pi/(8m) centred at 0: height 4m/pi
GridFamily spike_family(std::size_t n, int modes) {
  auto [x, w] = torus_grid(n);
  GridFamily g{x, w, {}, std::vector<long double>(n, 1.0L / kTwoPi)};
  for (int m = 1; m <= modes; ++m) {
    const long double half = kTwoPi / (16.0L * m);
    std::vector<long double> d(n, 0.0L);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(x[i]) < half) d[i] = 1.0L / (2 * half);
    g.profiles.push_back({m, d});
  }
  return g;
}

}  // namespace

TEST(Domination, TorusEigenfunctionsAreDominatedWithEquality) {
  const auto w = torus_witness({-7, -1, 1, 2, 5, 40});
  const auto r = dominated_check(w);
  EXPECT_TRUE(r.dominated);
  EXPECT_LT(std::abs(static_cast<double>(r.excess)), 1e-15);
}

TEST(Domination, SpikeCounterexample) {
  const auto r = dominated_check({spike_family(4096, 20), 1e-12L});
  ASSERT_FALSE(r.dominated);
  // first bump already exceeds 1/(2pi): 4/pi > 1/(2pi)
  EXPECT_EQ(r.m, 1);
  EXPECT_NE(r.location.find("x="), std::string::npos);
  EXPECT_GT(r.excess, 20 * 4 / 3.1416 - 1);
}

TEST(Domination, BadWitnessesAreRejected) {
  auto g = spike_family(256, 2);
  g.profiles[1].density.pop_back();
  EXPECT_THROW(dominated_check({g, 1e-12L}), IncomparableProfiles);
  auto h = spike_family(256, 2);
  h.weights.pop_back();
  EXPECT_THROW(dominated_check({h, 1e-12L}), IncomparableProfiles);
  auto neg = spike_family(256, 2);
  neg.profiles[0].density[3] = -1e-3L;
  EXPECT_THROW(dominated_check({neg, 1e-12L}), DomainError);
  EXPECT_THROW(dominated_check({GridFamily{}, 1e-12L}), IncomparableProfiles);
}

TEST(Domination, DominationBoundsExpectations) {
  // <f_m, M_g f_m> <= <h, M_g h> for every g >= 0 when dominated ...
  auto [x, w] = torus_grid(1024);
  std::vector<long double> g;
  for (long double t : x) g.push_back(1.0L + std::cos(t) + 0.5L * std::cos(3 * t) * std::cos(3 * t));
  const auto tw = torus_witness({1, 3, 9, 27}, 1024);
  const auto& fam = std::get<GridFamily>(tw.family);
  const long double hh = profile_expectation(g, fam.dominator, fam.weights);
  for (const auto& p : fam.profiles) EXPECT_LE(profile_expectation(g, p.density, fam.weights), hh + 1e-12L);
  // ... and the spike family breaks the bound for a g peaked at 0
  const auto sp = spike_family(1024, 8);
  for (const auto& p : sp.profiles) EXPECT_GT(profile_expectation(g, p.density, sp.weights), hh);
  EXPECT_THROW(profile_expectation(g, std::vector<long double>(3), sp.weights), IncomparableProfiles);
}

TEST(Domination, NcTorusProjectionsSeeEveryMonomialAlike) {
  std::vector<LatticePoint> vecs;
  for (std::uint64_t k = 1; k <= 81; ++k) vecs.push_back(cantor_enum(k));
  std::mt19937_64 rng(7);
  for (long double theta : {0.1L, (std::sqrt(5.0L) - 1) / 2, 0.5L}) {
    const auto w = nc_torus_witness(rng, theta, 6, vecs);
    const auto r = dominated_check(w);
    EXPECT_TRUE(r.dominated) << "theta=" << static_cast<double>(theta) << " " << r.location;
    EXPECT_LT(r.excess, 1e-12L);
    // Fejer-smoothed arcs are only approximately idempotent
    EXPECT_LT(r.max_defect, 0.2L);
    // |P u^m v^n|^2 = sum |coefficients|^2, independent of (m, n)
    for (const auto& P : std::get<FourierFamily>(w.family).projections) {
      long double s = 0;
      for (const auto& [mn, c] : P.coeffs()) s += std::norm(c);
      EXPECT_NEAR(static_cast<double>(nct_vector_norm2(P, 5, -3)), static_cast<double>(s), 1e-12);
    }
  }
}

TEST(Domination, NcTorusThetaMismatch) {
  std::mt19937_64 rng(1);
  auto w = nc_torus_witness(rng, 0.1L, 2, {{1, 0}});
  std::get<FourierFamily>(w.family).projections.push_back(approximate_projection(0.2L, 1, 0, 0.0L, 1.0L, 8));
  EXPECT_THROW(dominated_check(w), ThetaMismatch);
}

TEST(MonotoneConvergence, ThresholdChainReachesTheLimit) {
  const NormalizedIntegral I(harmonic_model());
  const auto A = shifted_inverse(0.6L);
  const auto chain = threshold_chain(A, {0.2L, 0.4L, 0.5L, 0.7L, 1.0L, 2.0L});
  const auto rep = monotone_convergence_check(I, chain, A);
  ASSERT_TRUE(rep.decidable);
  EXPECT_TRUE(rep.equal) << static_cast<double>(rep.difference);
  EXPECT_NEAR(static_cast<double>(rep.chain[0].value), 0.2, 1e-3);
  EXPECT_NEAR(static_cast<double>(rep.chain[1].value), 0.4, 1e-3);
  EXPECT_NEAR(static_cast<double>(rep.limit.value), 0.6, 1e-2);
  EXPECT_NEAR(static_cast<double>(rep.sup), 0.6, 1e-2);
}

TEST(MonotoneConvergence, RejectsChainsThatAreNotIncreasing) {
  const NormalizedIntegral I(harmonic_model());
  const auto A = shifted_inverse(0.6L);
  auto chain = threshold_chain(A, {0.2L, 0.4L});
  std::swap(chain[0], chain[1]);
  EXPECT_THROW(monotone_convergence_check(I, chain, A), NonMonotoneChain);
  EXPECT_THROW(threshold_chain(A, {0.4L, 0.2L}), NonMonotoneChain);
  // chain element above the claimed supremum
  EXPECT_THROW(monotone_convergence_check(I, {shifted_inverse(0.7L)}, A), NonMonotoneChain);
  EXPECT_THROW(monotone_convergence_check(I, {shifted_inverse(-0.1L)}, A), NonMonotoneChain);
  EXPECT_THROW(monotone_convergence_check(I, {}, A), DomainError);
}

// Cutting the diagonal off at index N_j increases to A, but every cut has
// value 0: the diagonal algebra has no dominating vector.
TEST(MonotoneConvergence, IndexTruncationsDoNotConverge) {
  const NormalizedIntegral I(harmonic_model());
  const auto A = shifted_inverse(0.6L);
  std::vector<DiagonalObservable> chain;
  for (std::size_t n : {10, 100, 1000}) {
    std::vector<Complex> v;
    for (std::size_t m = 1; m <= n; ++m) v.emplace_back(0.6L + 1.0L / m);
    chain.push_back(DiagonalObservable::finite(v));
  }
  const auto rep = monotone_convergence_check(I, chain, A);
  ASSERT_TRUE(rep.decidable);
  EXPECT_FALSE(rep.equal);
  EXPECT_NEAR(static_cast<double>(rep.sup), 0.0, 1e-6);
  EXPECT_NEAR(static_cast<double>(rep.difference), 0.6, 1e-2);
}
