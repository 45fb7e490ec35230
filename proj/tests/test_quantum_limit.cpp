#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dixmier/models.hpp"
#include "dixmier/quantum_limit.hpp"
#include "oracles.hpp"

using namespace dixmier;

namespace {

const DiagonalObservable kOne = DiagonalObservable::constant(1.0L);

DiagonalObservable shifted_inverse(long double d) {
  return DiagonalObservable::convergent([d](Index m) -> Complex { return d + 1.0L / m; }, d, 1.0L, 1.0L,
                                        std::abs(d) + 1.0L, {true, d >= 0.0L});
}

// 1.5 on [2^{2i}, 2^{2i+1}), 0.5 on [2^{2i+1}, 2^{2i+2}): equal log-lengths
DiagonalObservable dyadic_diagonal() {
  return DiagonalObservable::blocks(
      [](Index m) {
        const int b = std::ilogb(m);
        return DiagonalObservable::Piece{b % 2 == 0 ? 1.5L : 0.5L, std::ldexp(1.0L, b + 1)};
      },
      0.5L, 1.5L);
}

}  // namespace

TEST(Theta, Basics) {
  const auto I = theta(BoundedSequence::constant(1.0L));
  EXPECT_EQ(I(12345), Complex(1.0L));
  ASSERT_TRUE(I.constant_value().has_value());
  const auto c = theta(BoundedSequence::constant(-0.4L));
  EXPECT_EQ(c(7), Complex(-0.4L));
  EXPECT_EQ(c.bound(), 0.4L);
  const auto f = theta(BoundedSequence::finite({1, 2, 3}));
  EXPECT_EQ(f(3), Complex(3.0L));
  EXPECT_EQ(f(4), Complex(0.0L));
  EXPECT_EQ(f.bound(), 3.0L);
}

TEST(NormalizedIntegral, RequiresConvergedPositiveTrace) {
  EXPECT_THROW(NormalizedIntegral{trace_class_model(2.0L)}, IllPosed);
  EXPECT_THROW(NormalizedIntegral(harmonic_model(), LimitEstimate::make_band(0.5L, 1.5L, "band")), IllPosed);
  const NormalizedIntegral I(harmonic_model());
  EXPECT_NEAR(static_cast<double>(I.normalization().value), 1.0, 1e-3);
}

TEST(Phi, StateAxioms) {
  const NormalizedIntegral I(harmonic_model());
  const auto one = phi(kOne, I);
  ASSERT_TRUE(one.converged());
  EXPECT_NEAR(static_cast<double>(one.value), 1.0, 1e-12);

  const auto A = shifted_inverse(0.3L);
  const auto pa = phi(A, I);
  ASSERT_TRUE(pa.converged()) << pa.method;
  EXPECT_NEAR(static_cast<double>(pa.value), 0.3, 1e-3);
  EXPECT_GE(pa.lo, 0.0L);
  EXPECT_LE(pa.value, A.bound());

  const auto B = DiagonalObservable::constant(0.7L);
  const auto lin = phi(DiagonalObservable::linear(2.0L, A, -1.0L, B), I);
  EXPECT_NEAR(static_cast<double>(lin.value), static_cast<double>(2 * pa.value - phi(B, I).value),
              static_cast<double>(lin.error + 2 * pa.error + phi(B, I).error));
}

TEST(Phi, WeightedAverageOracle) {
  const auto T = harmonic_model();
  const auto A = shifted_inverse(0.3L);
  ResidueOptions o;
  o.ks = {8, 512};
  const auto ca = residue_curve(A, T, o), c1 = residue_curve(kOne, T, o);
  EXPECT_NEAR(static_cast<double>(ca.points[0].value.real() / c1.points[0].value.real()), oracle::kWeightedAvg8, 1e-6);
  EXPECT_NEAR(static_cast<double>(ca.points[1].value.real() / c1.points[1].value.real()), oracle::kWeightedAvg512,
              1e-5);
}

TEST(Phi, VanishesOnFiniteSequences) {
  const NormalizedIntegral I(harmonic_model());
  const auto p = phi(theta(BoundedSequence::finite({5, -3, 2, 0.5L})), I);
  ASSERT_TRUE(p.converged());
  EXPECT_NEAR(static_cast<double>(p.value), 0.0, 1e-3);
}

TEST(Phi, EigenvalueIndependence) {
  const auto A = shifted_inverse(0.8L);
  const NormalizedIntegral H(harmonic_model()), Tor(torus_invsqrt_laplacian(1 << 16)), N(nct_inv_laplacian(512));
  const auto a = phi(A, H), b = phi(A, Tor), c = phi(A, N);
  ASSERT_TRUE(a.converged() && b.converged() && c.converged());
  EXPECT_NEAR(static_cast<double>(a.value), 0.8, 1e-2);
  EXPECT_NEAR(static_cast<double>(a.value), static_cast<double>(b.value), 1e-2);
  EXPECT_NEAR(static_cast<double>(a.value), static_cast<double>(c.value), 1e-2);
}

TEST(Structure, ConvergentDiagonal) {
  const NormalizedIntegral I(harmonic_model());
  const auto rep = structure_check(shifted_inverse(0.6L), I);
  EXPECT_TRUE(rep.both_converged);
  EXPECT_TRUE(rep.agreement) << static_cast<double>(*rep.difference);
  EXPECT_LE(*rep.difference, 1e-2L);
}

TEST(Structure, NcTorusElementIsExact) {
  std::mt19937_64 rng(11);
  const NormalizedIntegral I(nct_inv_laplacian(512));
  for (long double th : {0.1L, 0.5L}) {
    const auto a = random_element(rng, th);
    const auto rep = structure_check(nct_diag(a), I);
    const long double a00 = nct_tau0(a).real();
    EXPECT_NEAR(static_cast<double>(rep.phi.value), static_cast<double>(a00), 1e-12);
    EXPECT_NEAR(static_cast<double>(rep.diagonal_limit.value), static_cast<double>(a00), 1e-15);
    EXPECT_TRUE(rep.agreement);
  }
}

TEST(Structure, OscillatingDiagonalOnlyOverlaps) {
  ResidueOptions o;
  o.zeta.max_window = 1e4000L;
  const NormalizedIntegral I(harmonic_model(), o);
  const auto rep = structure_check(dyadic_diagonal(), I);
  EXPECT_FALSE(rep.both_converged);
  EXPECT_FALSE(rep.agreement);
  EXPECT_TRUE(rep.overlap);
  EXPECT_FALSE(rep.diagonal_limit.converged());
  EXPECT_GE(rep.diagonal_limit.width(), 0.1L);
}
