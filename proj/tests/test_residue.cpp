#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dixmier/models.hpp"
#include "dixmier/residue.hpp"
#include "oracles.hpp"

using namespace dixmier;

namespace {

const DiagonalObservable kOne = DiagonalObservable::constant(1.0L);

MeasurabilityOptions block_options() {
  MeasurabilityOptions o;
  o.log.ladder = log_geometric_ladder(4.0L, 10000.0L, std::pow(2.0L, 0.25L));
  return o;
}

// 1 + 1/m: nonnegative, converges to 1 at rate 1/m
DiagonalObservable one_plus_inverse() {
  return DiagonalObservable::convergent([](Index m) -> Complex { return 1.0L + 1.0L / m; }, 1.0L, 1.0L, 1.0L, 2.0L,
                                        {true, true});
}

ResidueCurve curve_from(const std::vector<std::pair<long double, long double>>& kv, long double err = 0) {
  ResidueCurve c;
  for (auto [k, v] : kv) c.points.push_back({k, 1.0L + 1.0L / k, v, err});
  return c;
}

}  // namespace

TEST(ResidueCurve, HarmonicPoint) {
  ResidueOptions o;
  o.ks = {100};
  const auto c = residue_curve(kOne, harmonic_model(), o);
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_NEAR(static_cast<double>(c.points[0].value.real()), oracle::kZeta101Over100, 1e-12);
  EXPECT_LE(c.points[0].error, 1e-3L);
}

TEST(ResidueCurve, ZeroAndTraceClass) {
  const auto z = residue_curve(DiagonalObservable::constant(0.0L), harmonic_model());
  for (const auto& p : z.points) EXPECT_EQ(p.value, Complex(0.0L));
  const auto t = residue_curve(kOne, trace_class_model(2.0L));
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    EXPECT_GT(t.points[i].s, 1.0L);
    EXPECT_LT(t.points[i].s, t.points[i - 1].s);
    EXPECT_LT(t.points[i].value.real(), t.points[i - 1].value.real());
  }
  // (1/512) zeta(2 + 2/512) ~ zeta(2)/512
  EXPECT_NEAR(static_cast<double>(t.points.back().value.real()), oracle::kZeta2 / 512, 2e-5);
}

TEST(Richardson, ZetaNearOne) {
  const auto c = curve_from({{100, oracle::kZeta101Over100}, {200, oracle::kHZeta1p005}, {500, oracle::kHZeta1p002}});
  const auto e = richardson_extrapolate(c, 2);
  EXPECT_TRUE(e.reliable) << e.reason;
  EXPECT_NEAR(static_cast<double>(e.value), 1.0, 1e-3);
  EXPECT_LE(e.error, 1e-3L);
}

TEST(Richardson, ConstantCurveHasZeroError) {
  const auto c = curve_from({{8, 0.7L}, {16, 0.7L}, {32, 0.7L}, {64, 0.7L}, {128, 0.7L}});
  const auto e = richardson_extrapolate(c, 2);
  EXPECT_TRUE(e.reliable);
  EXPECT_NEAR(static_cast<double>(e.value), 0.7, 1e-15);
  EXPECT_EQ(e.error, 0.0L);
}

TEST(Richardson, OscillationIsUnreliable) {
  std::vector<std::pair<long double, long double>> kv;
  for (long double k : {8.0L, 16.0L, 32.0L, 64.0L, 128.0L, 256.0L, 512.0L}) {
    const long double h = 1.0L / k;
    kv.push_back({k, 1.0L + 0.577L * h + 0.05L * std::sin(2.0L * std::numbers::pi_v<long double> * std::log2(h) / 3.0L)});
  }
  const auto e = richardson_extrapolate(curve_from(kv), 2);
  EXPECT_FALSE(e.reliable);
  EXPECT_FALSE(e.reason.empty());
  EXPECT_THROW((void)richardson_extrapolate(curve_from({{8, 1}, {16, 1}}), 2), DomainError);
}

TEST(DixmierResidue, Harmonic) {
  const auto r = dixmier_residue(kOne, harmonic_model());
  ASSERT_TRUE(r.converged()) << r.method;
  EXPECT_NEAR(static_cast<double>(r.value), 1.0, 1e-3);
  EXPECT_LE(r.error, 1e-3L);
  // curve against the frozen oracle
  const auto c = residue_curve(kOne, harmonic_model());
  for (std::size_t i = 0; i < c.points.size(); ++i)
    EXPECT_NEAR(static_cast<double>(c.points[i].value.real()), oracle::kHarmonicResidue[i], 1e-10);
}

TEST(DixmierResidue, TraceClassVanishes) {
  for (long double p : {2.0L, 1.5L}) {
    const auto r = dixmier_residue(kOne, trace_class_model(p));
    ASSERT_TRUE(r.converged()) << r.method;
    EXPECT_NEAR(static_cast<double>(r.value), 0.0, 1e-3);
    EXPECT_GE(r.lo, 0.0L);
  }
}

TEST(DixmierResidue, BlockLawBand) {
  const auto r = dixmier_residue(kOne, block_oscillating_model());
  EXPECT_FALSE(r.converged());
  EXPECT_GE(r.width(), 0.1L);
  EXPECT_GE(r.lo, 0.5L);
  EXPECT_LE(r.hi, 1.5L);
}

TEST(LogAverage, Harmonic) {
  const auto r = dixmier_log_average(kOne, harmonic_model());
  EXPECT_TRUE(r.converged()) << r.method;
  EXPECT_TRUE(r.contains(1.0L));
  EXPECT_LE(r.width(), 0.1L);
}

TEST(LogAverage, HomogeneityAndFiniteRank) {
  const auto T = torus_invsqrt_laplacian(1 << 12);
  const auto base = dixmier_log_average(kOne, T);
  const auto scaled = dixmier_log_average(DiagonalObservable::constant(0.25L), T);
  ASSERT_TRUE(base.converged());
  ASSERT_TRUE(scaled.converged());
  EXPECT_NEAR(static_cast<double>(scaled.value), 0.25 * static_cast<double>(base.value), 1e-15);
  EXPECT_NEAR(static_cast<double>(base.value), 2.0, 2e-3);

  const auto F = EigenvalueSequence::from_list({1.0L, 0.5L, 0.25L, 0.0L});
  const auto f = dixmier_log_average(kOne, F);
  EXPECT_TRUE(f.converged());
  EXPECT_EQ(f.value, 0.0L);
}

TEST(LogAverage, SignedDiagonalUnavailable) {
  EXPECT_THROW((void)dixmier_log_average(DiagonalObservable::constant(-1.0L), harmonic_model()), RouteUnavailable);
  EXPECT_THROW((void)dixmier_log_average(DiagonalObservable::constant(Complex(0, 1)), harmonic_model()),
               RouteUnavailable);
}

TEST(LogAverage, ResortedWindow) {
  // (1 + 1/m)/m stays decreasing; both routes give 1
  LogAverageOptions o;
  o.ladder.clear();
  for (int e = 10; e <= 20; ++e) o.ladder.push_back(std::ldexp(1.0L, e));
  const auto l = dixmier_log_average(one_plus_inverse(), harmonic_model(), o);
  ASSERT_TRUE(l.converged()) << l.method;
  EXPECT_NEAR(static_cast<double>(l.value), 1.0, 2e-3);
  const auto r = dixmier_residue(one_plus_inverse(), harmonic_model());
  ASSERT_TRUE(r.converged()) << r.method;
  EXPECT_NEAR(static_cast<double>(r.value), 1.0, 2e-3);
  EXPECT_TRUE(l.overlaps(r));
}

TEST(Measurability, Harmonic) {
  const auto rep = measurability_diagnostic(kOne, harmonic_model());
  EXPECT_EQ(rep.verdict, Verdict::measurable) << rep.note;
  EXPECT_NEAR(static_cast<double>(rep.value), 1.0, 1e-3);
  ASSERT_TRUE(rep.agreement.has_value());
  EXPECT_LE(*rep.agreement, 1e-2L);
}

TEST(Measurability, Torus) {
  const auto rep = measurability_diagnostic(kOne, torus_invsqrt_laplacian(1 << 16));
  EXPECT_EQ(rep.verdict, Verdict::measurable) << rep.note;
  EXPECT_NEAR(static_cast<double>(rep.value), 2.0, 1e-3);
}

TEST(Measurability, BlockLawIsNotMeasurable) {
  const auto rep = measurability_diagnostic(kOne, block_oscillating_model(), block_options());
  EXPECT_EQ(rep.verdict, Verdict::non_measurable) << rep.note;
  ASSERT_TRUE(rep.log.has_value());
  const auto& r = rep.residue.estimate;
  const auto& l = rep.log->estimate;
  EXPECT_GE(r.width(), 0.1L);
  EXPECT_GE(l.width(), 0.1L);
  EXPECT_TRUE(r.overlaps(l));
}

TEST(Measurability, ResidueOnlyForSignedDiagonal) {
  const auto A = DiagonalObservable::constant(-2.0L);
  const auto rep = measurability_diagnostic(A, harmonic_model());
  EXPECT_FALSE(rep.log.has_value());
  EXPECT_EQ(rep.verdict, Verdict::measurable);
  EXPECT_NEAR(static_cast<double>(rep.value), -2.0, 1e-3);
}

TEST(ResidueProperties, ScaleLinearityPositivity) {
  const auto T = harmonic_model();
  const auto T3 = T.scaled(3.0L);
  const auto r1 = dixmier_residue(kOne, T), r3 = dixmier_residue(kOne, T3);
  const auto l1 = dixmier_log_average(kOne, T), l3 = dixmier_log_average(kOne, T3);
  EXPECT_NEAR(static_cast<double>(r3.value), 3 * static_cast<double>(r1.value), 3e-3);
  EXPECT_NEAR(static_cast<double>(l3.value), 3 * static_cast<double>(l1.value), 1e-12);

  const auto A = one_plus_inverse();
  const auto B = DiagonalObservable::constant(0.5L);
  const auto sum = DiagonalObservable::linear(2.0L, A, -3.0L, B);
  const auto ra = dixmier_residue(A, T), rb = dixmier_residue(B, T), rs = dixmier_residue(sum, T);
  EXPECT_NEAR(static_cast<double>(rs.value), static_cast<double>(2 * ra.value - 3 * rb.value),
              static_cast<double>(2 * ra.error + 3 * rb.error + rs.error));

  for (const auto& r : {r1, r3, ra, rb}) EXPECT_GE(r.lo, 0.0L);
}

TEST(ResidueProperties, LadderEnlargementKeepsBand) {
  const auto T = harmonic_model();
  LogAverageOptions small;
  for (int e = 10; e <= 18; ++e) small.ladder.push_back(std::ldexp(1.0L, e));
  const auto a = log_average_route(kOne, T, small);
  const auto b = log_average_route(kOne, T);
  EXPECT_LE(b.estimate.width(), a.estimate.width() + 2 * b.budget + 1e-15L);
  EXPECT_TRUE(a.estimate.overlaps(b.estimate));
}

TEST(SpectralMeasurability, IdentityAndProjection) {
  // projection onto the first 100 eigenvectors: finite rank, trace 0
  std::vector<Complex> p(100, 1.0L);
  const auto res = spectral_measurability(harmonic_model(), {DiagonalObservable::finite(p)});
  ASSERT_EQ(res.reports.size(), 2u);
  EXPECT_TRUE(res.measurable_on_family);
  EXPECT_NEAR(static_cast<double>(res.reports[1].value), 0.0, 1e-3);
}

TEST(BlockLaw, MatchesIndependentOracle) {
  const auto T = block_oscillating_model();
  const auto c = residue_curve(kOne, T);
  for (std::size_t i = 0; i < c.points.size(); ++i)
    EXPECT_NEAR(static_cast<double>(c.points[i].value.real()), oracle::kBlockResidue[i], 1e-8);
  for (auto [L, g] : oracle::kBlockGamma) {
    const Index N = std::floor(std::exp(static_cast<long double>(L)));
    EXPECT_NEAR(static_cast<double>(log_average(T, N)), g, 1e-8) << "L=" << L;
  }
  // every observed gamma lies in the log-route band
  const auto l = dixmier_log_average(kOne, T, block_options().log);
  for (auto [L, g] : oracle::kBlockGamma) EXPECT_TRUE(l.contains(g)) << "L=" << L;
}

TEST(NcTorusResidue, CurveAndExtrapolation) {
  const auto T = nct_inv_laplacian(1024);
  const auto r = residue_route(kOne, T);
  for (std::size_t i = 0; i < r.curve.points.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(r.curve.points[i].value.real()), oracle::kNcTorusResidue[i],
                static_cast<double>(r.curve.points[i].error) + 1e-10);
  }
  ASSERT_TRUE(r.estimate.converged());
  EXPECT_NEAR(static_cast<double>(r.estimate.value), std::numbers::pi, static_cast<double>(r.estimate.error));
}
