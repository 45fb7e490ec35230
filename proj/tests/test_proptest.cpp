#include <gtest/gtest.h>

#include "dixmier/proptest.hpp"

using namespace dixmier;

namespace {

LemmaSuiteOptions small_lemmas() {
  LemmaSuiteOptions o;
  o.trivial_fact_cases = 500;
  o.vanishing_cases = 10;
  o.invariance_cases = 4;
  o.random_laws = 2;
  o.calL_k_max = 10;
  return o;
}

AlgebraSuiteOptions small_algebra() {
  AlgebraSuiteOptions o;
  o.elements = 60;
  return o;
}

}  // namespace

TEST(Proptest, LemmaSuitePassesOnASmallBudget) {
  const auto r = run_lemma_suite(11, small_lemmas());
  EXPECT_EQ(r.properties.size(), 5u);
  for (const auto& p : r.properties) EXPECT_TRUE(p.passed()) << p.name << ": " << p.counterexample;
  EXPECT_EQ(r.properties[0].cases, 500u);
}

TEST(Proptest, AlgebraSuitePassesAndIsSeedDeterministic) {
  const auto a = run_algebra_suite(3, small_algebra());
  const auto b = run_algebra_suite(3, small_algebra());
  EXPECT_TRUE(a.passed());
  EXPECT_EQ(format_report(a), format_report(b));
  EXPECT_EQ(a.properties.size(), 5u);
  EXPECT_EQ(a.properties[0].cases, 180u);
}

TEST(Proptest, FailuresCarryTheFirstCounterexample) {
  // a negative tolerance makes every exact identity fail
  auto o = small_algebra();
  o.elements = 3;
  o.tolerance = -1.0L;
  const auto r = run_algebra_suite(1, o);
  EXPECT_FALSE(r.passed());
  const auto& assoc = r.properties[0];
  EXPECT_EQ(assoc.failures, assoc.cases);
  EXPECT_NE(assoc.counterexample.find("element 0"), std::string::npos);
  const auto text = format_report(r);
  EXPECT_NE(text.find("FAIL (ab)c = a(bc) (0/9)"), std::string::npos);
  EXPECT_NE(text.find("counterexample: theta="), std::string::npos);
}

TEST(Proptest, DecayIsOnlyMonotoneAtFixedDensity) {
  // density jumps of the block law make the window maximum rise between octaves
  const auto block = block_oscillating_model();
  EXPECT_TRUE(detail::decay_case("block", block, 16, true).has_value());
  EXPECT_FALSE(detail::decay_case("block", block, 16, false).has_value());
  EXPECT_FALSE(detail::decay_case("harmonic", harmonic_model(), 12, true).has_value());
}

TEST(Proptest, UnknownSuite) {
  EXPECT_THROW(run_suite("geometry"), ParseError);
  EXPECT_EQ(suite_names().size(), 2u);
}
