#include <gtest/gtest.h>

#include <sstream>

#include "dixmier/io.hpp"
#include "oracles.hpp"

using namespace dixmier;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const auto plan = c.plan();
  EXPECT_EQ(plan.points.front(), 1024u);
  EXPECT_EQ(plan.points.back(), 1ULL << 24);
  EXPECT_EQ(c.log_options().ladder.size(), 15u);
  EXPECT_EQ(c.residue_options().ks.size(), 7u);
}

TEST(Config, OverlayAndValidation) {
  RunConfig c;
  apply_config(json::parse(R"({"ladder": {"n_max": 4096}, "threshold": 0.01, "residue": {"order": 1},
                               "log_ladder": {"l_min": 4, "l_max": 100}})"),
               c);
  EXPECT_EQ(c.n_max, 4096u);
  EXPECT_EQ(c.n_min, 1024u);
  EXPECT_EQ(c.threshold, 0.01);
  EXPECT_EQ(c.order, 1);
  ASSERT_TRUE(c.log_ladder.has_value());
  EXPECT_NO_THROW(c.validate());
  const double top = static_cast<double>(std::log(c.log_options().ladder.back()));
  EXPECT_LE(top, 100.0 + 1e-9);
  EXPECT_GT(top, 100.0 / 1.19);

  EXPECT_EQ(field_of([] {
              RunConfig d;
              apply_config(json::parse(R"({"ladder": {"n_min": 10, "n_max": 5}})"), d);
              d.validate();
            }),
            "ladder.n_max");
  EXPECT_EQ(field_of([] {
              RunConfig d;
              d.ratio = 1.0;
              d.validate();
            }),
            "ladder.ratio");
  EXPECT_EQ(field_of([] {
              RunConfig d;
              d.threshold = 0;
              d.validate();
            }),
            "threshold");
  EXPECT_EQ(field_of([] {
              RunConfig d;
              apply_config(json::parse(R"({"thresh": 1})"), d);
            }),
            "thresh");
  EXPECT_EQ(field_of([] {
              RunConfig d;
              apply_config(json::parse(R"({"residue": {"point_tol": "small"}})"), d);
            }),
            "residue.point_tol");
}

TEST(Config, EchoRoundTrips) {
  RunConfig c;
  c.seed = 7;
  c.log_ladder = std::array<double, 3>{4, 50, 1.5};
  RunConfig d;
  apply_config(to_json(c), d);
  EXPECT_EQ(to_json(c).dump(), to_json(d).dump());
}

TEST(OperatorSpec, Laws) {
  const auto T = parse_operator(json::parse(R"({"kind": "law", "law": {"name": "power", "c": 2, "p": 1}})"));
  EXPECT_NEAR(T.mu(10), 0.2L, 1e-18L);
  const auto H = parse_operator(json::parse(R"({"kind": "law", "law": {"name": "harmonic"}})"));
  EXPECT_NEAR(H.mu(4), 0.25L, 1e-18L);
  const auto tor = parse_operator(json::parse(R"({"kind": "law", "law": {"name": "torus", "modes": 8}})"));
  EXPECT_EQ(tor.mu(3), 0.5L);
  EXPECT_EQ(tor.mu(100), 1.0L / 50);
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "law", "law": {"name": "nope"}})")); }),
            "operator.law.name");
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "law", "law": {"name": "power", "c": 1}})")); }),
            "operator.law.p");
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"law": {}})")); }), "operator.kind");
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "matrix"})")); }), "operator.kind");
}

TEST(OperatorSpec, ListsAndEnumerations) {
  const auto L = parse_operator(json::parse(R"({"kind": "list", "list": [1, 0.5, 0.25, 0, 0]})"));
  EXPECT_TRUE(L.finite_rank());
  EXPECT_EQ(L.partial_sum(10).value, 1.75L);
  const auto tail = parse_operator(
      json::parse(R"({"kind": "list", "list": [1, 0.5, 0.5], "tail": {"law": {"name": "power", "c": 1, "p": 1}}})"));
  EXPECT_NEAR(tail.mu(4), 0.25L, 1e-18L);
  const auto E = parse_operator(json::parse(R"({"kind": "enum", "list": [0.5, 1, 0.5]})"));
  EXPECT_EQ(E.mu(1), 1.0L);
  EXPECT_EQ(E.label(1), 2);
  EXPECT_EQ(E.label(2), 1);
  EXPECT_EQ(E.label(3), 3);
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "list", "list": [1, 2]})")); }), "operator.list");
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "list", "list": [1, "x"]})")); }),
            "operator.list");
  EXPECT_EQ(field_of([] { parse_operator(json::parse(R"({"kind": "list", "list": [1], "tail": {}})")); }),
            "operator.tail");
}

TEST(ObservableSpec, Kinds) {
  EXPECT_EQ(parse_observable("one")(5), Complex(1.0L));
  EXPECT_EQ(parse_observable(json::parse(R"({"kind": "constant", "re": 2, "im": -1})"))(9), Complex(2.0L, -1.0L));
  const auto f = parse_observable(json::parse(R"({"kind": "finite", "values": [3, 4]})"));
  EXPECT_EQ(f(2), Complex(4.0L));
  EXPECT_EQ(f(3), Complex(0.0L));
  const auto p = parse_observable(json::parse(R"({"kind": "power", "limit": 0.3, "c": 1, "alpha": 1})"));
  EXPECT_LT(std::abs(p(4) - Complex(0.55L)), 1e-15L);
  ASSERT_TRUE(p.convergent().has_value());
  const auto d = parse_observable(json::parse(R"({"kind": "dyadic"})"));
  EXPECT_EQ(d(1), Complex(1.5L));
  EXPECT_EQ(d(2), Complex(0.5L));
  EXPECT_EQ(d(5), Complex(1.5L));
  const auto t = parse_observable(json::parse(
      R"({"kind": "torus_multiplier", "function": {"coeffs": [{"m": 0, "re": 1.5}, {"m": 2, "re": 9}]}})"));
  EXPECT_EQ(t(77), Complex(1.5L));
  const auto e = parse_observable(json::parse(
      R"({"kind": "nctorus_element", "element": {"theta": 0.3, "coeffs": [{"m": 0, "n": 0, "re": 0.5, "im": 0.1}]}})"));
  EXPECT_LT(std::abs(e(123) - Complex(0.5L, 0.1L)), 1e-15L);
  EXPECT_EQ(field_of([] { parse_observable(json::parse(R"({"kind": "power", "limit": 1, "c": 1})")); }),
            "observable.alpha");
  EXPECT_EQ(field_of([] { parse_observable("two"); }), "observable");
  EXPECT_EQ(field_of([] {
              parse_observable(json::parse(
                  R"({"kind": "nctorus_element", "element": {"theta": 1.5, "coeffs": []}})"));
            }),
            "observable.element.theta");
}

TEST(FourierJson, RoundTrip) {
  std::mt19937_64 rng(5);
  const auto a = random_element(rng, 0.25L);
  const auto b = parse_fourier_element(to_json(a));
  EXPECT_EQ(b.theta(), a.theta());
  EXPECT_LT((a - b).l1_norm(), 1e-15L);
  EXPECT_EQ(field_of([] { parse_fourier_element(json::parse(R"({"theta": 0.1, "coeffs": [{"m": 0}]})")); }),
            "element.coeffs[0].n");
  EXPECT_EQ(field_of([] { parse_torus_function(json::parse(R"({"coeffs": [{"m": 1, "n": 2}]})")); }),
            "function.coeffs[0].n");
}

TEST(Witness, CsvAndJson) {
  std::istringstream csv("x,weight,h,1,7\n0,0.5,1,0.5,2\n1,0.5,1,1,0.25\n");
  const auto g = parse_witness_csv(csv);
  ASSERT_EQ(g.profiles.size(), 2u);
  EXPECT_EQ(g.profiles[1].m, 7);
  const auto r = dominated_check({g, 1e-12L});
  EXPECT_FALSE(r.dominated);
  EXPECT_EQ(r.m, 7);
  EXPECT_EQ(r.location, "x=0");

  std::istringstream ragged("x,weight,h,1\n0,0.5,1\n");
  EXPECT_THROW(parse_witness_csv(ragged), IncomparableProfiles);
  std::istringstream header("t,w,h\n");
  EXPECT_THROW(parse_witness_csv(header), ParseError);

  const auto P = approximate_projection(0.1L, 1, 0, 0.0L, 2.0L, 16);
  json j{{"theta", 0.1}, {"projections", {to_json(P)}}, {"vectors", {{1, 2}, {-3, 0}}}};
  const auto f = parse_witness_json(j);
  EXPECT_EQ(f.vectors.size(), 2u);
  EXPECT_TRUE(dominated_check({f, 1e-12L}).dominated);
  j["vectors"] = {{1}};
  EXPECT_EQ(field_of([&] { parse_witness_json(j); }), "witness.vectors[0]");
}

TEST(Reports, CsvSchemasAndJsonFields) {
  const auto H = harmonic_model();
  const auto one = DiagonalObservable::constant(1.0L);
  const auto rep = measurability_diagnostic(one, H);
  const RunConfig cfg;
  const json j = to_json(rep, cfg);
  EXPECT_EQ(j.at("verdict"), "measurable");
  EXPECT_NEAR(j.at("value").get<double>(), 1.0, 1e-3);
  EXPECT_TRUE(j.at("routes").contains("residue"));
  EXPECT_TRUE(j.at("routes").contains("log_average"));
  EXPECT_EQ(j.at("config_echo"), to_json(cfg));

  std::ostringstream rc, gc;
  write_residue_csv(rc, rep.residue.curve);
  write_gamma_csv(gc, rep.log->gamma);
  const std::string r = rc.str(), g = gc.str();
  EXPECT_EQ(r.substr(0, r.find('\n')), "k,s,value,error");
  EXPECT_EQ(g.substr(0, g.find('\n')), "N,gamma_N");
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 8);
  // row k = 8 against the frozen oracle
  std::istringstream rows(r);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  std::istringstream cells(line);
  double k, s, v;
  char comma;
  cells >> k >> comma >> s >> comma >> v;
  EXPECT_EQ(k, 8);
  EXPECT_EQ(s, 1.125);
  EXPECT_NEAR(v, oracle::kHarmonicResidue[0], 1e-3);

  std::ostringstream again;
  write_residue_csv(again, residue_curve(one, H));
  EXPECT_EQ(again.str(), r);

  const json band = to_json(LimitEstimate::make_band(0.5L, 1.5L, "x"));
  EXPECT_EQ(band.at("status"), "band");
  EXPECT_EQ(band.at("band"), json({0.5, 1.5}));
}
