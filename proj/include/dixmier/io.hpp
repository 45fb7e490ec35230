#pragma once

// JSON ingestion of operators, observables and witnesses; JSON reports and
// CSV curves.  Numbers are written with 17 significant digits so identical
// inputs give byte-identical files.
//
// Operator spec:
//   {"kind": "law",  "law": {"name": "power", "c": 1, "p": 1}}
//   {"kind": "list", "list": [1, 0.5, 0.25], "tail": {"law": {...}} | {"bound": {"c": 1, "p": 1}}}
//   {"kind": "enum", "list": [...values in enumeration order...], "tail": {...}}
// Law names: harmonic {c}, power {c, p}, stepped_power {c, p, r},
// trace_class {p}, block {ratio, high, low, horizon}, torus {modes},
// nctorus {shells}.  A list tail law starts right after the list.
//
// Observable spec:
//   "one" | {"kind": "constant", "re": 1, "im": 0}
//   {"kind": "finite", "values": [...]}
//   {"kind": "power", "limit": L, "c": c, "alpha": a}        d_m = L + c m^-a
//   {"kind": "dyadic", "high": 1.5, "low": 0.5}             alternating dyadic blocks
//   {"kind": "torus_multiplier", "function": {"coeffs": [{"m": 0, "re": 1, "im": 0}]}}
//   {"kind": "nctorus_element", "element": {"theta": 0.3, "coeffs": [{"m": 0, "n": 0, "re": 1, "im": 0}]}}

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dixmier/config.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/models.hpp"
#include "dixmier/normality.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/proptest.hpp"
#include "dixmier/quantum_limit.hpp"
#include "dixmier/residue.hpp"

namespace dixmier {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(path + "." + key, "missing");
  return j.at(key);
}

inline long double number(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ParseError(path + "." + key, "must be a number");
  return v.get<long double>();
}

inline long double number_or(const json& j, const char* key, const std::string& path, long double dflt) {
  return (j.is_object() && j.contains(key)) ? number(j, key, path) : dflt;
}

inline std::int64_t integer(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + key, "must be an integer");
  return v.get<std::int64_t>();
}

inline std::vector<long double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "must be an array of numbers");
  std::vector<long double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(path, "must be an array of numbers");
    out.push_back(v.get<long double>());
  }
  return out;
}

template <class F>
auto rethrow_as_parse(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fourier data

inline FourierElement parse_fourier_element(const json& j, const std::string& path = "element") {
  const long double theta = detail::number(j, "theta", path);
  const json& cs = detail::require(j, "coeffs", path);
  if (!cs.is_array()) throw ParseError(path + ".coeffs", "must be an array");
  FourierElement::Map m;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string p = path + ".coeffs[" + std::to_string(i) + "]";
    const auto key = LatticePoint{detail::integer(cs[i], "m", p), detail::integer(cs[i], "n", p)};
    m[key] += Complex(detail::number_or(cs[i], "re", p, 0), detail::number_or(cs[i], "im", p, 0));
  }
  return detail::rethrow_as_parse(path + ".theta", [&] { return FourierElement(theta, m); });
}

inline json to_json(const FourierElement& a) {
  json cs = json::array();
  for (const auto& [k, c] : a.coeffs()) {
    cs.push_back({{"m", k.first}, {"n", k.second}, {"re", static_cast<double>(c.real())},
                  {"im", static_cast<double>(c.imag())}});
  }
  return {{"theta", static_cast<double>(a.theta())}, {"coeffs", cs}};
}

inline TorusFunction parse_torus_function(const json& j, const std::string& path = "function") {
  const json& cs = detail::require(j, "coeffs", path);
  if (!cs.is_array()) throw ParseError(path + ".coeffs", "must be an array");
  TorusFunction f;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string p = path + ".coeffs[" + std::to_string(i) + "]";
    if (cs[i].contains("n") && detail::integer(cs[i], "n", p) != 0) {
      throw ParseError(p + ".n", "a function on the circle has one Fourier index");
    }
    f.coeffs[detail::integer(cs[i], "m", p)] +=
        Complex(detail::number_or(cs[i], "re", p, 0), detail::number_or(cs[i], "im", p, 0));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Operators

struct NamedModel {
  std::string name;
  std::string description;
};

inline std::vector<NamedModel> model_catalog() {
  return {{"harmonic", "mu_n = c/n (c = 1): the model element of the weak trace ideal"},
          {"trace_class", "mu_n = n^-p (p = 2): trace class, every Dixmier trace vanishes"},
          {"block", "mu_n = c/n with c alternating 1.5, 0.5 on log-blocks: not measurable"},
          {"torus", "inverse square root Laplacian on the circle, eigenvalues 1/|m| (modes = 2^20)"},
          {"nctorus", "inverse Laplacian on the noncommutative torus, eigenvalues 1/(m^2+n^2) (shells = 1024)"}};
}

inline PiecewiseLaw parse_law(const json& j, const std::string& path, Index start = 1) {
  if (!j.is_object()) throw ParseError(path, "must be an object");
  const json& nm = detail::require(j, "name", path);
  if (!nm.is_string()) throw ParseError(path + ".name", "must be a string");
  const auto name = nm.get<std::string>();
  return detail::rethrow_as_parse(path, [&]() -> PiecewiseLaw {
    if (name == "harmonic") return power_law(detail::number_or(j, "c", path, 1), 1, start);
    if (name == "power") return power_law(detail::number(j, "c", path), detail::number(j, "p", path), start);
    if (name == "stepped_power") {
      return stepped_power_law(detail::number(j, "c", path), detail::number(j, "p", path),
                               detail::number(j, "r", path), start);
    }
    if (name == "trace_class") return power_law(1, detail::number_or(j, "p", path, 2), start);
    throw ParseError(path + ".name", "unknown law '" + name + "'");
  });
}

inline std::shared_ptr<const TailModel> parse_tail(const json& j, const std::string& path, Index start) {
  if (j.contains("law")) return std::make_shared<LawTail>(parse_law(j.at("law"), path + ".law", start));
  if (j.contains("bound")) {
    const json& b = j.at("bound");
    return detail::rethrow_as_parse(path + ".bound", [&] {
      return std::make_shared<BoundTail>(start, PowerEnvelope{detail::number(b, "c", path + ".bound"),
                                                              detail::number(b, "p", path + ".bound")});
    });
  }
  throw ParseError(path, "needs a law or a bound");
}

/// A named model with optional parameters.
inline EigenvalueSequence model_by_name(const std::string& name, const json& params = json::object(),
                                        const std::string& path = "model") {
  return detail::rethrow_as_parse(path, [&]() -> EigenvalueSequence {
    if (name == "harmonic") return harmonic_model(detail::number_or(params, "c", path, 1));
    if (name == "trace_class") return trace_class_model(detail::number_or(params, "p", path, 2));
    if (name == "block") {
      BlockLawParams p;
      p.ratio = detail::number_or(params, "ratio", path, p.ratio);
      p.high = detail::number_or(params, "high", path, p.high);
      p.low = detail::number_or(params, "low", path, p.low);
      p.horizon = detail::number_or(params, "horizon", path, p.horizon);
      return block_oscillating_model(p);
    }
    if (name == "torus") {
      return torus_invsqrt_laplacian(static_cast<std::uint64_t>(detail::number_or(params, "modes", path, 1 << 20)));
    }
    if (name == "nctorus") {
      return nct_inv_laplacian(static_cast<std::int64_t>(detail::number_or(params, "shells", path, 1024)));
    }
    throw ParseError(path, "unknown model '" + name + "'");
  });
}

inline EigenvalueSequence parse_operator(const json& j, const std::string& path = "operator") {
  const json& k = detail::require(j, "kind", path);
  if (!k.is_string()) throw ParseError(path + ".kind", "must be a string");
  const auto kind = k.get<std::string>();
  if (kind == "law") {
    const json& law = detail::require(j, "law", path);
    const auto name = detail::require(law, "name", path + ".law").get<std::string>();
    for (const auto& m : model_catalog()) {
      if (m.name == name && name != "harmonic" && name != "trace_class") return model_by_name(name, law, path + ".law");
    }
    return detail::rethrow_as_parse(path, [&] { return EigenvalueSequence::from_law(parse_law(law, path + ".law")); });
  }
  if (kind == "list" || kind == "enum") {
    const auto values = detail::number_list(detail::require(j, "list", path), path + ".list");
    std::shared_ptr<const TailModel> tail;
    if (j.contains("tail")) tail = parse_tail(j.at("tail"), path + ".tail", static_cast<Index>(values.size() + 1));
    return detail::rethrow_as_parse(path + ".list", [&] {
      return kind == "list" ? EigenvalueSequence::from_list(values, tail)
                            : EigenvalueSequence::from_enumeration(values, tail);
    });
  }
  throw ParseError(path + ".kind", "must be law, list or enum");
}

// ---------------------------------------------------------------------------
// Observables

inline DiagonalObservable dyadic_observable(long double high, long double low) {
  return DiagonalObservable::blocks(
      [high, low](Index m) {
        const int b = std::ilogb(m);
        return DiagonalObservable::Piece{b % 2 == 0 ? high : low, std::ldexp(1.0L, b + 1)};
      },
      std::min(high, low), std::max(high, low));
}

inline DiagonalObservable power_observable(long double limit, long double c, long double alpha) {
  if (!(alpha > 0.0L)) throw DomainError("alpha must be positive");
  return DiagonalObservable::convergent([=](Index m) -> Complex { return limit + c * std::pow(m, -alpha); }, limit,
                                        std::abs(c), alpha, std::abs(limit) + std::abs(c),
                                        {true, limit >= 0.0L && c >= 0.0L});
}

inline DiagonalObservable parse_observable(const json& j, const std::string& path = "observable") {
  if (j.is_string()) {
    if (j.get<std::string>() == "one") return DiagonalObservable::constant(1.0L);
    throw ParseError(path, "unknown observable '" + j.get<std::string>() + "'");
  }
  const json& k = detail::require(j, "kind", path);
  if (!k.is_string()) throw ParseError(path + ".kind", "must be a string");
  const auto kind = k.get<std::string>();
  return detail::rethrow_as_parse(path, [&]() -> DiagonalObservable {
    if (kind == "constant") {
      return DiagonalObservable::constant(
          Complex(detail::number_or(j, "re", path, detail::number_or(j, "value", path, 0)),
                  detail::number_or(j, "im", path, 0)));
    }
    if (kind == "finite") {
      const auto v = detail::number_list(detail::require(j, "values", path), path + ".values");
      return DiagonalObservable::finite(std::vector<Complex>(v.begin(), v.end()));
    }
    if (kind == "power") {
      return power_observable(detail::number(j, "limit", path), detail::number(j, "c", path),
                              detail::number(j, "alpha", path));
    }
    if (kind == "dyadic") {
      return dyadic_observable(detail::number_or(j, "high", path, 1.5), detail::number_or(j, "low", path, 0.5));
    }
    if (kind == "torus_multiplier") {
      return torus_multiplier_diag(parse_torus_function(detail::require(j, "function", path), path + ".function"));
    }
    if (kind == "nctorus_element") {
      return nct_diag(parse_fourier_element(detail::require(j, "element", path), path + ".element"));
    }
    throw ParseError(path + ".kind", "unknown observable kind '" + kind + "'");
  });
}

// ---------------------------------------------------------------------------
// Witnesses

/// CSV with header x,weight,h,<m>,<m>,... : one column per profile |h_m|^2.
inline GridFamily parse_witness_csv(std::istream& in, const std::string& path = "witness") {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) out.push_back(cell);
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, "empty CSV");
  const auto head = split(line);
  if (head.size() < 3 || head[0] != "x" || head[1] != "weight" || head[2] != "h") {
    throw ParseError(path, "header must start with x,weight,h");
  }
  GridFamily g;
  for (std::size_t c = 3; c < head.size(); ++c) {
    try {
      g.profiles.push_back({std::stoll(head[c]), {}});
    } catch (const std::exception&) {
      throw ParseError(path, "profile column '" + head[c] + "' is not an integer index");
    }
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != head.size()) {
      throw IncomparableProfiles(path + " row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(head.size()));
    }
    std::vector<long double> v;
    for (const auto& c : cells) {
      try {
        v.push_back(std::stold(c));
      } catch (const std::exception&) {
        throw ParseError(path, "row " + std::to_string(row) + ": '" + c + "' is not a number");
      }
    }
    g.grid.push_back(v[0]);
    g.weights.push_back(v[1]);
    g.dominator.push_back(v[2]);
    for (std::size_t c = 3; c < v.size(); ++c) g.profiles[c - 3].density.push_back(v[c]);
  }
  return g;
}

/// {"theta": t, "projections": [element, ...], "vectors": [[m, n], ...], "reference": [0, 0]}
inline FourierFamily parse_witness_json(const json& j, const std::string& path = "witness") {
  FourierFamily f;
  f.theta = detail::number(j, "theta", path);
  const json& ps = detail::require(j, "projections", path);
  if (!ps.is_array()) throw ParseError(path + ".projections", "must be an array");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    f.projections.push_back(parse_fourier_element(ps[i], path + ".projections[" + std::to_string(i) + "]"));
  }
  auto point = [&](const json& p, const std::string& where) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      throw ParseError(where, "must be an integer pair [m, n]");
    }
    return LatticePoint{p[0].get<std::int64_t>(), p[1].get<std::int64_t>()};
  };
  const json& vs = detail::require(j, "vectors", path);
  if (!vs.is_array()) throw ParseError(path + ".vectors", "must be an array");
  for (std::size_t i = 0; i < vs.size(); ++i) f.vectors.push_back(point(vs[i], path + ".vectors[" + std::to_string(i) + "]"));
  if (j.contains("reference")) f.reference = point(j.at("reference"), path + ".reference");
  return f;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const LimitEstimate& e) {
  json j{{"status", to_string(e.status)}, {"method", e.method}};
  if (e.converged()) {
    j["value"] = static_cast<double>(e.value);
    j["error"] = static_cast<double>(e.error);
  } else {
    j["band"] = {static_cast<double>(e.lo), static_cast<double>(e.hi)};
  }
  return j;
}

inline json to_json(const Extrapolation& x) {
  json j{{"value", static_cast<double>(x.value)},         {"error", static_cast<double>(x.error)},
         {"residual", static_cast<double>(x.residual)},   {"drop_shift", static_cast<double>(x.drop_shift)},
         {"weight_sum", static_cast<double>(x.weight_sum)}, {"reliable", x.reliable}};
  if (!x.reliable) j["reason"] = x.reason;
  return j;
}

inline json to_json(const MeasurabilityReport& r, const RunConfig& cfg) {
  json j{{"verdict", to_string(r.verdict)}};
  if (r.verdict == Verdict::measurable) {
    j["value"] = static_cast<double>(r.value);
  } else {
    j["band"] = {static_cast<double>(r.lo), static_cast<double>(r.hi)};
  }
  json routes{{"residue", {{"estimate", to_json(r.residue.estimate)}, {"extrapolation", to_json(r.residue.fit)}}}};
  routes["log_average"] = r.log ? json{{"estimate", to_json(r.log->estimate)}} : json(nullptr);
  j["routes"] = routes;
  if (r.agreement) {
    j["agreement"] = {{"difference", static_cast<double>(*r.agreement)},
                      {"tolerance", static_cast<double>(r.agreement_tol)}};
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["config_echo"] = to_json(cfg);
  return j;
}

inline json to_json(const StructureReport& r) {
  json j{{"phi", to_json(r.phi)},
         {"diagonal_limit", to_json(r.diagonal_limit)},
         {"agreement", r.agreement},
         {"overlap", r.overlap},
         {"tolerance", static_cast<double>(r.tolerance)}};
  if (r.difference) j["difference"] = static_cast<double>(*r.difference);
  return j;
}

inline json to_json(const DominationResult& r) {
  json j{{"dominated", r.dominated}, {"max_excess", static_cast<double>(r.excess)}};
  if (!r.dominated) j["violation"] = {{"m", r.m}, {"location", r.location}};
  if (r.max_defect > 0) j["max_idempotency_defect"] = static_cast<double>(r.max_defect);
  return j;
}

inline json to_json(const MonotoneReport& r) {
  json chain = json::array();
  for (const auto& e : r.chain) chain.push_back(to_json(e));
  return {{"chain", chain},
          {"limit", to_json(r.limit)},
          {"sup", static_cast<double>(r.sup)},
          {"difference", static_cast<double>(r.difference)},
          {"decidable", r.decidable},
          {"equal", r.equal}};
}

inline json to_json(const SuiteReport& r) {
  json ps = json::array();
  for (const auto& p : r.properties) {
    json q{{"name", p.name}, {"cases", p.cases}, {"failures", p.failures}, {"passed", p.passed()}};
    if (!p.passed()) q["counterexample"] = p.counterexample;
    ps.push_back(q);
  }
  return {{"suite", r.suite}, {"seed", r.seed}, {"passed", r.passed()}, {"properties", ps}};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::ostream& csv_number(std::ostream& o, long double x) {
  return o << std::setprecision(17) << static_cast<double>(x);
}

}  // namespace detail

inline void write_residue_csv(std::ostream& o, const ResidueCurve& c, Part part = Part::real) {
  o << "k,s,value,error\n";
  for (const auto& p : c.points) {
    detail::csv_number(o, p.k) << ',';
    detail::csv_number(o, p.s) << ',';
    detail::csv_number(o, part == Part::real ? p.value.real() : p.value.imag()) << ',';
    detail::csv_number(o, p.error) << '\n';
  }
}

inline void write_gamma_csv(std::ostream& o, const std::vector<GammaPoint>& g) {
  o << "N,gamma_N\n";
  for (const auto& p : g) {
    detail::csv_number(o, p.N) << ',';
    detail::csv_number(o, p.gamma) << '\n';
  }
}

inline void write_zeta_csv(std::ostream& o, const std::vector<std::pair<long double, ZetaValue>>& rows) {
  o << "s,re,im,error\n";
  for (const auto& [s, z] : rows) {
    detail::csv_number(o, s) << ',';
    detail::csv_number(o, z.value.real()) << ',';
    detail::csv_number(o, z.value.imag()) << ',';
    detail::csv_number(o, z.error) << '\n';
  }
}

/// m, Re <h_m, A h_m> on the plan's sample points.
inline void write_diagonal_csv(std::ostream& o, const DiagonalObservable& A, const std::vector<std::uint64_t>& ms) {
  o << "m,value\n";
  for (auto m : ms) {
    o << m << ',';
    detail::csv_number(o, A(static_cast<Index>(m)).real()) << '\n';
  }
}

}  // namespace dixmier
