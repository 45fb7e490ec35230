// dixmier: batch front end for the spectral routines.
//
//   dixmier zeta       --model harmonic -s 2 -s 1.5
//   dixmier dixmier    --model torus --observable one --route both
//   dixmier measurable --operator op.json
//   dixmier structure  --model nctorus --element a.json
//   dixmier normality  --model torus | --witness grid.csv | --witness proj.json
//   dixmier proptest   lemmas --seed 7
//   dixmier model list
//
// Exit codes: 0 success, 1 inconclusive or failed result (with --strict, or
// a failed property suite), 2 usage or parse error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dixmier/dixmier.hpp"

using namespace dixmier;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInconclusive = 1;
constexpr int kUsage = 2;

struct Inputs {
  std::string config_path;
  std::string output;
  std::optional<std::uint64_t> seed;
  bool strict = false;

  // one-to-one config overrides
  std::optional<std::uint64_t> n_min, n_max;
  std::optional<double> ratio, threshold, point_tol, fit_tol, budget_factor, max_window_log10;
  std::vector<double> log_ladder;
  std::optional<int> cesaro_order, order;
  std::vector<double> ks;

  std::string operator_path;
  std::string model;
  std::int64_t shells = 1024;
  std::uint64_t modes = 1ULL << 20;
  std::string observable = "one";
  std::string element_path;
  std::string function_path;
  std::optional<double> theta;
};

RunConfig resolve_config(const Inputs& in) {
  RunConfig c;
  if (!in.config_path.empty()) apply_config(read_json_file(in.config_path, "config"), c);
  if (in.n_min) c.n_min = *in.n_min;
  if (in.n_max) c.n_max = *in.n_max;
  if (in.ratio) c.ratio = *in.ratio;
  if (in.cesaro_order) c.cesaro_order = *in.cesaro_order;
  if (in.threshold) c.threshold = *in.threshold;
  if (!in.ks.empty()) c.ks = in.ks;
  if (in.point_tol) c.point_tol = *in.point_tol;
  if (in.order) c.order = *in.order;
  if (in.fit_tol) c.fit_tol = *in.fit_tol;
  if (in.budget_factor) c.budget_factor = *in.budget_factor;
  if (in.max_window_log10) c.max_window_log10 = *in.max_window_log10;
  if (!in.log_ladder.empty()) {
    if (in.log_ladder.size() != 3) throw ParseError("--log-ladder", "expects l_min,l_max,ratio");
    c.log_ladder = std::array<double, 3>{in.log_ladder[0], in.log_ladder[1], in.log_ladder[2]};
  }
  if (!in.output.empty()) c.output = in.output;
  if (in.seed) c.seed = *in.seed;
  if (in.strict) c.strict = true;
  c.validate();
  return c;
}

EigenvalueSequence resolve_operator(const Inputs& in) {
  if (!in.operator_path.empty() && !in.model.empty()) throw ParseError("--operator", "give either --operator or --model");
  if (!in.operator_path.empty()) return parse_operator(read_json_file(in.operator_path, "--operator"));
  if (in.model.empty()) throw ParseError("--model", "an operator is required (--operator FILE or --model NAME)");
  json params = json::object();
  if (in.model == "nctorus") params["shells"] = in.shells;
  if (in.model == "torus") params["modes"] = in.modes;
  return model_by_name(in.model, params, "--model");
}

DiagonalObservable resolve_observable(const Inputs& in) {
  if (!in.element_path.empty()) {
    const FourierElement a = parse_fourier_element(read_json_file(in.element_path, "--element"));
    if (in.theta && static_cast<long double>(*in.theta) != a.theta()) {
      throw ThetaMismatch("--theta " + std::to_string(*in.theta) + " differs from the element's theta");
    }
    return nct_diag(a);
  }
  if (!in.function_path.empty()) {
    return torus_multiplier_diag(parse_torus_function(read_json_file(in.function_path, "--function")));
  }
  if (in.observable == "one") return DiagonalObservable::constant(1.0L);
  return parse_observable(read_json_file(in.observable, "--observable"));
}

fs::path output_dir(const RunConfig& c) {
  fs::path p(c.output);
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream o(p);
  o << j.dump(2) << '\n';
}

std::string fmt(long double x) {
  std::ostringstream s;
  s.precision(10);
  s << static_cast<double>(x);
  return s.str();
}

std::string describe(const LimitEstimate& e) {
  if (e.converged()) return fmt(e.value) + " +/- " + fmt(e.error);
  return "band [" + fmt(e.lo) + ", " + fmt(e.hi) + "]";
}

// ---------------------------------------------------------------------------

int cmd_zeta(const Inputs& in, const std::vector<double>& s_list, double tol) {
  const RunConfig cfg = resolve_config(in);
  const auto T = resolve_operator(in);
  const auto A = resolve_observable(in);
  if (!(tol > 0)) throw ParseError("--tol", "must be positive");
  std::vector<std::pair<long double, ZetaValue>> rows;
  json pts = json::array();
  for (double s : s_list) {
    if (!(s > 1.0)) throw ParseError("-s", "every s must exceed 1");
    const ZetaValue z = zeta(A, T, s, tol);
    rows.emplace_back(s, z);
    pts.push_back({{"s", s},
                   {"re", static_cast<double>(z.value.real())},
                   {"im", static_cast<double>(z.value.imag())},
                   {"error", static_cast<double>(z.error)}});
    std::cout << "zeta(" << s << ") = " << fmt(z.value.real());
    if (z.value.imag() != 0) std::cout << " + " << fmt(z.value.imag()) << "i";
    std::cout << " +/- " << fmt(z.error) << "\n";
  }
  const auto dir = output_dir(cfg);
  std::ofstream csv(dir / "zeta.csv");
  write_zeta_csv(csv, rows);
  write_json(dir / "zeta.json", {{"points", pts}, {"config_echo", to_json(cfg)}});
  return kOk;
}

int cmd_dixmier(const Inputs& in, const std::string& route) {
  const RunConfig cfg = resolve_config(in);
  const auto T = resolve_operator(in);
  const auto A = resolve_observable(in);
  const auto dir = output_dir(cfg);
  json report{{"route", route}};
  bool conclusive = true;
  if (route == "both") {
    const auto rep = measurability_diagnostic(A, T, cfg.measurability_options());
    report = to_json(rep, cfg);
    report["route"] = route;
    std::ofstream rc(dir / "residue_curve.csv");
    write_residue_csv(rc, rep.residue.curve);
    if (rep.log) {
      std::ofstream gc(dir / "gamma.csv");
      write_gamma_csv(gc, rep.log->gamma);
    }
    std::cout << "residue:     " << describe(rep.residue.estimate) << "\n";
    if (rep.log) std::cout << "log-average: " << describe(rep.log->estimate) << "\n";
    std::cout << "verdict:     " << to_string(rep.verdict);
    if (rep.verdict == Verdict::measurable) std::cout << " (" << fmt(rep.value) << ")";
    std::cout << "\n";
    conclusive = rep.verdict == Verdict::measurable;
  } else if (route == "residue") {
    const auto r = residue_route(A, T, cfg.residue_options());
    std::ofstream rc(dir / "residue_curve.csv");
    write_residue_csv(rc, r.curve);
    report["routes"] = {{"residue", {{"estimate", to_json(r.estimate)}, {"extrapolation", to_json(r.fit)}}}};
    report["config_echo"] = to_json(cfg);
    std::cout << "residue: " << describe(r.estimate) << "\n";
    conclusive = r.estimate.converged();
  } else {
    const auto l = log_average_route(A, T, cfg.log_options());
    std::ofstream gc(dir / "gamma.csv");
    write_gamma_csv(gc, l.gamma);
    report["routes"] = {{"log_average", {{"estimate", to_json(l.estimate)}}}};
    report["config_echo"] = to_json(cfg);
    std::cout << "log-average: " << describe(l.estimate) << "\n";
    conclusive = l.estimate.converged();
  }
  write_json(dir / "dixmier.json", report);
  return (cfg.strict && !conclusive) ? kInconclusive : kOk;
}

int cmd_measurable(const Inputs& in) {
  const RunConfig cfg = resolve_config(in);
  const auto T = resolve_operator(in);
  const auto A = resolve_observable(in);
  const auto rep = measurability_diagnostic(A, T, cfg.measurability_options());
  const auto dir = output_dir(cfg);
  write_json(dir / "measurable.json", to_json(rep, cfg));
  std::ofstream rc(dir / "residue_curve.csv");
  write_residue_csv(rc, rep.residue.curve);
  if (rep.log) {
    std::ofstream gc(dir / "gamma.csv");
    write_gamma_csv(gc, rep.log->gamma);
  }
  std::cout << to_string(rep.verdict);
  if (rep.verdict == Verdict::measurable) {
    std::cout << " " << fmt(rep.value);
  } else {
    std::cout << " [" << fmt(rep.lo) << ", " << fmt(rep.hi) << "]";
  }
  std::cout << "\n";
  if (!rep.note.empty()) std::cout << rep.note << "\n";
  return (cfg.strict && rep.verdict == Verdict::inconclusive) ? kInconclusive : kOk;
}

int cmd_structure(const Inputs& in) {
  const RunConfig cfg = resolve_config(in);
  const auto T = resolve_operator(in);
  const auto A = resolve_observable(in);
  const NormalizedIntegral I(T, cfg.residue_options());
  EvaluationPlan plan = cfg.plan();
  const auto rep = structure_check(A, I, plan);
  const auto dir = output_dir(cfg);
  json j = to_json(rep);
  j["config_echo"] = to_json(cfg);
  write_json(dir / "structure.json", j);
  std::ofstream dc(dir / "diagonal.csv");
  write_diagonal_csv(dc, A, plan.points);
  std::cout << "phi:            " << describe(rep.phi) << "\n"
            << "diagonal limit: " << describe(rep.diagonal_limit) << "\n"
            << "agreement:      " << (rep.agreement ? "yes" : (rep.overlap ? "bands overlap" : "no")) << "\n";
  return (cfg.strict && !rep.agreement) ? kInconclusive : kOk;
}

int cmd_normality(const Inputs& in, const std::string& witness_path, const std::vector<double>& thresholds,
                  std::size_t projections) {
  const RunConfig cfg = resolve_config(in);
  DominationWitness w;
  if (!witness_path.empty()) {
    if (fs::path(witness_path).extension() == ".csv") {
      std::ifstream f(witness_path);
      if (!f) throw ParseError("--witness", "cannot open '" + witness_path + "'");
      w.family = parse_witness_csv(f, "--witness");
    } else {
      w.family = parse_witness_json(read_json_file(witness_path, "--witness"), "--witness");
    }
  } else if (in.model == "torus") {
    w = torus_witness({-16, -4, -1, 1, 2, 3, 8, 32, 128});
  } else if (in.model == "nctorus") {
    std::mt19937_64 rng(cfg.seed);
    std::vector<LatticePoint> vecs;
    for (std::uint64_t k = 1; k <= 81; ++k) vecs.push_back(cantor_enum(k));
    w = nc_torus_witness(rng, in.theta ? *in.theta : 0.1L, projections, vecs);
  } else {
    throw ParseError("--witness", "give --witness FILE or --model torus|nctorus");
  }
  const auto dom = dominated_check(w);
  json j{{"domination", to_json(dom)}};
  bool ok = dom.dominated;
  std::cout << (dom.dominated ? "dominated" : "violated at m=" + std::to_string(dom.m) + ", " + dom.location) << "\n";
  if (!thresholds.empty()) {
    // monotone chain min(A, t_j); base operator defaults to the harmonic law
    Inputs base = in;
    if (base.model.empty() && base.operator_path.empty()) base.model = "harmonic";
    const NormalizedIntegral I(resolve_operator(base), cfg.residue_options());
    const auto A = resolve_observable(in);
    std::vector<long double> t(thresholds.begin(), thresholds.end());
    const auto rep = monotone_convergence_check(I, threshold_chain(A, t), A);
    j["monotone"] = to_json(rep);
    std::cout << "sup phi(A_j) = " << fmt(rep.sup) << ", phi(A) = " << describe(rep.limit) << ": "
              << (rep.equal ? "equal" : (rep.decidable ? "different" : "undecided")) << "\n";
    ok = ok && rep.equal;
  }
  j["config_echo"] = to_json(cfg);
  write_json(output_dir(cfg) / "normality.json", j);
  return (cfg.strict && !ok) ? kInconclusive : kOk;
}

int cmd_proptest(const Inputs& in, const std::string& suite) {
  const RunConfig cfg = resolve_config(in);
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ParseError("suite", "unknown property suite '" + suite + "'");
  }
  const auto rep = run_suite(suite, cfg.seed);
  std::cout << format_report(rep);
  write_json(output_dir(cfg) / ("proptest_" + suite + ".json"), to_json(rep));
  return rep.passed() ? kOk : kInconclusive;
}

int cmd_model_list() {
  for (const auto& m : model_catalog()) std::cout << m.name << "\t" << m.description << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dixmier traces, residues and quantum limits at desk scale"};
  app.require_subcommand(1);
  Inputs in;

  app.add_option("--config", in.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--output", in.output, "directory for JSON/CSV output (default: out)");
  app.add_option("--seed", in.seed, "seed for randomized suites and witnesses");
  app.add_flag("--strict", in.strict, "exit 1 on inconclusive or unreliable results");
  app.add_option("--n-min", in.n_min, "ladder.n_min");
  app.add_option("--n-max", in.n_max, "ladder.n_max");
  app.add_option("--ratio", in.ratio, "ladder.ratio");
  app.add_option("--cesaro-order", in.cesaro_order, "cesaro_order");
  app.add_option("--threshold", in.threshold, "threshold");
  app.add_option("--ks", in.ks, "residue.ks")->delimiter(',');
  app.add_option("--point-tol", in.point_tol, "residue.point_tol");
  app.add_option("--order", in.order, "residue.order");
  app.add_option("--fit-tol", in.fit_tol, "residue.fit_tol");
  app.add_option("--budget-factor", in.budget_factor, "budget_factor");
  app.add_option("--max-window-log10", in.max_window_log10, "residue.max_window_log10");
  app.add_option("--log-ladder", in.log_ladder, "log_ladder as l_min,l_max,ratio")->delimiter(',');
  app.fallthrough();

  auto add_operands = [&](CLI::App* c) {
    c->add_option("--operator", in.operator_path, "operator spec JSON");
    c->add_option("--model", in.model, "named model (see `model list`)");
    c->add_option("--shells", in.shells, "nctorus: lattice shells held explicitly");
    c->add_option("--modes", in.modes, "torus: modes held explicitly");
    c->add_option("--observable", in.observable, "observable spec JSON, or 'one'");
    c->add_option("--element", in.element_path, "noncommutative torus element JSON");
    c->add_option("--function", in.function_path, "torus function JSON (multiplier)");
    c->add_option("--theta", in.theta, "deformation parameter expected of --element");
  };

  auto* zeta_cmd = app.add_subcommand("zeta", "zeta_{A,T}(s) = Tr(A T^s) with certified error");
  add_operands(zeta_cmd);
  std::vector<double> s_list;
  double tol = 1e-9;
  zeta_cmd->add_option("-s", s_list, "values of s > 1")->delimiter(',');
  zeta_cmd->add_option("--tol", tol, "absolute error target");

  auto* dix_cmd = app.add_subcommand("dixmier", "Dixmier trace Tr_w(A T) by residue, log average, or both");
  add_operands(dix_cmd);
  std::string route = "both";
  dix_cmd->add_option("--route", route, "residue | log | both")->check(CLI::IsMember({"residue", "log", "both"}));

  auto* meas_cmd = app.add_subcommand("measurable", "measurability verdict from both routes");
  add_operands(meas_cmd);

  auto* struct_cmd = app.add_subcommand("structure", "phi(A) against the limit of <h_m, A h_m>");
  add_operands(struct_cmd);

  auto* norm_cmd = app.add_subcommand("normality", "domination of eigenvector profiles, monotone chains");
  add_operands(norm_cmd);
  std::string witness;
  std::vector<double> thresholds;
  std::size_t projections = 8;
  norm_cmd->add_option("--witness", witness, "profile grid CSV or projection JSON");
  norm_cmd->add_option("--thresholds", thresholds, "increasing thresholds t_j: check the chain min(A, t_j)")
      ->delimiter(',');
  norm_cmd->add_option("--projections", projections, "nctorus: number of random approximate projections");

  auto* prop_cmd = app.add_subcommand("proptest", "randomized property suites (lemmas, algebra)");
  std::string suite;
  prop_cmd->add_option("suite", suite, "suite name")->required();

  auto* model_cmd = app.add_subcommand("model", "model catalog");
  auto* list_cmd = model_cmd->add_subcommand("list", "list named models");
  model_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*zeta_cmd) return cmd_zeta(in, s_list, tol);
    if (*dix_cmd) return cmd_dixmier(in, route);
    if (*meas_cmd) return cmd_measurable(in);
    if (*struct_cmd) return cmd_structure(in);
    if (*norm_cmd) return cmd_normality(in, witness, thresholds, projections);
    if (*prop_cmd) return cmd_proptest(in, suite);
    if (*list_cmd) return cmd_model_list();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ThetaMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidSpectralData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IncomparableProfiles& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NonMonotoneChain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return kInconclusive;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
