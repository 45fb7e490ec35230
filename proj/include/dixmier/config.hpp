#pragma once

// Run configuration: one JSON document, every field optional, command-line
// flags override fields one to one.
//
//   {
//     "ladder":  {"n_min": 1024, "n_max": 16777216, "ratio": 2},
//     "log_ladder": {"l_min": 4, "l_max": 10000, "ratio": 1.189},   optional
//     "cesaro_order": 1,
//     "threshold": 1e-3,
//     "residue": {"ks": [8, 16, ..., 512], "point_tol": 1e-3, "order": 2, "fit_tol": 1e-3,
//                 "max_window_log10": 7.83},
//     "budget_factor": 3,
//     "output": "out",
//     "seed": 20240611,
//     "strict": false
//   }
//
// The log-average route samples N on the geometric "ladder" unless
// "log_ladder" is given: then N = e^L for L geometric in [l_min, l_max], the
// sampling needed when the spectrum changes character only on log log scales.
// "max_window_log10" caps the explicit zeta window (log10 of the index);
// diagonals given by long constant blocks can afford thousands.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/proptest.hpp"
#include "dixmier/residue.hpp"

namespace dixmier {

struct RunConfig {
  std::uint64_t n_min = 1024;
  std::uint64_t n_max = 1ULL << 24;
  double ratio = 2.0;
  int cesaro_order = 1;
  double threshold = 1e-3;
  std::vector<double> ks{8, 16, 32, 64, 128, 256, 512};
  double point_tol = 1e-3;
  int order = 2;
  double fit_tol = 1e-3;
  double max_window_log10 = 26 * 0.30102999566398120;  // 2^26
  std::optional<std::array<double, 3>> log_ladder;    // l_min, l_max, ratio
  double budget_factor = 3.0;
  std::string output = "out";
  std::uint64_t seed = kDefaultSeed;
  bool strict = false;

  void validate() const {
    if (n_min < 1) throw ParseError("ladder.n_min", "must be at least 1");
    if (!(n_min < n_max)) throw ParseError("ladder.n_max", "must exceed ladder.n_min");
    if (!(ratio > 1.0)) throw ParseError("ladder.ratio", "must exceed 1");
    if (cesaro_order < 0 || cesaro_order > 3) throw ParseError("cesaro_order", "must be 0, 1, 2 or 3");
    if (!(threshold > 0.0)) throw ParseError("threshold", "must be positive");
    if (!(point_tol > 0.0)) throw ParseError("residue.point_tol", "must be positive");
    if (!(fit_tol > 0.0)) throw ParseError("residue.fit_tol", "must be positive");
    if (!(budget_factor > 0.0)) throw ParseError("budget_factor", "must be positive");
    if (order < 1) throw ParseError("residue.order", "must be at least 1");
    if (!(max_window_log10 >= 3.0)) throw ParseError("residue.max_window_log10", "must be at least 3");
    if (log_ladder) {
      const auto [l0, l1, r] = *log_ladder;
      if (!(l0 > 0.0 && l0 < l1)) throw ParseError("log_ladder.l_max", "needs 0 < l_min < l_max");
      if (!(r > 1.0)) throw ParseError("log_ladder.ratio", "must exceed 1");
    }
    if (ks.size() < static_cast<std::size_t>(order) + 2) {
      throw ParseError("residue.ks", "needs at least order + 2 points");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!(ks[i] >= 1.0)) throw ParseError("residue.ks", "every k must be at least 1");
      if (i > 0 && !(ks[i] > ks[i - 1])) throw ParseError("residue.ks", "must increase");
    }
  }

  [[nodiscard]] EvaluationPlan plan() const {
    EvaluationPlan p = EvaluationPlan::geometric(n_min, n_max, ratio);
    p.cesaro_order = cesaro_order;
    p.threshold = threshold;
    return p;
  }

  [[nodiscard]] ResidueOptions residue_options() const {
    ResidueOptions o;
    o.ks.assign(ks.begin(), ks.end());
    o.point_tol = point_tol;
    o.order = order;
    o.fit_tol = fit_tol;
    o.threshold = threshold;
    o.zeta.max_window = std::pow(10.0L, static_cast<long double>(max_window_log10));
    return o;
  }

  [[nodiscard]] LogAverageOptions log_options() const {
    LogAverageOptions o;
    if (log_ladder) {
      o.ladder = log_geometric_ladder((*log_ladder)[0], (*log_ladder)[1], (*log_ladder)[2]);
    } else {
      for (auto n : plan().points) o.ladder.push_back(static_cast<Index>(n));
    }
    o.threshold = threshold;
    o.max_window = n_max;
    return o;
  }

  [[nodiscard]] MeasurabilityOptions measurability_options() const {
    return {residue_options(), log_options(), static_cast<long double>(budget_factor)};
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"ladder", {{"n_min", c.n_min}, {"n_max", c.n_max}, {"ratio", c.ratio}}},
                   {"cesaro_order", c.cesaro_order},
                   {"threshold", c.threshold},
                   {"residue",
                    {{"ks", c.ks},
                     {"point_tol", c.point_tol},
                     {"order", c.order},
                     {"fit_tol", c.fit_tol},
                     {"max_window_log10", c.max_window_log10}}},
                   {"budget_factor", c.budget_factor},
                   {"output", c.output},
                   {"seed", c.seed},
                   {"strict", c.strict}};
  if (c.log_ladder) {
    j["log_ladder"] = {{"l_min", (*c.log_ladder)[0]}, {"l_max", (*c.log_ladder)[1]}, {"ratio", (*c.log_ladder)[2]}};
  }
  return j;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, const std::string& path, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(path, "has the wrong type");
  }
}

}  // namespace detail

/// Overlay the fields present in j onto c.  Unknown keys are rejected.
inline void apply_config(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw ParseError("config", "must be a JSON object");
  static const std::vector<std::string> known{"ladder", "log_ladder", "cesaro_order", "threshold", "residue",
                                              "budget_factor", "output", "seed", "strict"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ParseError(k, "unknown config field");
  }
  if (j.contains("ladder")) {
    const auto& l = j.at("ladder");
    if (!l.is_object()) throw ParseError("ladder", "must be an object");
    detail::read_field(l, "n_min", "ladder.n_min", c.n_min);
    detail::read_field(l, "n_max", "ladder.n_max", c.n_max);
    detail::read_field(l, "ratio", "ladder.ratio", c.ratio);
  }
  detail::read_field(j, "cesaro_order", "cesaro_order", c.cesaro_order);
  detail::read_field(j, "threshold", "threshold", c.threshold);
  if (j.contains("residue")) {
    const auto& r = j.at("residue");
    if (!r.is_object()) throw ParseError("residue", "must be an object");
    detail::read_field(r, "ks", "residue.ks", c.ks);
    detail::read_field(r, "point_tol", "residue.point_tol", c.point_tol);
    detail::read_field(r, "order", "residue.order", c.order);
    detail::read_field(r, "fit_tol", "residue.fit_tol", c.fit_tol);
    detail::read_field(r, "max_window_log10", "residue.max_window_log10", c.max_window_log10);
  }
  if (j.contains("log_ladder")) {
    const auto& l = j.at("log_ladder");
    if (!l.is_object()) throw ParseError("log_ladder", "must be an object");
    std::array<double, 3> v{4.0, 10000.0, 1.189207115002721};
    detail::read_field(l, "l_min", "log_ladder.l_min", v[0]);
    detail::read_field(l, "l_max", "log_ladder.l_max", v[1]);
    detail::read_field(l, "ratio", "log_ladder.ratio", v[2]);
    c.log_ladder = v;
  }
  detail::read_field(j, "budget_factor", "budget_factor", c.budget_factor);
  detail::read_field(j, "output", "output", c.output);
  detail::read_field(j, "seed", "seed", c.seed);
  detail::read_field(j, "strict", "strict", c.strict);
}

inline nlohmann::json read_json_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ParseError(field, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(field, std::string("invalid JSON in '") + path + "': " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  RunConfig c;
  apply_config(read_json_file(path, "config"), c);
  c.validate();
  return c;
}

}  // namespace dixmier
