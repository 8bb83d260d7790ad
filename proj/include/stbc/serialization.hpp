#pragma once

// JSON conversion for designs, groupings, rotations, witnesses and
// simulation configs/results. Group indices are 1-based on disk.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stbc/constructions.hpp"
#include "stbc/decoders.hpp"
#include "stbc/diversity.hpp"
#include "stbc/lindesign.hpp"
#include "stbc/rotations.hpp"
#include "stbc/simharness.hpp"

namespace stbc {

using Json = nlohmann::json;

namespace detail {

inline const Json& require_key(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
  return j.at(key);
}

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw std::invalid_argument(std::string(what) + ": unknown key '" + k + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Design

inline Json design_to_json(const Design& d) {
  Json mats = Json::array();
  for (const auto& a : d.weights()) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  return {{"K", d.num_symbols()},
          {"T", d.delay()},
          {"N", d.antennas()},
          {"power_scale", d.power_scale()},
          {"matrices", std::move(mats)}};
}

inline Design design_from_json(const Json& j) {
  const char* what = "design";
  const int k = detail::require_key(j, "K", what).get<int>();
  const int t = detail::require_key(j, "T", what).get<int>();
  const int n = detail::require_key(j, "N", what).get<int>();
  const double scale = j.value("power_scale", 1.0);
  const Json& mats = detail::require_key(j, "matrices", what);
  if (!mats.is_array() || static_cast<int>(mats.size()) != k)
    throw DimensionError("design: expected " + std::to_string(k) + " matrices");
  std::vector<CMatrix> weights;
  for (const auto& m : mats) {
    if (!m.is_array() || static_cast<int>(m.size()) != t) throw DimensionError("design: matrix must have T rows");
    CMatrix a(t, n);
    for (int r = 0; r < t; ++r) {
      const Json& row = m[static_cast<size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) throw DimensionError("design: row must have N entries");
      for (int c = 0; c < n; ++c) {
        const Json& e = row[static_cast<size_t>(c)];
        if (!e.is_array() || e.size() != 2) throw DimensionError("design: entries are [re, im] pairs");
        a(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
    weights.push_back(std::move(a));
  }
  return Design(std::move(weights), scale);
}

// ---------------------------------------------------------------------------
// Grouping

inline Json grouping_to_json(const GroupingScheme& s) {
  Json groups = Json::array();
  for (const auto& g : s.groups()) {
    Json one = Json::array();
    for (int i : g) one.push_back(i + 1);
    groups.push_back(std::move(one));
  }
  return {{"groups", std::move(groups)}};
}

inline GroupingScheme grouping_from_json(const Json& j, int num_symbols) {
  const Json& groups = detail::require_key(j, "groups", "grouping");
  std::vector<std::vector<int>> out;
  for (const auto& g : groups) {
    std::vector<int> one;
    for (const auto& i : g) one.push_back(i.get<int>() - 1);
    out.push_back(std::move(one));
  }
  return GroupingScheme(std::move(out), num_symbols);
}

// ---------------------------------------------------------------------------
// Rotation

inline Json rotation_to_json(const RotationMatrix& q) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < q.entries.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < q.entries.cols(); ++c) row.push_back(q.entries(r, c));
    entries.push_back(std::move(row));
  }
  return {{"lambda", q.dimension},
          {"entries", std::move(entries)},
          {"delta_min", q.delta_min},
          {"B", q.certified_bound},
          {"construction", q.construction_tag}};
}

inline RotationMatrix rotation_from_json(const Json& j) {
  RotationMatrix q;
  q.dimension = detail::require_key(j, "lambda", "rotation").get<int>();
  const Json& e = detail::require_key(j, "entries", "rotation");
  if (!e.is_array() || static_cast<int>(e.size()) != q.dimension)
    throw DimensionError("rotation: entries must be lambda x lambda");
  q.entries.resize(q.dimension, q.dimension);
  for (int r = 0; r < q.dimension; ++r) {
    if (static_cast<int>(e[static_cast<size_t>(r)].size()) != q.dimension)
      throw DimensionError("rotation: entries must be lambda x lambda");
    for (int c = 0; c < q.dimension; ++c) q.entries(r, c) = e[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
  }
  q.delta_min = j.value("delta_min", 0.0);
  q.certified_bound = j.value("B", 0);
  q.construction_tag = j.value("construction", std::string("file"));
  return q;
}

// ---------------------------------------------------------------------------
// Code summary and witnesses

inline Json spec_to_json(const CodeSpec& s) {
  return {{"family", to_string(s.family)},
          {"N", s.antennas},
          {"lambda", s.lambda},
          {"layers", s.layers},
          {"grouping", s.variant == GroupingVariant::kCoarse ? "coarse" : "fine"},
          {"K", s.num_symbols},
          {"T", s.delay},
          {"g", s.num_groups},
          {"rate", s.rate.str()},
          {"exponent", s.worst_case_exponent.str()}};
}

inline Json witness_to_json(const RankWitness& w) {
  std::vector<int> group_1, interference_1;
  for (int i : w.group_symbols) group_1.push_back(i + 1);
  for (int i : w.interference_symbols) interference_1.push_back(i + 1);
  return {{"mode", to_string(w.mode)},
          {"group", w.group + 1},
          {"group_symbols", group_1},
          {"difference", w.difference},
          {"interference_symbols", interference_1},
          {"interference", w.interference},
          {"rank", w.rank},
          {"smallest_singular_value", w.smallest_singular_value}};
}

inline Json budget_to_json(const FalsifyBudget& b) {
  return {{"pam_levels", b.pam_levels},
          {"trials_per_group", b.trials_per_group},
          {"seed", b.seed},
          {"enumeration_cap", b.enumeration_cap}};
}

/// certified: true/false from a structural certificate, or absent ("n/a").
inline Json verify_report_json(CriterionMode mode, std::optional<bool> certified, const FalsifyReport& report,
                               const FalsifyBudget& budget) {
  Json j;
  j["mode"] = to_string(mode);
  if (certified)
    j["certified"] = *certified;
  else
    j["certified"] = "n/a";
  j["witness"] = report.witness ? witness_to_json(*report.witness) : Json(nullptr);
  Json b = budget_to_json(budget);
  b["matrices_checked"] = report.matrices_checked;
  b["exhaustive_differences"] = report.exhaustive_differences;
  j["budget"] = std::move(b);
  return j;
}

// ---------------------------------------------------------------------------
// Simulation config

inline Json code_config_to_json(const CodeConfig& c) {
  return {{"family", to_string(c.family)},
          {"antennas", c.antennas},
          {"lambda", c.lambda},
          {"layers", c.layers},
          {"coarse", c.coarse},
          {"identity_rotation", c.identity_rotation}};
}

inline CodeConfig code_config_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"family", "antennas", "lambda", "layers", "coarse", "identity_rotation"}, "code");
  CodeConfig c;
  if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
  c.antennas = j.value("antennas", c.antennas);
  c.lambda = j.value("lambda", c.lambda);
  c.layers = j.value("layers", c.layers);
  c.coarse = j.value("coarse", c.coarse);
  c.identity_rotation = j.value("identity_rotation", c.identity_rotation);
  return c;
}

inline Json sim_config_to_json(const SimConfig& c) {
  return {{"code", code_config_to_json(c.code)},
          {"receive_antennas", c.receive_antennas},
          {"qam_order", c.qam_order},
          {"decoder", to_string(c.decoder)},
          {"mode", to_string(c.mode)},
          {"snr_grid_db", c.snr_grid_db},
          {"min_frame_errors", c.min_frame_errors},
          {"max_frames", c.max_frames},
          {"master_seed", c.master_seed},
          {"workers", c.workers},
          {"output_csv", c.output_csv},
          {"output_json", c.output_json}};
}

inline SimConfig sim_config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  detail::reject_unknown_keys(j,
                              {"code", "receive_antennas", "qam_order", "decoder", "mode", "snr_grid_db",
                               "min_frame_errors", "max_frames", "master_seed", "workers", "output_csv",
                               "output_json"},
                              "config");
  SimConfig c;
  if (j.contains("code")) c.code = code_config_from_json(j.at("code"));
  c.receive_antennas = j.value("receive_antennas", c.receive_antennas);
  c.qam_order = j.value("qam_order", c.qam_order);
  if (j.contains("decoder")) c.decoder = decoder_from_string(j.at("decoder").get<std::string>());
  if (j.contains("mode")) c.mode = search_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("snr_grid_db")) c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  c.min_frame_errors = j.value("min_frame_errors", c.min_frame_errors);
  c.max_frames = j.value("max_frames", c.max_frames);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.workers = j.value("workers", c.workers);
  c.output_csv = j.value("output_csv", c.output_csv);
  c.output_json = j.value("output_json", c.output_json);
  return c;
}

// ---------------------------------------------------------------------------
// Simulation result

inline Json sim_result_to_json(const SimResult& r) {
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back({{"snr_db", p.snr_db},
                   {"frames", p.frames},
                   {"bit_errors", p.bit_errors},
                   {"symbol_errors", p.symbol_errors},
                   {"frame_errors", p.frame_errors},
                   {"ber", p.ber},
                   {"ser", p.ser},
                   {"fer", p.fer},
                   {"mean_evals", p.mean_evals},
                   {"max_evals", p.max_evals}});
  Json j{{"points", std::move(pts)}, {"wall_time_s", r.wall_time_s}};
  if (r.diversity)
    j["diversity"] = {{"order", r.diversity->order}, {"window_snr_db", r.diversity->window_snr_db}};
  else
    j["diversity"] = nullptr;
  return j;
}

inline SimResult sim_result_from_json(const Json& j) {
  SimResult r;
  for (const auto& p : detail::require_key(j, "points", "result")) {
    SimPoint s;
    s.snr_db = p.at("snr_db").get<double>();
    s.frames = p.at("frames").get<std::int64_t>();
    s.bit_errors = p.at("bit_errors").get<std::int64_t>();
    s.symbol_errors = p.at("symbol_errors").get<std::int64_t>();
    s.frame_errors = p.at("frame_errors").get<std::int64_t>();
    s.ber = p.at("ber").get<double>();
    s.ser = p.at("ser").get<double>();
    s.fer = p.at("fer").get<double>();
    s.mean_evals = p.at("mean_evals").get<double>();
    s.max_evals = p.at("max_evals").get<std::int64_t>();
    r.points.push_back(s);
  }
  r.wall_time_s = j.value("wall_time_s", 0.0);
  if (j.contains("diversity") && !j.at("diversity").is_null()) {
    DiversityFit f;
    f.order = j.at("diversity").at("order").get<double>();
    f.window_snr_db = j.at("diversity").at("window_snr_db").get<std::vector<double>>();
    r.diversity = f;
  }
  return r;
}

enum class ResultFormat { kCsv, kJson };

inline void write_results(const SimResult& r, ResultFormat format, const std::string& path) {
  write_text_file(path, format == ResultFormat::kCsv ? results_csv(r) : sim_result_to_json(r).dump(2) + "\n");
}

inline SimResult read_results_json(const std::string& path) {
  return sim_result_from_json(Json::parse(read_text_file(path)));
}

inline Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace stbc
