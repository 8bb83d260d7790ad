// stbc_lab: build codes, check their diversity criteria, tabulate the
// rate/complexity tradeoff and run link simulations.
//
// Exit status: 0 success, 1 infeasible parameters or bad input, 2 a rank
// witness was found by `verify`.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "stbc/stbc.hpp"

namespace {

using namespace stbc;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitWitness = 2;

std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  const std::string stem = p.extension() == ".json" ? p.stem().string() : p.filename().string();
  return (p.parent_path() / (stem + suffix)).string();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

struct CodeFlags {
  std::string family = "sec4";
  int antennas = 4;
  std::optional<int> lambda;
  int layers = 2;
  bool coarse = false;
  bool identity_rotation = false;

  void add(CLI::App* app, bool required) {
    auto* f = app->add_option("--family", family, "sec3 (diagonal layers) or sec4 (Alamouti blocks)")
                  ->check(CLI::IsMember({"sec3", "sec4"}));
    auto* n = app->add_option("--antennas", antennas, "transmit antennas N");
    auto* l = app->add_option("--layers", layers, "number of layers n");
    app->add_option("--lambda", lambda, "real symbols per group (sec3); must equal N/2 for sec4");
    app->add_flag("--coarse", coarse, "sec4 only: coarse grouping (pairs of fine groups)");
    app->add_flag("--identity-rotation", identity_rotation, "replace the rotation by the identity (broken code)");
    if (required) {
      f->required();
      n->required();
      l->required();
    }
  }

  [[nodiscard]] CodeConfig config() const {
    CodeConfig c;
    c.family = family_from_string(family);
    c.antennas = antennas;
    c.layers = layers;
    c.coarse = coarse;
    c.identity_rotation = identity_rotation;
    if (c.family == Family::kDiagonalLayers) {
      if (!lambda) throw InfeasibleError("--lambda is required for sec3");
      c.lambda = *lambda;
    } else {
      if (lambda && *lambda * 2 != antennas)
        throw InfeasibleError("sec4 has lambda = N/2 = " + std::to_string(antennas / 2) + ", got " +
                              std::to_string(*lambda));
      c.lambda = antennas / 2;
    }
    return c;
  }
};

// ---------------------------------------------------------------------------

int cmd_build(const CodeFlags& flags, const std::string& out, std::string grouping_out, std::string rotation_out) {
  const Code code = build_code(flags.config());
  Json summary = spec_to_json(code.spec);
  summary["rotation"] = code.rotation.construction_tag;
  summary["power_scale"] = code.design.power_scale();
  if (!out.empty()) {
    if (grouping_out.empty()) grouping_out = sibling_path(out, ".grouping.json");
    if (rotation_out.empty()) rotation_out = sibling_path(out, ".rotation.json");
    write_text_file(out, design_to_json(code.design).dump(1) + "\n");
    write_text_file(grouping_out, grouping_to_json(code.grouping).dump() + "\n");
    write_text_file(rotation_out, rotation_to_json(code.rotation).dump(2) + "\n");
    summary["files"] = {{"design", out}, {"grouping", grouping_out}, {"rotation", rotation_out}};
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& design_path, const std::string& grouping_path, const CodeFlags& flags,
               bool from_flags, const std::string& mode_name, const FalsifyBudget& budget, const std::string& out) {
  const CriterionMode mode = criterion_from_string(mode_name);
  std::optional<Design> design;
  std::optional<GroupingScheme> grouping;
  std::optional<bool> certified;
  if (from_flags) {
    const Code code = build_code(flags.config());
    if (code.spec.family == Family::kDiagonalLayers)
      certified = certify_section3(code, kDefaultCertifyBound, mode);
    else if (code.spec.variant == GroupingVariant::kFine)
      certified = certify_section4(code, kDefaultCertifyBound, mode);
    design = code.design;
    grouping = code.grouping;
  } else {
    if (design_path.empty() || grouping_path.empty())
      throw std::invalid_argument("verify needs --design and --grouping, or --family/--antennas/--layers");
    design = design_from_json(read_json_file(design_path));
    grouping = grouping_from_json(read_json_file(grouping_path), design->num_symbols());
  }
  const FalsifyReport report = falsify(*design, *grouping, mode, budget);
  emit(out, verify_report_json(mode, certified, report, budget).dump(2) + "\n");
  return report.witness ? kExitWitness : kExitOk;
}

int cmd_tradeoff(int antennas, int delay, const std::string& csv_out, const std::string& svg_out) {
  const TradeoffRendering r = render_tradeoff(antennas, delay);
  emit(csv_out, r.csv);
  if (!svg_out.empty()) write_text_file(svg_out, r.svg);
  return kExitOk;
}

int cmd_rotation(int lambda, int bound, const std::string& out) {
  emit(out, rotation_to_json(build_rotation(lambda, bound)).dump(2) + "\n");
  return kExitOk;
}

struct SimOverrides {
  std::vector<double> snr;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::int64_t> max_frames;
  std::optional<std::int64_t> min_frame_errors;
  std::optional<int> qam;
  std::optional<int> receive_antennas;
  std::optional<std::string> decoder;
  std::optional<std::string> mode;
  std::optional<std::string> csv;
  std::optional<std::string> json;
  std::string svg;
};

int cmd_simulate(const std::string& config_path, const SimOverrides& o) {
  SimConfig cfg = config_path.empty() ? SimConfig{} : sim_config_from_json(read_json_file(config_path));
  if (!o.snr.empty()) cfg.snr_grid_db = o.snr;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.max_frames) cfg.max_frames = *o.max_frames;
  if (o.min_frame_errors) cfg.min_frame_errors = *o.min_frame_errors;
  if (o.qam) cfg.qam_order = *o.qam;
  if (o.receive_antennas) cfg.receive_antennas = *o.receive_antennas;
  if (o.decoder) cfg.decoder = decoder_from_string(*o.decoder);
  if (o.mode) cfg.mode = search_mode_from_string(*o.mode);
  if (o.csv) cfg.output_csv = *o.csv;
  if (o.json) cfg.output_json = *o.json;

  const SimResult r = run_simulation(cfg);
  emit(cfg.output_csv, results_csv(r));
  if (!cfg.output_json.empty()) write_results(r, ResultFormat::kJson, cfg.output_json);
  if (!o.svg.empty()) write_text_file(o.svg, render_ber_svg(r, to_string(cfg.code.family)));
  if (r.diversity) {
    std::cerr << "diversity order " << r.diversity->order << " over";
    for (double s : r.diversity->window_snr_db) std::cerr << " " << s;
    std::cerr << " dB\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time block code lab: construction, diversity checks, tradeoff tables, simulation"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "construct a code and write its design, grouping and rotation");
  CodeFlags build_flags;
  build_flags.add(build, true);
  std::string build_out, grouping_out, rotation_out;
  build->add_option("--out", build_out, "design JSON path");
  build->add_option("--grouping-out", grouping_out, "grouping JSON path (default: <out>.grouping.json)");
  build->add_option("--rotation-out", rotation_out, "rotation JSON path (default: <out>.rotation.json)");

  // verify
  auto* verify = app.add_subcommand("verify", "search for a rank-criterion witness");
  std::string design_path, grouping_path, verify_mode = "picsic", verify_out;
  CodeFlags verify_flags;
  FalsifyBudget budget;
  verify->add_option("--design", design_path, "design JSON");
  verify->add_option("--grouping", grouping_path, "grouping JSON (1-based)");
  verify->add_option("--mode", verify_mode, "pic or picsic")->check(CLI::IsMember({"pic", "picsic"}));
  verify_flags.add(verify, false);
  verify->add_option("--levels", budget.pam_levels, "PAM levels per real symbol (sqrt M)");
  verify->add_option("--trials", budget.trials_per_group, "random interference vectors per difference");
  verify->add_option("--seed", budget.seed, "falsifier seed");
  verify->add_option("--enumeration-cap", budget.enumeration_cap, "max differences enumerated per group");
  verify->add_option("--out", verify_out, "report path (default stdout)");

  // tradeoff
  auto* tradeoff = app.add_subcommand("tradeoff", "rate vs worst-case decoding exponent of every code family");
  int t_antennas = 0, t_delay = 0;
  std::string t_csv, t_svg;
  tradeoff->add_option("--antennas", t_antennas, "transmit antennas N")->required();
  tradeoff->add_option("--delay", t_delay, "delay T")->required();
  tradeoff->add_option("--csv", t_csv, "CSV path (default stdout)");
  tradeoff->add_option("--svg", t_svg, "SVG scatter path");

  // rotation
  auto* rotation = app.add_subcommand("rotation", "build and certify a full-diversity rotation");
  int r_lambda = 2, r_bound = kDefaultCertifyBound;
  std::string r_out;
  rotation->add_option("--lambda", r_lambda, "dimension")->required();
  rotation->add_option("--bound", r_bound, "certificate box bound B");
  rotation->add_option("--out", r_out, "JSON path (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo BER simulation");
  std::string config_path;
  SimOverrides ov;
  simulate->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  simulate->add_option("--snr", ov.snr, "SNR grid in dB (overrides snr_grid_db)");
  simulate->add_option("--seed", ov.seed, "master seed");
  simulate->add_option("--workers", ov.workers, "worker threads");
  simulate->add_option("--max-frames", ov.max_frames, "frame cap per SNR point");
  simulate->add_option("--min-frame-errors", ov.min_frame_errors, "stop after this many frame errors");
  simulate->add_option("--qam", ov.qam, "square QAM order M");
  simulate->add_option("--receive-antennas", ov.receive_antennas, "receive antennas");
  simulate->add_option("--decoder", ov.decoder, "ml, zf, pic or picsic");
  simulate->add_option("--mode", ov.mode, "exhaustive or conditioned");
  simulate->add_option("--csv", ov.csv, "CSV output path (default stdout)");
  simulate->add_option("--json", ov.json, "JSON output path");
  simulate->add_option("--svg", ov.svg, "BER plot path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInfeasible;
  }

  try {
    if (*build) return cmd_build(build_flags, build_out, grouping_out, rotation_out);
    if (*verify) {
      const bool from_flags = verify->count("--family") > 0;
      return cmd_verify(design_path, grouping_path, verify_flags, from_flags, verify_mode, budget, verify_out);
    }
    if (*tradeoff) return cmd_tradeoff(t_antennas, t_delay, t_csv, t_svg);
    if (*rotation) return cmd_rotation(r_lambda, r_bound, r_out);
    if (*simulate) return cmd_simulate(config_path, ov);
  } catch (const std::invalid_argument& e) {  // includes InfeasibleError and DimensionError
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitOk;
}
