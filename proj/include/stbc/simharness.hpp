#pragma once

// Monte Carlo link simulation, diversity-order fitting and result output.
//
// Every frame draws from its own RNG stream seeded by
// (master_seed, snr_index, frame_index), and frames are tallied in index
// order, so a result depends on the configuration only, never on the number
// of worker threads.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stbc/channel.hpp"
#include "stbc/constructions.hpp"
#include "stbc/decoders.hpp"
#include "stbc/lindesign.hpp"
#include "stbc/rotations.hpp"

namespace stbc {

struct CodeConfig {
  Family family = Family::kAlamoutiBlocks;
  int antennas = 4;
  int lambda = 2;  // ignored for sec4 (always N/2)
  int layers = 2;
  bool coarse = false;
  bool identity_rotation = false;  // deliberately broken variant

  friend bool operator==(const CodeConfig&, const CodeConfig&) = default;
};

struct SimConfig {
  CodeConfig code;
  int receive_antennas = 1;
  int qam_order = 4;
  DecoderKind decoder = DecoderKind::kPicSic;
  SearchMode mode = SearchMode::kConditioned;
  std::vector<double> snr_grid_db;
  std::int64_t min_frame_errors = 200;
  std::int64_t max_frames = 1'000'000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string output_csv;
  std::string output_json;

  void validate() const {
    if (snr_grid_db.empty()) throw std::invalid_argument("SimConfig: snr grid is empty");
    for (size_t i = 1; i < snr_grid_db.size(); ++i)
      if (!(snr_grid_db[i] > snr_grid_db[i - 1])) throw std::invalid_argument("SimConfig: snr grid must be ascending");
    if (min_frame_errors < 1 || max_frames < 1) throw std::invalid_argument("SimConfig: stop rule must be positive");
    if (receive_antennas < 1) throw std::invalid_argument("SimConfig: receive_antennas must be >= 1");
    if (workers < 1) throw std::invalid_argument("SimConfig: workers must be >= 1");
  }
};

struct SimPoint {
  double snr_db = 0.0;
  std::int64_t frames = 0;
  std::int64_t bit_errors = 0;
  std::int64_t symbol_errors = 0;  // real PAM symbols
  std::int64_t frame_errors = 0;
  double ber = 0.0;
  double ser = 0.0;
  double fer = 0.0;
  double mean_evals = 0.0;
  std::int64_t max_evals = 0;

  friend bool operator==(const SimPoint&, const SimPoint&) = default;
};

struct DiversityFit {
  double order = 0.0;
  std::vector<double> window_snr_db;
  friend bool operator==(const DiversityFit&, const DiversityFit&) = default;
};

struct SimResult {
  std::vector<SimPoint> points;
  std::optional<DiversityFit> diversity;
  double wall_time_s = 0.0;
  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Builds the configured code with its power normalized for unit-energy QAM.
inline Code build_code(const CodeConfig& c) {
  Code code = [&] {
    if (c.family == Family::kDiagonalLayers) {
      if (c.coarse) throw InfeasibleError("sec3 has no coarse grouping");
      if (c.lambda < 1 || c.lambda > c.antennas)
        throw InfeasibleError("sec3: lambda=" + std::to_string(c.lambda) + " must lie in 1..N");
      const auto q = c.identity_rotation ? identity_rotation(c.lambda) : build_rotation(c.lambda);
      return build_section3(c.antennas, c.lambda, c.layers, q);
    }
    if (c.antennas < 2 || c.antennas % 2 != 0)
      throw InfeasibleError("sec4: N must be even and >= 2 (got " + std::to_string(c.antennas) + ")");
    const auto q = c.identity_rotation ? identity_rotation(c.antennas / 2) : build_rotation(c.antennas / 2);
    return build_section4(c.antennas, c.layers, q, c.coarse ? GroupingVariant::kCoarse : GroupingVariant::kFine);
  }();
  code.design = normalize_power(code.design, kRealSymbolEnergy);
  return code;
}

// ---------------------------------------------------------------------------
// Diversity order

struct BerPoint {
  double snr_linear = 0.0;
  double ber = 0.0;
};

/// Negated least-squares slope of log10(ber) against log10(snr) over the last
/// `window` points with ber > 0.
inline double estimate_diversity_order(const std::vector<BerPoint>& points, int window) {
  if (window < 2) throw std::invalid_argument("estimate_diversity_order: window must be >= 2");
  std::vector<BerPoint> usable;
  for (const auto& p : points)
    if (p.ber > 0.0 && p.snr_linear > 0.0) usable.push_back(p);
  if (usable.size() < 2) throw std::invalid_argument("estimate_diversity_order: fewer than 2 points with errors");
  const size_t n = std::min(usable.size(), static_cast<size_t>(window));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = usable.size() - n; i < usable.size(); ++i) {
    const double x = std::log10(usable[i].snr_linear), y = std::log10(usable[i].ber);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("estimate_diversity_order: degenerate SNR window");
  return -(dn * sxy - sx * sy) / denom;
}

inline constexpr int kDefaultFitWindow = 3;
inline constexpr std::int64_t kMinFitBitErrors = 50;

/// Fit over the highest `window` SNR points that have at least
/// `min_bit_errors` bit errors; empty when fewer than two qualify.
inline std::optional<DiversityFit> fit_diversity(const SimResult& r, int window = kDefaultFitWindow,
                                                 std::int64_t min_bit_errors = kMinFitBitErrors) {
  std::vector<const SimPoint*> ok;
  for (const auto& p : r.points)
    if (p.bit_errors >= min_bit_errors) ok.push_back(&p);
  if (ok.size() > static_cast<size_t>(window)) ok.erase(ok.begin(), ok.end() - window);
  if (ok.size() < 2) return std::nullopt;
  std::vector<BerPoint> pts;
  DiversityFit fit;
  for (const auto* p : ok) {
    pts.push_back({db_to_linear(p->snr_db), p->ber});
    fit.window_snr_db.push_back(p->snr_db);
  }
  fit.order = estimate_diversity_order(pts, static_cast<int>(pts.size()));
  return fit;
}

namespace detail {

struct FrameOutcome {
  std::int64_t bit_errors = 0;
  std::int64_t symbol_errors = 0;
  std::int64_t evaluations = 0;
};

inline FrameOutcome run_frame(const Code& code, const PamAlphabet& pam, const SimConfig& cfg, double snr_db,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int k = code.design.num_symbols();
  Bits bits(static_cast<size_t>(k * pam.bit_width()));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  const RVector x = modulate(bits, pam);
  const LinkInstance link =
      sample_link(code.design.antennas(), cfg.receive_antennas, code.design.delay(), snr_db, rng);
  const CMatrix y = transmit(code.design.assemble(x), link);
  const DecodeProblem problem(vec_tilde(y), code.design.equivalent_channel(link.h), code.grouping, pam, link.snr);
  const DecodeResult res = decode(problem, cfg.decoder, cfg.mode);
  const Bits got = demap(res.x, pam);
  FrameOutcome out;
  for (size_t i = 0; i < bits.size(); ++i) out.bit_errors += bits[i] != got[i];
  for (int i = 0; i < k; ++i) out.symbol_errors += res.x(i) != x(i);
  out.evaluations = res.candidate_evaluations;
  return out;
}

inline constexpr std::int64_t kBatchFrames = 256;

}  // namespace detail

inline SimResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Code code = build_code(cfg.code);
  const PamAlphabet pam(cfg.qam_order);
  if (cfg.decoder == DecoderKind::kMl) {
    const double space = std::pow(static_cast<double>(pam.size()), code.design.num_symbols());
    if (space > kDefaultMlCap)
      throw InfeasibleError("simulate: ML search space " + std::to_string(static_cast<long long>(space)) +
                            " exceeds cap");
  }
  const std::int64_t bits_per_frame = static_cast<std::int64_t>(code.design.num_symbols()) * pam.bit_width();

  SimResult result;
  std::vector<detail::FrameOutcome> batch;
  for (size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
    const double snr_db = cfg.snr_grid_db[si];
    SimPoint pt;
    pt.snr_db = snr_db;
    double eval_sum = 0.0;
    bool done = false;
    for (std::int64_t first = 0; !done && first < cfg.max_frames; first += detail::kBatchFrames) {
      const std::int64_t count = std::min(detail::kBatchFrames, cfg.max_frames - first);
      batch.assign(static_cast<size_t>(count), {});
      std::atomic<std::int64_t> next{0};
      auto work = [&] {
        for (std::int64_t i; (i = next.fetch_add(1)) < count;)
          batch[static_cast<size_t>(i)] = detail::run_frame(code, pam, cfg, snr_db,
                                                            trial_seed(cfg.master_seed, si, static_cast<std::uint64_t>(first + i)));
      };
      const int extra = std::min<int>(cfg.workers, static_cast<int>(count)) - 1;
      std::vector<std::jthread> pool;
      for (int w = 0; w < extra; ++w) pool.emplace_back(work);
      work();
      pool.clear();
      for (const auto& f : batch) {
        ++pt.frames;
        pt.bit_errors += f.bit_errors;
        pt.symbol_errors += f.symbol_errors;
        pt.frame_errors += f.bit_errors > 0;
        eval_sum += static_cast<double>(f.evaluations);
        pt.max_evals = std::max(pt.max_evals, f.evaluations);
        if (pt.frame_errors >= cfg.min_frame_errors) {
          done = true;
          break;
        }
      }
    }
    pt.ber = static_cast<double>(pt.bit_errors) / static_cast<double>(pt.frames * bits_per_frame);
    pt.ser = static_cast<double>(pt.symbol_errors) / static_cast<double>(pt.frames * code.design.num_symbols());
    pt.fer = static_cast<double>(pt.frame_errors) / static_cast<double>(pt.frames);
    pt.mean_evals = eval_sum / static_cast<double>(pt.frames);
    result.points.push_back(pt);
  }
  result.diversity = fit_diversity(result);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// CSV output

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kCsvHeader = "snr_db,frames,bit_errors,ber,ser,fer,mean_evals,max_evals";

inline std::string results_csv(const SimResult& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& p : r.points) {
    out += format_number(p.snr_db) + "," + std::to_string(p.frames) + "," + std::to_string(p.bit_errors) + "," +
           format_number(p.ber) + "," + format_number(p.ser) + "," + format_number(p.fer) + "," +
           format_number(p.mean_evals) + "," + std::to_string(p.max_evals) + "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace stbc
