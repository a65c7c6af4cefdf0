#pragma once

// Functional simulation of inference on a mapped TCAM array. Column-wise
// divisions are evaluated in sequence; with selective precharge a row is only
// precharged and sensed in division k if it matched in division k-1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "treecam/circuit.hpp"
#include "treecam/compiler.hpp"
#include "treecam/dataset.hpp"
#include "treecam/error.hpp"
#include "treecam/faults.hpp"
#include "treecam/mapper.hpp"
#include "treecam/tree.hpp"

namespace treecam {

enum class SenseMode { kIdeal, kAnalog };

inline const char* to_string(SenseMode m) { return m == SenseMode::kIdeal ? "ideal" : "analog"; }

struct SimConfig {
  SenseMode mode = SenseMode::kIdeal;
  bool selective_precharge = true;
  bool pipelined = false;
  FaultConfig faults;
  std::size_t trials = 1;
  /// NaN selects the midpoint between full-match and one-mismatch voltages.
  double v_ref1 = std::numeric_limits<double>::quiet_NaN();
  double v_ref2 = std::numeric_limits<double>::quiet_NaN();
  /// Worker threads for the per-input loop; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  void validate() const {
    if (trials < 1) throw InputError("trials must be at least 1");
    faults.validate();
    if (mode == SenseMode::kIdeal && faults.sigma_sa > 0.0)
      throw InputError("sense-amplifier variability needs analog mode");
  }
};

enum class Anomaly { kNone, kNoSurvivor, kMultiSurvivor };

inline constexpr int kNoClass = -1;

struct InputResult {
  int predicted = kNoClass;  // tree class index, kNoClass without a survivor
  long survivor = -1;        // physical row
  Anomaly anomaly = Anomaly::kNone;
  std::vector<std::size_t> active_rows;  // per column-wise division
  double energy = 0.0;                   // joules
};

/// Bit-plane form of a TileSet for fast row evaluation. For division k and
/// physical row r it stores which cells have an LRS first/second device and
/// which cells are masked.
class PackedArray {
 public:
  explicit PackedArray(const TileSet& ts) : g_(ts.geometry()), words_((g_.size + 63) / 64) {
    const std::size_t n = g_.col_divisions * g_.physical_rows() * words_;
    first_lrs_.assign(n, 0);
    second_lrs_.assign(n, 0);
    live_.assign(n, 0);
    masked_count_.assign(g_.col_divisions * g_.physical_rows(), 0);
    for (std::size_t k = 0; k < g_.col_divisions; ++k) {
      for (std::size_t r = 0; r < g_.physical_rows(); ++r) {
        const std::size_t base = index(k, r);
        for (std::size_t c = 0; c < g_.size; ++c) {
          const TcamCell& cell = ts.cell(r, k * g_.size + c);
          const std::uint64_t bit = std::uint64_t{1} << (c % 64);
          const std::size_t w = base + c / 64;
          if (cell.masked) {
            ++masked_count_[k * g_.physical_rows() + r];
            continue;
          }
          live_[w] |= bit;
          if (cell.first == Device::kLRS) first_lrs_[w] |= bit;
          if (cell.second == Device::kLRS) second_lrs_[w] |= bit;
        }
      }
    }
  }

  const TileGeometry& geometry() const { return g_; }
  std::size_t words() const { return words_; }

  /// Padded key split per division: leading decoder '0', the encoded bits,
  /// then zeros on the extension pins.
  std::vector<std::uint64_t> pack_key(const std::string& encoded) const {
    if (encoded.size() != g_.width) throw InputError("encoded key has wrong width");
    std::vector<std::uint64_t> key(g_.col_divisions * words_, 0);
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      if (encoded[i] != '1') continue;
      const std::size_t col = i + 1;
      const std::size_t k = col / g_.size;
      const std::size_t c = col % g_.size;
      key[k * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
    }
    return key;
  }

  RowState row_state(std::size_t k, std::size_t r, const std::uint64_t* key) const {
    RowState rs;
    const std::size_t base = index(k, r);
    for (std::size_t w = 0; w < words_; ++w) {
      const std::uint64_t kb = key[w];
      const std::uint64_t f = first_lrs_[base + w];
      const std::uint64_t s = second_lrs_[base + w];
      const std::uint64_t live = live_[base + w];
      const std::uint64_t on_lrs = ((~kb & f) | (kb & s)) & live;
      const std::uint64_t off_lrs = ((kb & f) | (~kb & s)) & live;
      rs.match_binary += static_cast<std::size_t>(std::popcount(~on_lrs & off_lrs));
      rs.match_dontcare += static_cast<std::size_t>(std::popcount(live & ~on_lrs & ~off_lrs));
      rs.mismatch += static_cast<std::size_t>(std::popcount(on_lrs & ~off_lrs));
      rs.mismatch_stuck += static_cast<std::size_t>(std::popcount(on_lrs & off_lrs));
    }
    rs.masked = masked_count_[k * g_.physical_rows() + r];
    return rs;
  }

  std::size_t masked_cells(std::size_t k, std::size_t r) const { return masked_count_[k * g_.physical_rows() + r]; }

 private:
  std::size_t index(std::size_t k, std::size_t r) const { return (k * g_.physical_rows() + r) * words_; }

  TileGeometry g_;
  std::size_t words_;
  std::vector<std::uint64_t> first_lrs_;
  std::vector<std::uint64_t> second_lrs_;
  std::vector<std::uint64_t> live_;
  std::vector<std::size_t> masked_count_;
};

/// One configured hardware instance: an (optionally faulty) array plus its
/// sensing references and SA offsets.
class Engine {
 public:
  Engine(const TileSet& ts, const TechnologyParams& tp, const SimConfig& cfg, const SaOffsets& offsets = {})
      : packed_(ts), labels_(ts.class_labels()), codes_(), tp_(tp), cfg_(cfg), offsets_(offsets) {
    tp_.validate();
    const auto& g = packed_.geometry();
    codes_.reserve(g.physical_rows());
    for (std::size_t r = 0; r < g.physical_rows(); ++r) codes_.push_back(ts.class_code(r));
    const auto full = sense_point(g.size, tp_);
    t_eval_ = full.t_eval;
    v_ref1_ = std::isnan(cfg.v_ref1) ? full.v_ref : cfg.v_ref1;
    const std::size_t last_masked = packed_.masked_cells(g.col_divisions - 1, 0);
    v_ref2_ = std::isnan(cfg.v_ref2) ? sense_point(g.size, tp_, last_masked, t_eval_).v_ref : cfg.v_ref2;
    e_mem_ = mem_energy(g.class_bits, tp_);
  }

  const TileGeometry& geometry() const { return packed_.geometry(); }
  double t_eval() const { return t_eval_; }
  double v_ref1() const { return v_ref1_; }
  double v_ref2() const { return v_ref2_; }

  InputResult run(const std::string& encoded) const {
    const auto& g = packed_.geometry();
    const auto key = packed_.pack_key(encoded);
    const std::size_t rows = g.physical_rows();
    InputResult res;
    res.active_rows.assign(g.col_divisions, 0);

    std::vector<char> alive(rows, 1);
    for (std::size_t k = 0; k < g.col_divisions; ++k) {
      const bool last = k + 1 == g.col_divisions;
      const double v_ref = last ? v_ref2_ : v_ref1_;
      const std::uint64_t* kw = key.data() + k * packed_.words();
      for (std::size_t r = 0; r < rows; ++r) {
        if (cfg_.selective_precharge && !alive[r]) continue;
        ++res.active_rows[k];
        const RowState rs = packed_.row_state(k, r, kw);
        const double r_row = row_resistance(rs, tp_);
        res.energy += tcam_energy(r_row, t_eval_, tp_) + tp_.e_sa;
        bool match = false;
        if (cfg_.mode == SenseMode::kIdeal) {
          match = rs.matches();
        } else {
          const double offset = offsets_.empty() ? 0.0 : offsets_[k][r];
          match = ml_voltage(r_row, t_eval_, tp_) > v_ref + offset;
        }
        alive[r] = static_cast<char>(alive[r] && match);
      }
    }
    res.energy += e_mem_;

    std::size_t survivors = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!alive[r]) continue;
      if (survivors++ == 0) res.survivor = static_cast<long>(r);
    }
    if (survivors == 0) {
      res.anomaly = Anomaly::kNoSurvivor;
      return res;
    }
    if (survivors > 1) res.anomaly = Anomaly::kMultiSurvivor;
    const int code = codes_[static_cast<std::size_t>(res.survivor)];
    res.predicted = labels_.empty() ? code : labels_[static_cast<std::size_t>(code)];
    return res;
  }

 private:
  PackedArray packed_;
  std::vector<int> labels_;
  std::vector<int> codes_;
  TechnologyParams tp_;
  SimConfig cfg_;
  SaOffsets offsets_;
  double t_eval_ = 0.0;
  double v_ref1_ = 0.0;
  double v_ref2_ = 0.0;
  double e_mem_ = 0.0;
};

/// Single-input evaluation with the sensing references of `cfg` and no offsets.
inline InputResult simulate_input(const TileSet& ts, const std::string& encoded, const SimConfig& cfg,
                                  const TechnologyParams& tp = {}) {
  return Engine(ts, tp, cfg).run(encoded);
}

struct SimReport {
  std::string mode;
  bool selective_precharge = true;
  bool pipelined = false;
  TileGeometry geometry;
  std::size_t inputs = 0;
  std::size_t trials = 0;

  double accuracy = 0.0;  // mean over trials
  double accuracy_std = 0.0;
  std::vector<double> trial_accuracy;
  double golden_accuracy = std::numeric_limits<double>::quiet_NaN();
  double accuracy_loss = std::numeric_limits<double>::quiet_NaN();  // percentage points
  std::size_t golden_disagreements = 0;

  double energy_per_dec = 0.0;   // J
  double latency_per_dec = 0.0;  // s
  double f_max = 0.0;
  double seq_throughput = 0.0;
  double pipe_throughput = 0.0;
  double edp = 0.0;              // J*s
  double area_mm2 = 0.0;
  double area_um2_per_bit = 0.0;
  double fom = 0.0;              // J*s*mm^2

  double t_eval = 0.0;
  double v_ref1 = 0.0;
  double v_ref2 = 0.0;

  std::vector<double> mean_active_rows;  // per division
  std::size_t none_count = 0;
  std::size_t multi_count = 0;
};

/// Everything a run needs besides the test set and configuration.
struct Hardware {
  TileSet tiles;
  FeatureCodebook codebook;
  TechnologyParams tech;
  std::optional<DecisionTree> tree;  // golden oracle, when known
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  // shifted by v[0] so identical trials give exactly 0
  double sum = 0.0;
  for (double x : v) sum += x - v[0];
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - v[0] - mean) * (x - v[0] - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Per-trial seeds for the three injectors, derived from the master seed.
struct TrialSeeds {
  std::uint64_t saf, sa, input;
};

inline TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial) {
  const auto base = detail::mix_seed(master, trial);
  return {detail::mix_seed(base, 1), detail::mix_seed(base, 2), detail::mix_seed(base, 3)};
}

/// Runs the test set through the array `trials` times (fresh faults, offsets
/// and input noise per trial) and averages.
inline SimReport run_inference(const Hardware& hw, const Dataset& test, const SimConfig& cfg) {
  cfg.validate();
  if (test.empty()) throw InputError("test set is empty");
  const auto& g = hw.tiles.geometry();

  SimReport rep;
  rep.mode = to_string(cfg.mode);
  rep.selective_precharge = cfg.selective_precharge;
  rep.pipelined = cfg.pipelined;
  rep.geometry = g;
  rep.inputs = test.size();
  rep.trials = cfg.trials;
  rep.mean_active_rows.assign(g.col_divisions, 0.0);

  if (hw.tree) rep.golden_accuracy = accuracy(*hw.tree, test);

  double energy_sum = 0.0;
  std::size_t total_hits = 0;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const auto seeds = trial_seeds(cfg.faults.seed, trial);
    FaultConfig fc = cfg.faults;
    fc.seed = seeds.saf;
    const TileSet faulty = inject_saf(hw.tiles, fc);
    const auto offsets = sample_sa_offsets(g, cfg.faults.sigma_sa, seeds.sa);
    const Dataset inputs = perturb_inputs(test, cfg.faults.sigma_in, seeds.input);
    const Engine engine(faulty, hw.tech, cfg, offsets);
    rep.t_eval = engine.t_eval();
    rep.v_ref1 = engine.v_ref1();
    rep.v_ref2 = engine.v_ref2();

    std::vector<InputResult> results(inputs.size());
    detail::parallel_for(inputs.size(), cfg.threads,
                         [&](std::size_t i) { results[i] = engine.run(encode_input(inputs.rows[i], hw.codebook)); });

    std::size_t hits = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      hits += r.predicted == inputs.labels[i] ? 1 : 0;
      energy_sum += r.energy;
      for (std::size_t k = 0; k < g.col_divisions; ++k) rep.mean_active_rows[k] += static_cast<double>(r.active_rows[k]);
      rep.none_count += r.anomaly == Anomaly::kNoSurvivor ? 1 : 0;
      rep.multi_count += r.anomaly == Anomaly::kMultiSurvivor ? 1 : 0;
      if (hw.tree && r.predicted != predict(*hw.tree, inputs.rows[i])) ++rep.golden_disagreements;
    }
    total_hits += hits;
    rep.trial_accuracy.push_back(static_cast<double>(hits) / static_cast<double>(inputs.size()));
  }

  const double runs = static_cast<double>(cfg.trials * test.size());
  // Pooled over trials; equals the golden accuracy bit-exactly when every trial does.
  rep.accuracy = static_cast<double>(total_hits) / runs;
  rep.accuracy_std = detail::sample_std(rep.trial_accuracy);
  if (hw.tree) rep.accuracy_loss = 100.0 * (rep.golden_accuracy - rep.accuracy);
  for (auto& a : rep.mean_active_rows) a /= runs;

  const Timing timing = latency_and_throughput(g, hw.tech);
  rep.energy_per_dec = energy_sum / runs;
  rep.latency_per_dec = timing.t_total;
  rep.f_max = timing.f_max;
  rep.seq_throughput = timing.seq_throughput;
  rep.pipe_throughput = timing.pipe_throughput;
  const double delay = cfg.pipelined ? 1.0 / timing.pipe_throughput : timing.t_total;
  rep.edp = rep.energy_per_dec * delay;
  const Area a = area(g, hw.tech, g.classes);
  rep.area_mm2 = a.mm2();
  rep.area_um2_per_bit = a.um2_per_bit;
  rep.fom = fom(rep.energy_per_dec, delay, rep.area_mm2);
  return rep;
}

struct SweepGrid {
  std::vector<std::size_t> sizes;
  std::vector<double> p_sa0{0.0};
  std::vector<double> p_sa1{0.0};
  /// When set, p_sa1 follows p_sa0 (SA0 = SA1 = x) and the p_sa1 list is ignored.
  bool coupled_saf = false;
  std::vector<double> sigma_sa{0.0};
  std::vector<double> sigma_in{0.0};
};

struct SweepPoint {
  std::size_t size = 0;
  double p_sa0 = 0.0;
  double p_sa1 = 0.0;
  double sigma_sa = 0.0;
  double sigma_in = 0.0;
  std::vector<std::uint64_t> trial_seeds;
  SimReport report;
};

/// Cartesian sweep over tile size and the non-ideality grids. Each point is
/// averaged over base.trials; seeds derive from base.faults.seed and the
/// point's position in the grid.
inline std::vector<SweepPoint> sweep(const TernaryLUT& lut, const std::optional<DecisionTree>& tree,
                                     const Dataset& test, const TechnologyParams& tech, const SimConfig& base,
                                     const SweepGrid& grid, const MapOptions& map_opts = {}) {
  if (grid.sizes.empty() || grid.p_sa0.empty() || grid.sigma_sa.empty() || grid.sigma_in.empty() ||
      (!grid.coupled_saf && grid.p_sa1.empty()))
    throw InputError("sweep grids must be non-empty");
  const std::vector<double> sa1_axis = grid.coupled_saf ? std::vector<double>{0.0} : grid.p_sa1;

  std::vector<SweepPoint> out;
  std::uint64_t point = 0;
  for (std::size_t s : grid.sizes) {
    Hardware hw{map_lut(lut, s, map_opts), lut.codebook, tech, tree};
    for (double sa0 : grid.p_sa0)
      for (double sa1 : sa1_axis)
        for (double ssa : grid.sigma_sa)
          for (double sin : grid.sigma_in) {
            SimConfig cfg = base;
            cfg.faults.p_sa0 = sa0;
            cfg.faults.p_sa1 = grid.coupled_saf ? sa0 : sa1;
            cfg.faults.sigma_sa = ssa;
            cfg.faults.sigma_in = sin;
            cfg.faults.seed = detail::mix_seed(base.faults.seed, point++);
            SweepPoint p;
            p.size = s;
            p.p_sa0 = cfg.faults.p_sa0;
            p.p_sa1 = cfg.faults.p_sa1;
            p.sigma_sa = ssa;
            p.sigma_in = sin;
            for (std::size_t t = 0; t < cfg.trials; ++t) p.trial_seeds.push_back(detail::mix_seed(cfg.faults.seed, t));
            p.report = run_inference(hw, test, cfg);
            out.push_back(std::move(p));
          }
  }
  return out;
}

}  // namespace treecam
