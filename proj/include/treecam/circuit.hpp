#pragma once

// Closed-form electrical models for resistive TCAM rows: match-line
// resistance, dynamic range, sensing time, energy, timing and area.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "treecam/error.hpp"
#include "treecam/geometry.hpp"

namespace treecam {

/// Circuit constants. Resistances in ohms, capacitance in farads, times in
/// seconds, energies in joules, areas in square micrometres.
struct TechnologyParams {
  double r_lrs = 5e3;
  double r_hrs = 2.5e6;
  double r_on = 15e3;
  double r_off = 24.25e6;
  double c_in = 50e-15;
  double v_dd = 1.0;

  double tau_pchg = 50e-12;
  double t_sa = 160e-12;
  double e_sa = 5e-15;
  double t_mem = 1e-9;
  double e_mem_bit = 10e-15;
  /// Initiation interval, in clock cycles, of the pipelined organisation.
  double pipeline_interval = 3.0;

  double a_2t2r = 0.014;
  double a_sa = 0.12;
  double a_dff = 0.06;
  double a_sp = 0.04;
  double a_1t1r = 0.01;
  double a_sa2 = 0.5;

  void validate() const {
    const double positive[] = {r_lrs, r_hrs, r_on, r_off, c_in, v_dd, tau_pchg, t_sa, t_mem, pipeline_interval};
    for (double v : positive)
      if (!(v > 0.0)) throw InputError("technology parameters must be positive");
    const double non_negative[] = {e_sa, e_mem_bit, a_2t2r, a_sa, a_dff, a_sp, a_1t1r, a_sa2};
    for (double v : non_negative)
      if (!(v >= 0.0)) throw InputError("technology energies and areas must be non-negative");
    if (!(r_hrs > r_lrs)) throw InputError("R_HRS must exceed R_LRS");
    if (!(r_off > r_on)) throw InputError("R_OFF must exceed R_ON");
  }
};

/// Cell population of one row segment, classified by which resistive device
/// each access transistor reaches. A cell matches when its ON transistor
/// reaches an HRS device.
struct RowState {
  std::size_t match_binary = 0;     // ON->HRS, OFF->LRS: stored 0/1 agreeing with the key
  std::size_t match_dontcare = 0;   // ON->HRS, OFF->HRS: stored x
  std::size_t mismatch = 0;         // ON->LRS, OFF->HRS: stored 0/1 disagreeing with the key
  std::size_t mismatch_stuck = 0;   // ON->LRS, OFF->LRS: {LRS,LRS} fault pair
  std::size_t masked = 0;           // both transistors off

  std::size_t cells() const { return match_binary + match_dontcare + mismatch + mismatch_stuck + masked; }
  std::size_t unmasked() const { return cells() - masked; }
  std::size_t mismatches() const { return mismatch + mismatch_stuck; }
  bool matches() const { return mismatches() == 0; }
};

inline double row_conductance(const RowState& rs, const TechnologyParams& tp) {
  const double on_h = 1.0 / (tp.r_on + tp.r_hrs);
  const double on_l = 1.0 / (tp.r_on + tp.r_lrs);
  const double off_h = 1.0 / (tp.r_off + tp.r_hrs);
  const double off_l = 1.0 / (tp.r_off + tp.r_lrs);
  return static_cast<double>(rs.match_binary) * (on_h + off_l) + static_cast<double>(rs.match_dontcare) * (on_h + off_h) +
         static_cast<double>(rs.mismatch) * (on_l + off_h) + static_cast<double>(rs.mismatch_stuck) * (on_l + off_l) +
         static_cast<double>(rs.masked) * (2.0 * off_h);
}

/// Equivalent match-line resistance: all cells in parallel, each cell the
/// parallel pair of its ON branch and its OFF branch.
inline double row_resistance(const RowState& rs, const TechnologyParams& tp) {
  if (rs.unmasked() == 0) throw InputError("row has no unmasked cells");
  return 1.0 / row_conductance(rs, tp);
}

struct ReferenceRows {
  double r_fm = 0.0;   // full match
  double r_1mm = 0.0;  // exactly one mismatch
  double gamma() const { return r_1mm / r_fm; }
};

/// Full-match and one-mismatch resistances of a row with `cells` cells of
/// which `masked` are masked.
inline ReferenceRows reference_rows(std::size_t cells, const TechnologyParams& tp, std::size_t masked = 0) {
  if (masked >= cells) throw InputError("reference row needs at least one unmasked cell");
  const std::size_t used = cells - masked;
  RowState full{.match_binary = used, .masked = masked};
  RowState one{.match_binary = used - 1, .mismatch = 1, .masked = masked};
  return {row_resistance(full, tp), row_resistance(one, tp)};
}

inline double dynamic_range_cap(double gamma, double v_dd) {
  if (!(gamma > 0.0) || gamma >= 1.0) return 0.0;
  return v_dd * std::pow(gamma, gamma / (1.0 - gamma)) * (1.0 - gamma);
}

/// Match-line voltage gap between full match and one mismatch at the optimal
/// sensing time for a row of `cells` cells.
inline double dynamic_range_cap(std::size_t cells, const TechnologyParams& tp) {
  if (cells < 1) throw InputError("row size must be positive");
  return dynamic_range_cap(reference_rows(cells, tp).gamma(), tp.v_dd);
}

/// Largest row size whose dynamic range still meets `d_limit`; 0 if none.
inline std::size_t max_row_size(double d_limit, const TechnologyParams& tp) {
  if (!(d_limit > 0.0 && d_limit < tp.v_dd)) throw InputError("D_limit must lie in (0, V_DD)");
  auto ok = [&](std::size_t s) { return dynamic_range_cap(s, tp) >= d_limit; };
  if (!ok(1)) return 0;
  std::size_t lo = 1;
  std::size_t hi = 2;
  while (ok(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > (std::size_t{1} << 30)) return lo;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Largest power of two not exceeding `max_cells` (0 stays 0).
inline std::size_t power_of_two_size(std::size_t max_cells) {
  if (max_cells == 0) return 0;
  std::size_t s = 1;
  while (s * 2 <= max_cells) s *= 2;
  return s;
}

inline double t_opt(double r_fm, double r_1mm, double c_in) {
  if (!(r_fm > r_1mm && r_1mm > 0.0)) throw InputError("T_opt needs R_fm > R_1mm > 0");
  return c_in * std::log(r_fm / r_1mm) * (r_fm * r_1mm) / (r_fm - r_1mm);
}

/// Capacitive discharge of a precharged match line through R_row.
inline double ml_voltage(double r_row, double t, const TechnologyParams& tp) {
  if (std::isinf(r_row)) return tp.v_dd;
  return tp.v_dd * std::exp(-t / (r_row * tp.c_in));
}

/// Sensing operating point for rows of `cells` cells (`masked` of them masked):
/// the optimal evaluation time and a midpoint reference voltage.
struct SensePoint {
  ReferenceRows ref;
  double t_eval = 0.0;
  double v_fm = 0.0;
  double v_1mm = 0.0;
  double v_ref = 0.0;
};

inline SensePoint sense_point(std::size_t cells, const TechnologyParams& tp, std::size_t masked = 0,
                              double t_eval = std::numeric_limits<double>::quiet_NaN()) {
  SensePoint p;
  p.ref = reference_rows(cells, tp, masked);
  p.t_eval = std::isnan(t_eval) ? t_opt(p.ref.r_fm, p.ref.r_1mm, tp.c_in) : t_eval;
  p.v_fm = ml_voltage(p.ref.r_fm, p.t_eval, tp);
  p.v_1mm = ml_voltage(p.ref.r_1mm, p.t_eval, tp);
  p.v_ref = 0.5 * (p.v_fm + p.v_1mm);
  return p;
}

/// Recharge energy of the sensing capacitor after evaluating for t_eval.
inline double tcam_energy(double r_row, double t_eval, const TechnologyParams& tp) {
  return tp.c_in * tp.v_dd * (tp.v_dd - ml_voltage(r_row, t_eval, tp));
}

/// Energy of one active row: match-line recharge plus its sense amplifier.
inline double row_energy(const RowState& rs, double t_eval, const TechnologyParams& tp) {
  return tcam_energy(row_resistance(rs, tp), t_eval, tp) + tp.e_sa;
}

/// Class read-out of the surviving row: 1T1R bits plus their sense amplifier.
inline double mem_energy(std::size_t class_bits, const TechnologyParams& tp) {
  return static_cast<double>(class_bits) * tp.e_mem_bit + tp.e_sa;
}

struct Timing {
  double t_opt = 0.0;
  double t_cwd = 0.0;       // one column-wise division
  double t_total = 0.0;     // N_cwd * T_cwd + T_mem
  double f_max = 0.0;
  double seq_throughput = 0.0;
  double pipe_throughput = 0.0;
};

inline Timing latency_and_throughput(const TileGeometry& g, const TechnologyParams& tp) {
  Timing t;
  const auto ref = reference_rows(g.size, tp);
  t.t_opt = treecam::t_opt(ref.r_fm, ref.r_1mm, tp.c_in);
  t.t_cwd = 3.0 * tp.tau_pchg + t.t_opt + tp.t_sa;
  t.t_total = static_cast<double>(g.col_divisions) * t.t_cwd + tp.t_mem;
  t.f_max = 1.0 / std::max(t.t_cwd, tp.t_mem);
  t.seq_throughput = t.f_max / static_cast<double>(g.col_divisions);
  t.pipe_throughput = t.f_max / tp.pipeline_interval;
  return t;
}

struct Area {
  double um2 = 0.0;
  double mm2() const { return um2 * 1e-6; }
  double um2_per_bit = 0.0;
};

inline Area area(const TileGeometry& g, const TechnologyParams& tp, std::size_t num_classes) {
  const double s = static_cast<double>(g.size);
  const double nt = static_cast<double>(g.tiles());
  const double class_cols = num_classes > 1 ? std::log2(static_cast<double>(num_classes)) : 0.0;
  Area a;
  a.um2 = nt * (s * s * tp.a_2t2r + s * (tp.a_sa + tp.a_dff + tp.a_sp)) + s * class_cols * (tp.a_1t1r + tp.a_sa2);
  a.um2_per_bit = a.um2 / (nt * s * s);
  return a;
}

/// Energy-delay-area product in J*s*mm^2.
inline double fom(double energy_j, double delay_s, double area_mm2) { return energy_j * delay_s * area_mm2; }

}  // namespace treecam
