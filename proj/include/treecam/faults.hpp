#pragma once

// Hardware non-idealities: stuck-at device faults, sense-amplifier offset
// variability and Gaussian noise on normalized inputs.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "treecam/dataset.hpp"
#include "treecam/error.hpp"
#include "treecam/geometry.hpp"
#include "treecam/mapper.hpp"

namespace treecam {

struct FaultConfig {
  double p_sa0 = 0.0;     // device stuck at HRS
  double p_sa1 = 0.0;     // device stuck at LRS
  double sigma_sa = 0.0;  // SA reference offset std-dev, volts
  double sigma_in = 0.0;  // input noise std-dev, normalized units
  std::uint64_t seed = 0;

  void validate() const {
    if (p_sa0 < 0.0 || p_sa1 < 0.0 || p_sa0 > 1.0 || p_sa1 > 1.0 || p_sa0 + p_sa1 > 1.0 + 1e-12)
      throw InputError("stuck-at probabilities must lie in [0,1] and sum to at most 1");
    if (sigma_sa < 0.0 || sigma_in < 0.0) throw InputError("noise deviations must be non-negative");
  }

  bool has_saf() const { return p_sa0 > 0.0 || p_sa1 > 0.0; }
};

/// Each device of every unmasked cell independently sticks at HRS with
/// probability p_sa0 or at LRS with probability p_sa1. Returns a new array.
inline TileSet inject_saf(const TileSet& ts, const FaultConfig& fc) {
  fc.validate();
  TileSet out = ts;
  if (!fc.has_saf()) return out;
  std::mt19937_64 rng(fc.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto stick = [&](Device d) {
    const double draw = u(rng);
    if (draw < fc.p_sa0) return Device::kHRS;
    if (draw < fc.p_sa0 + fc.p_sa1) return Device::kLRS;
    return d;
  };
  const auto& g = ts.geometry();
  for (std::size_t r = 0; r < g.physical_rows(); ++r) {
    for (std::size_t c = 0; c < g.physical_columns(); ++c) {
      TcamCell& cell = out.cell(r, c);
      if (cell.masked) continue;
      cell.first = stick(cell.first);
      cell.second = stick(cell.second);
    }
  }
  return out;
}

/// Static per-SA reference offsets, indexed [col_division][physical_row].
using SaOffsets = std::vector<std::vector<double>>;

inline SaOffsets sample_sa_offsets(const TileGeometry& g, double sigma_sa, std::uint64_t seed) {
  if (sigma_sa < 0.0) throw InputError("sigma_sa must be non-negative");
  SaOffsets offsets(g.col_divisions, std::vector<double>(g.physical_rows(), 0.0));
  if (sigma_sa == 0.0) return offsets;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sigma_sa);
  for (auto& division : offsets)
    for (auto& o : division) o = z(rng);
  return offsets;
}

/// Adds i.i.d. N(0, sigma_in^2) to every feature value, without clamping.
inline Dataset perturb_inputs(const Dataset& d, double sigma_in, std::uint64_t seed) {
  if (sigma_in < 0.0) throw InputError("sigma_in must be non-negative");
  Dataset out = d;
  if (sigma_in == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sigma_in);
  for (auto& row : out.rows)
    for (auto& v : row) v += z(rng);
  return out;
}

}  // namespace treecam
