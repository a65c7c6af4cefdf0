#pragma once

// Placement of a ternary LUT onto S x S resistive TCAM tiles.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treecam/compiler.hpp"
#include "treecam/error.hpp"
#include "treecam/geometry.hpp"

namespace treecam {

enum class Device : std::uint8_t { kHRS = 0, kLRS = 1 };

/// 2T2R cell. Symbol encoding of the device pair (first, second):
/// '0' = {HRS,LRS}, '1' = {LRS,HRS}, 'x' = {HRS,HRS}, '!' = {LRS,LRS}.
/// A masked cell keeps both access transistors off and reads as 'M'.
struct TcamCell {
  Device first = Device::kHRS;
  Device second = Device::kHRS;
  bool masked = false;

  static TcamCell from_symbol(char c) {
    switch (c) {
      case '0': return {Device::kHRS, Device::kLRS, false};
      case '1': return {Device::kLRS, Device::kHRS, false};
      case 'x': return {Device::kHRS, Device::kHRS, false};
      case '!': return {Device::kLRS, Device::kLRS, false};
      case 'M': return {Device::kHRS, Device::kHRS, true};
      default: throw InputError(std::string("unknown cell symbol '") + c + "'");
    }
  }

  char symbol() const {
    if (masked) return 'M';
    if (first == Device::kHRS) return second == Device::kHRS ? 'x' : '0';
    return second == Device::kHRS ? '1' : '!';
  }

  /// Device reached by the ON transistor for key bit `bit` (0 selects the first branch).
  Device on_device(bool bit) const { return bit ? second : first; }

  bool operator==(const TcamCell&) const = default;
};

struct MapOptions {
  std::uint64_t seed = 0;
  /// Mask the extension columns of the final column-wise division. When false
  /// they are stored as ordinary energy-bearing 'x' cells.
  bool masked_padding = true;
};

/// Physical array: N_rwd x N_cwd tiles of S x S cells. Column 0 of the first
/// column-wise division is the decoder column; rows past the LUT are rogue.
class TileSet {
 public:
  TileSet() = default;
  explicit TileSet(const TileGeometry& g)
      : geometry_(g), cells_(g.physical_rows() * g.physical_columns()), class_codes_(g.physical_rows(), 0) {}

  const TileGeometry& geometry() const { return geometry_; }

  TcamCell& cell(std::size_t row, std::size_t col) { return cells_[row * geometry_.physical_columns() + col]; }
  const TcamCell& cell(std::size_t row, std::size_t col) const { return cells_[row * geometry_.physical_columns() + col]; }

  /// Cell (r, c) of tile (row_div, col_div).
  const TcamCell& tile_cell(std::size_t row_div, std::size_t col_div, std::size_t r, std::size_t c) const {
    return cell(row_div * geometry_.size + r, col_div * geometry_.size + c);
  }

  int class_code(std::size_t row) const { return class_codes_[row]; }
  void set_class_code(std::size_t row, int code) { class_codes_[row] = code; }

  bool is_rogue(std::size_t row) const { return row >= geometry_.rows; }

  const std::vector<int>& class_labels() const { return class_labels_; }
  void set_class_labels(std::vector<int> labels) { class_labels_ = std::move(labels); }

  bool operator==(const TileSet&) const = default;

 private:
  TileGeometry geometry_;
  std::vector<TcamCell> cells_;
  std::vector<int> class_codes_;
  std::vector<int> class_labels_;
};

inline TileSet map_lut(const TernaryLUT& lut, std::size_t size, const MapOptions& opts = {}) {
  const auto g = plan_tiles(lut.width(), lut.num_rows(), lut.num_classes(), size);
  TileSet ts(g);
  ts.set_class_labels(lut.class_labels);
  const std::size_t cols = g.physical_columns();
  const auto padding = opts.masked_padding ? TcamCell::from_symbol('M') : TcamCell::from_symbol('x');

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> any_class(0, static_cast<int>(g.classes) - 1);

  for (std::size_t r = 0; r < g.physical_rows(); ++r) {
    const bool rogue = r >= g.rows;
    ts.cell(r, 0) = TcamCell::from_symbol(rogue ? '1' : '0');
    for (std::size_t c = 1; c < cols; ++c) {
      if (c > g.width)
        ts.cell(r, c) = padding;
      else
        ts.cell(r, c) = TcamCell::from_symbol(rogue ? 'x' : lut.rows[r][c - 1]);
    }
    ts.set_class_code(r, rogue ? any_class(rng) : lut.classes[r]);
  }
  return ts;
}

/// Inverse of map_lut: drops the decoder column, padding and rogue rows.
inline TernaryLUT unmap(const TileSet& ts) {
  const auto& g = ts.geometry();
  TernaryLUT lut;
  lut.class_labels = ts.class_labels();
  for (std::size_t r = 0; r < g.rows; ++r) {
    std::string row(g.width, ' ');
    for (std::size_t c = 0; c < g.width; ++c) row[c] = ts.cell(r, c + 1).symbol();
    lut.rows.push_back(std::move(row));
    lut.classes.push_back(ts.class_code(r));
  }
  return lut;
}

/// Dump: a header line, then per tile "tile <row_div> <col_div> <S>" and S
/// lines of S symbols from {0,1,x,M,!}; rows of the final column-wise
/// division carry " | <class code>".
inline void write_tiles(std::ostream& os, const TileSet& ts) {
  const auto& g = ts.geometry();
  os << "tileset size " << g.size << " width " << g.width << " rows " << g.rows << " classes " << g.classes
     << " row_divisions " << g.row_divisions << " col_divisions " << g.col_divisions << " class_bits " << g.class_bits
     << '\n';
  os << "labels";
  for (int l : ts.class_labels()) os << ' ' << l;
  os << '\n';
  for (std::size_t rd = 0; rd < g.row_divisions; ++rd) {
    for (std::size_t cd = 0; cd < g.col_divisions; ++cd) {
      os << "tile " << rd << ' ' << cd << ' ' << g.size << '\n';
      for (std::size_t r = 0; r < g.size; ++r) {
        std::string line(g.size, ' ');
        for (std::size_t c = 0; c < g.size; ++c) line[c] = ts.tile_cell(rd, cd, r, c).symbol();
        os << line;
        if (cd + 1 == g.col_divisions) os << " | " << ts.class_code(rd * g.size + r);
        os << '\n';
      }
    }
  }
}

inline TileSet read_tiles(std::istream& is) {
  auto expect = [&](const std::string& key) {
    std::string word;
    if (!(is >> word) || word != key) throw InputError("tile dump: expected '" + key + "'");
  };
  skip_comments(is);
  TileGeometry g;
  expect("tileset");
  expect("size");
  is >> g.size;
  expect("width");
  is >> g.width;
  expect("rows");
  is >> g.rows;
  expect("classes");
  is >> g.classes;
  expect("row_divisions");
  is >> g.row_divisions;
  expect("col_divisions");
  is >> g.col_divisions;
  expect("class_bits");
  is >> g.class_bits;
  if (!is) throw InputError("tile dump: bad header");
  if (plan_tiles(g.width, g.rows, g.classes, g.size) != g) throw InputError("tile dump: inconsistent geometry");

  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  std::istringstream ls(line);
  std::string word;
  ls >> word;
  if (word != "labels") throw InputError("tile dump: expected labels line");
  std::vector<int> labels;
  for (int l; ls >> l;) labels.push_back(l);

  TileSet ts(g);
  ts.set_class_labels(std::move(labels));
  for (std::size_t rd = 0; rd < g.row_divisions; ++rd) {
    for (std::size_t cd = 0; cd < g.col_divisions; ++cd) {
      std::size_t r_in = 0, c_in = 0, s_in = 0;
      expect("tile");
      if (!(is >> r_in >> c_in >> s_in) || r_in != rd || c_in != cd || s_in != g.size)
        throw InputError("tile dump: tiles out of order");
      for (std::size_t r = 0; r < g.size; ++r) {
        std::string symbols;
        if (!(is >> symbols) || symbols.size() != g.size) throw InputError("tile dump: bad tile row");
        for (std::size_t c = 0; c < g.size; ++c) ts.cell(rd * g.size + r, cd * g.size + c) = TcamCell::from_symbol(symbols[c]);
        if (cd + 1 == g.col_divisions) {
          std::string bar;
          int code = 0;
          if (!(is >> bar >> code) || bar != "|") throw InputError("tile dump: missing class code");
          if (code < 0 || static_cast<std::size_t>(code) >= g.classes) throw InputError("tile dump: class code out of range");
          ts.set_class_code(rd * g.size + r, code);
        }
      }
    }
  }
  return ts;
}

}  // namespace treecam
