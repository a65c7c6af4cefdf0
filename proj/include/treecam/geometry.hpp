#pragma once

#include <cstddef>
#include <stdexcept>

#include "treecam/error.hpp"

namespace treecam {

/// How an m x W table is cut into S x S tiles. Column-wise divisions are
/// evaluated one after another; row-wise divisions run in parallel. The first
/// physical column is the decoder column, hence W + 1.
struct TileGeometry {
  std::size_t size = 0;           // S
  std::size_t width = 0;          // W, encoded bits per row
  std::size_t rows = 0;           // m, LUT rows
  std::size_t classes = 0;        // C
  std::size_t col_divisions = 0;  // N_cwd
  std::size_t row_divisions = 0;  // N_rwd
  std::size_t class_bits = 0;

  std::size_t tiles() const { return col_divisions * row_divisions; }
  std::size_t physical_rows() const { return row_divisions * size; }
  std::size_t physical_columns() const { return col_divisions * size; }
  std::size_t rogue_rows() const { return physical_rows() - rows; }
  /// Columns past the encoded width in the final column-wise division.
  std::size_t padding_columns() const { return physical_columns() - (width + 1); }
  /// Cells per row of the final division that carry decoder or LUT symbols.
  std::size_t last_division_used() const { return size - padding_columns(); }

  bool operator==(const TileGeometry&) const = default;
};

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

inline TileGeometry plan_tiles(std::size_t width, std::size_t rows, std::size_t classes, std::size_t size) {
  if (width < 1 || rows < 1 || classes < 1) throw InputError("tile plan needs W, m, C >= 1");
  if (size < 2) throw InputError("tile size must be at least 2");
  TileGeometry g;
  g.size = size;
  g.width = width;
  g.rows = rows;
  g.classes = classes;
  g.col_divisions = ceil_div(width + 1, size);
  g.row_divisions = ceil_div(rows, size);
  g.class_bits = ceil_log2(classes);
  return g;
}

}  // namespace treecam
