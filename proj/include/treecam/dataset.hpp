#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "treecam/error.hpp"

namespace treecam {

using FeatureVector = std::vector<double>;

/// Tabular classification data. Every row has feature_names.size() values and
/// every label indexes class_names.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t num_features() const { return feature_names.size(); }
  std::size_t num_classes() const { return class_names.size(); }
  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  /// Subset with the same schema, in the order given by `indices`.
  Dataset select(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
      out.rows.push_back(rows.at(i));
      out.labels.push_back(labels.at(i));
    }
    return out;
  }

  void validate() const {
    if (rows.size() != labels.size()) throw ConsistencyError("dataset: row/label count mismatch");
    for (const auto& r : rows)
      if (r.size() != num_features()) throw ConsistencyError("dataset: ragged row");
    for (int l : labels)
      if (l < 0 || static_cast<std::size_t>(l) >= num_classes())
        throw ConsistencyError("dataset: label out of range");
  }
};

struct CsvOptions {
  bool has_header = true;
  /// Defaults to the last column.
  std::variant<std::monostate, std::size_t, std::string> label_column;
};

struct CsvLoad {
  Dataset data;
  std::size_t dropped = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    auto comma = rest.find(',');
    cells.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

inline bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

inline bool parse_real(std::string_view cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace detail

/// Reads a comma-separated file. Rows with an empty or missing cell are
/// dropped and counted; any other non-numeric feature cell is an error.
/// Class names are assigned indices in order of first appearance.
inline CsvLoad load_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");

  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty() || line.front() == '#') continue;
    records.push_back(detail::split_csv_line(line));
  }
  if (records.empty()) throw InputError("'" + path + "' is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (opts.has_header) {
    header = records.front();
    first_data = 1;
  }
  const std::size_t width = opts.has_header ? header.size() : records.front().size();

  std::size_t label_col = width - 1;
  if (const auto* idx = std::get_if<std::size_t>(&opts.label_column)) {
    label_col = *idx;
  } else if (const auto* name = std::get_if<std::string>(&opts.label_column)) {
    if (!opts.has_header) throw InputError("label column by name requires a header row");
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw InputError("no column named '" + *name + "'");
    label_col = static_cast<std::size_t>(it - header.begin());
  }
  if (width < 2 || label_col >= width) throw InputError("label column out of range");

  CsvLoad result;
  Dataset& d = result.data;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_col) continue;
    d.feature_names.push_back(opts.has_header ? header[c] : "f" + std::to_string(d.feature_names.size()));
  }

  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto& cells = records[r];
    if (cells.size() != width ||
        std::any_of(cells.begin(), cells.end(), [](const std::string& c) { return detail::is_missing(c); })) {
      ++result.dropped;
      continue;
    }
    FeatureVector row;
    row.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) continue;
      double v = 0.0;
      if (!detail::parse_real(cells[c], v))
        throw InputError(path + ":" + std::to_string(r + 1) + ": non-numeric feature cell '" + cells[c] + "'");
      row.push_back(v);
    }
    const std::string& label = cells[label_col];
    auto it = std::find(d.class_names.begin(), d.class_names.end(), label);
    if (it == d.class_names.end()) {
      d.class_names.push_back(label);
      it = d.class_names.end() - 1;
    }
    d.rows.push_back(std::move(row));
    d.labels.push_back(static_cast<int>(it - d.class_names.begin()));
  }
  if (d.empty()) throw InputError("'" + path + "' has no complete rows");
  return result;
}

/// Per-feature min/max used for min-max scaling.
struct NormParams {
  std::vector<double> min;
  std::vector<double> max;

  double apply(std::size_t feature, double v) const {
    const double span = max[feature] - min[feature];
    return span > 0.0 ? (v - min[feature]) / span : 0.0;
  }
};

inline NormParams fit_norm(const Dataset& d) {
  if (d.empty()) throw InputError("cannot normalize an empty dataset");
  NormParams p;
  p.min = d.rows.front();
  p.max = d.rows.front();
  for (const auto& row : d.rows) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      p.min[f] = std::min(p.min[f], row[f]);
      p.max[f] = std::max(p.max[f], row[f]);
    }
  }
  return p;
}

/// Scales with previously fitted parameters. Values outside the fitted range
/// land outside [0,1].
inline Dataset apply_norm(const Dataset& d, const NormParams& p) {
  Dataset out = d;
  for (auto& row : out.rows)
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = p.apply(f, row[f]);
  return out;
}

/// Min-max scaling fitted on `d` itself; constant features map to 0.
inline std::pair<Dataset, NormParams> normalize(const Dataset& d) {
  NormParams p = fit_norm(d);
  return {apply_norm(d, p), p};
}

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle then split; the test partition gets round(n * test_fraction) rows.
inline TrainTestSplit split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InputError("test fraction must lie in (0,1)");
  const auto n = d.size();
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test >= n) throw InputError("split leaves an empty partition");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  return {d.select(train_idx), d.select(test_idx)};
}

}  // namespace treecam
