#pragma once

// Tree-to-LUT compilation: path parsing, column reduction and adaptive
// unary/ternary encoding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treecam/dataset.hpp"
#include "treecam/error.hpp"
#include "treecam/tree.hpp"

namespace treecam {

enum class Relation { kLessEqual, kGreater };

struct Condition {
  int feature = 0;
  Relation relation = Relation::kLessEqual;
  double threshold = 0.0;
  bool operator==(const Condition&) const = default;
};

struct Path {
  std::vector<Condition> conditions;  // root-to-leaf order
  int class_index = 0;                // tree class index
};

struct PathTable {
  std::size_t num_features = 0;
  std::vector<Path> rows;
};

/// One row per leaf, enumerated left subtree first.
inline PathTable parse_paths(const DecisionTree& t) {
  t.validate();
  PathTable table;
  table.num_features = t.num_features();
  struct Frame {
    int node;
    std::vector<Condition> conds;
  };
  std::vector<Frame> stack{{t.root, {}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const auto& n = t.nodes[static_cast<std::size_t>(f.node)];
    if (n.leaf) {
      table.rows.push_back({std::move(f.conds), n.class_index});
      continue;
    }
    auto right = f.conds;
    right.push_back({n.feature, Relation::kGreater, n.threshold});
    f.conds.push_back({n.feature, Relation::kLessEqual, n.threshold});
    stack.push_back({n.right, std::move(right)});
    stack.push_back({n.left, std::move(f.conds)});
  }
  return table;
}

/// Comparator states of a reduced rule: '0' is f <= th1, '1' is f > th1,
/// '2' is th1 < f <= th2, and kNone places no constraint.
enum class Comparator { kLessEqual, kGreater, kBetween, kNone };

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

struct Rule {
  Comparator comparator = Comparator::kNone;
  double th1 = kAbsent;
  double th2 = kAbsent;

  static Rule none() { return {}; }
  static Rule at_most(double t) { return {Comparator::kLessEqual, t, kAbsent}; }
  static Rule above(double t) { return {Comparator::kGreater, t, kAbsent}; }
  static Rule between(double lo, double hi) { return {Comparator::kBetween, lo, hi}; }

  bool contains(double v) const {
    switch (comparator) {
      case Comparator::kLessEqual: return v <= th1;
      case Comparator::kGreater: return v > th1;
      case Comparator::kBetween: return v > th1 && v <= th2;
      case Comparator::kNone: return true;
    }
    return false;
  }

  bool operator==(const Rule& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    return comparator == o.comparator && same(th1, o.th1) && same(th2, o.th2);
  }
};

inline char comparator_symbol(Comparator c) {
  switch (c) {
    case Comparator::kLessEqual: return '0';
    case Comparator::kGreater: return '1';
    case Comparator::kBetween: return '2';
    case Comparator::kNone: return 'N';
  }
  return '?';
}

struct ReducedTable {
  std::size_t num_features = 0;
  std::vector<std::vector<Rule>> rules;  // m x N
  /// Per row, the natural-number class code assigned during reduction.
  std::vector<int> classes;
  /// class_labels[code] is the tree class index for that code.
  std::vector<int> class_labels;

  std::size_t num_rows() const { return rules.size(); }
};

/// Collapses each path's conditions into one interval rule per feature.
/// Class codes are handed out in order of first appearance.
inline ReducedTable reduce_columns(const PathTable& p) {
  ReducedTable r;
  r.num_features = p.num_features;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& path : p.rows) {
    std::vector<double> lower(p.num_features, -inf);
    std::vector<double> upper(p.num_features, inf);
    for (const auto& c : path.conditions) {
      auto f = static_cast<std::size_t>(c.feature);
      if (c.relation == Relation::kGreater)
        lower[f] = std::max(lower[f], c.threshold);
      else
        upper[f] = std::min(upper[f], c.threshold);
    }
    std::vector<Rule> row(p.num_features);
    for (std::size_t f = 0; f < p.num_features; ++f) {
      const bool has_lo = std::isfinite(lower[f]);
      const bool has_hi = std::isfinite(upper[f]);
      if (has_lo && has_hi) {
        if (!(lower[f] < upper[f]))
          throw ConsistencyError("empty interval on feature " + std::to_string(f) + " (malformed tree)");
        row[f] = Rule::between(lower[f], upper[f]);
      } else if (has_hi) {
        row[f] = Rule::at_most(upper[f]);
      } else if (has_lo) {
        row[f] = Rule::above(lower[f]);
      }
    }
    auto it = std::find(r.class_labels.begin(), r.class_labels.end(), path.class_index);
    if (it == r.class_labels.end()) {
      r.class_labels.push_back(path.class_index);
      it = r.class_labels.end() - 1;
    }
    r.rules.push_back(std::move(row));
    r.classes.push_back(static_cast<int>(it - r.class_labels.begin()));
  }
  return r;
}

/// Sorted unique thresholds of one feature and the n = T + 1 exclusive ranges
/// they induce. Range k (1-based) is (t[k-2], t[k-1]] with open outer ends; its
/// unary code has k trailing ones and n - k leading zeros.
struct FeatureCodes {
  std::vector<double> thresholds;

  std::size_t width() const { return thresholds.size() + 1; }

  std::string code(std::size_t range) const {
    const auto n = width();
    if (range < 1 || range > n) throw ConsistencyError("range index out of bounds");
    return std::string(n - range, '0') + std::string(range, '1');
  }

  /// 1-based index of the exclusive range holding v (ranges are closed on the right).
  std::size_t range_of(double v) const {
    if (std::isnan(v)) throw InputError("cannot encode a NaN feature value");
    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), v);
    return static_cast<std::size_t>(it - thresholds.begin()) + 1;
  }

  std::size_t position_of(double t) const {
    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), t);
    if (it == thresholds.end() || *it != t) throw ConsistencyError("rule threshold not present in codebook");
    return static_cast<std::size_t>(it - thresholds.begin());
  }
};

struct FeatureCodebook {
  std::vector<FeatureCodes> features;

  std::size_t total_width() const {
    std::size_t w = 0;
    for (const auto& f : features) w += f.width();
    return w;
  }
};

inline FeatureCodebook build_codebook(const ReducedTable& r) {
  FeatureCodebook cb;
  cb.features.resize(r.num_features);
  for (const auto& row : r.rules) {
    for (std::size_t f = 0; f < r.num_features; ++f) {
      for (double t : {row[f].th1, row[f].th2})
        if (std::isfinite(t)) cb.features[f].thresholds.push_back(t);
    }
  }
  for (auto& fc : cb.features) {
    std::sort(fc.thresholds.begin(), fc.thresholds.end());
    fc.thresholds.erase(std::unique(fc.thresholds.begin(), fc.thresholds.end()), fc.thresholds.end());
  }
  return cb;
}

/// Ternary code of a rule: the code of its lowest spanned range with every
/// position that differs from the highest spanned range's code set to 'x'.
inline std::string encode_rule(const Rule& rule, const FeatureCodes& fc) {
  const auto n = fc.width();
  std::size_t lb = 1;
  std::size_t ub = n;
  switch (rule.comparator) {
    case Comparator::kNone: break;
    case Comparator::kLessEqual: ub = fc.position_of(rule.th1) + 1; break;
    case Comparator::kGreater: lb = fc.position_of(rule.th1) + 2; break;
    case Comparator::kBetween:
      lb = fc.position_of(rule.th1) + 2;
      ub = fc.position_of(rule.th2) + 1;
      break;
  }
  if (lb > ub) throw ConsistencyError("rule spans no range");
  const std::string low = fc.code(lb);
  const std::string high = fc.code(ub);
  std::string out = low;
  for (std::size_t i = 0; i < n; ++i)
    if (low[i] != high[i]) out[i] = 'x';
  return out;
}

/// Encoded table over {0,1,x}. Columns are grouped by feature in dataset order.
struct TernaryLUT {
  std::vector<std::string> rows;
  std::vector<int> classes;       // class code per row
  std::vector<int> class_labels;  // code -> tree class index
  std::vector<std::size_t> segment_widths;
  FeatureCodebook codebook;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t width() const { return rows.empty() ? codebook.total_width() : rows.front().size(); }
  std::size_t num_classes() const { return class_labels.size(); }
  /// Total encoded bits excluding class storage: rows * sum of segment widths.
  std::size_t n_total() const { return num_rows() * width(); }

  /// Column index -> owning feature.
  std::vector<std::size_t> column_owner() const {
    std::vector<std::size_t> owner;
    for (std::size_t f = 0; f < segment_widths.size(); ++f) owner.insert(owner.end(), segment_widths[f], f);
    return owner;
  }
};

inline TernaryLUT build_lut(const ReducedTable& r) {
  TernaryLUT lut;
  lut.codebook = build_codebook(r);
  lut.classes = r.classes;
  lut.class_labels = r.class_labels;
  for (const auto& fc : lut.codebook.features) lut.segment_widths.push_back(fc.width());
  lut.rows.reserve(r.num_rows());
  for (const auto& rules : r.rules) {
    std::string row;
    row.reserve(lut.codebook.total_width());
    for (std::size_t f = 0; f < r.num_features; ++f) row += encode_rule(rules[f], lut.codebook.features[f]);
    lut.rows.push_back(std::move(row));
  }
  return lut;
}

inline TernaryLUT compile_tree(const DecisionTree& t) { return build_lut(reduce_columns(parse_paths(t))); }

/// Binary search key: per feature, the unary code of the range holding x[f].
inline std::string encode_input(const FeatureVector& x, const FeatureCodebook& cb) {
  if (x.size() != cb.features.size()) throw InputError("input has wrong number of features");
  std::string out;
  out.reserve(cb.total_width());
  for (std::size_t f = 0; f < x.size(); ++f) {
    const auto& fc = cb.features[f];
    out += fc.code(fc.range_of(x[f]));
  }
  return out;
}

inline bool ternary_match(std::string_view stored, std::string_view key) {
  if (stored.size() != key.size()) return false;
  for (std::size_t i = 0; i < stored.size(); ++i)
    if (stored[i] != 'x' && stored[i] != key[i]) return false;
  return true;
}

/// Skips leading '#' comment lines.
inline void skip_comments(std::istream& is) {
  std::string line;
  while (is.peek() == '#') std::getline(is, line);
}

/// Text dump: a header line, a widths line, a labels line (class code ->
/// tree class index), then one "<symbols> : <class code>" line per row.
inline void write_lut(std::ostream& os, const TernaryLUT& lut) {
  os << "lut rows " << lut.num_rows() << " width " << lut.width() << " classes " << lut.num_classes() << '\n';
  os << "widths";
  for (auto w : lut.segment_widths) os << ' ' << w;
  os << "\nlabels";
  for (auto l : lut.class_labels) os << ' ' << l;
  os << '\n';
  for (std::size_t j = 0; j < lut.num_rows(); ++j) os << lut.rows[j] << " : " << lut.classes[j] << '\n';
}

/// Reads a dump produced by write_lut. The codebook is not part of the dump.
inline TernaryLUT read_lut(std::istream& is) {
  skip_comments(is);
  TernaryLUT lut;
  std::string tag;
  std::size_t rows = 0;
  std::size_t width = 0;
  std::size_t classes = 0;
  std::string k1, k2, k3;
  if (!(is >> tag >> k1 >> rows >> k2 >> width >> k3 >> classes) || tag != "lut")
    throw InputError("LUT dump: bad header");
  std::string line;
  std::getline(is, line);
  if (!std::getline(is, line)) throw InputError("LUT dump: missing widths line");
  std::istringstream ws(line);
  ws >> tag;
  if (tag != "widths") throw InputError("LUT dump: missing widths line");
  std::size_t w = 0;
  std::size_t sum = 0;
  while (ws >> w) {
    lut.segment_widths.push_back(w);
    sum += w;
  }
  if (sum != width) throw InputError("LUT dump: segment widths do not sum to width");
  if (!std::getline(is, line)) throw InputError("LUT dump: missing labels line");
  std::istringstream ls(line);
  ls >> tag;
  if (tag != "labels") throw InputError("LUT dump: missing labels line");
  for (int l; ls >> l;) lut.class_labels.push_back(l);
  if (lut.class_labels.size() != classes) throw InputError("LUT dump: expected one label per class");
  for (std::size_t j = 0; j < rows; ++j) {
    std::string symbols;
    std::string sep;
    int cls = 0;
    if (!(is >> symbols >> sep >> cls) || sep != ":") throw InputError("LUT dump: truncated at row " + std::to_string(j));
    if (symbols.size() != width || symbols.find_first_not_of("01x") != std::string::npos)
      throw InputError("LUT dump: bad symbols at row " + std::to_string(j));
    if (cls < 0 || static_cast<std::size_t>(cls) >= classes) throw InputError("LUT dump: class out of range");
    lut.rows.push_back(std::move(symbols));
    lut.classes.push_back(cls);
  }
  return lut;
}

}  // namespace treecam
