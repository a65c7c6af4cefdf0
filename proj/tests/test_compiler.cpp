#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "treecam/compiler.hpp"
#include "treecam/interchange.hpp"
#include "treecam/synthetic.hpp"

using namespace treecam;

namespace {

DecisionTree fig2_tree() {
  std::ifstream in(std::string(TREECAM_FIXTURES) + "/fig2_tree.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree(ss.str());
}

FeatureCodes fig1_codes() { return {{0.8, 1.5, 1.65, 1.75}}; }

// Interval semantics written out directly from the comparator definitions.
bool satisfies(const Rule& r, double v) {
  if (r.comparator == Comparator::kNone) return true;
  if (r.comparator == Comparator::kLessEqual) return v <= r.th1;
  if (r.comparator == Comparator::kGreater) return v > r.th1;
  return r.th1 < v && v <= r.th2;
}

// Probe points: every threshold, its neighbours in floating point, midpoints
// and points beyond both ends.
std::vector<double> probes(const FeatureCodes& fc) {
  std::vector<double> p{-1e9, 1e9};
  for (std::size_t i = 0; i < fc.thresholds.size(); ++i) {
    const double t = fc.thresholds[i];
    p.push_back(t);
    p.push_back(std::nextafter(t, -INFINITY));
    p.push_back(std::nextafter(t, INFINITY));
    if (i + 1 < fc.thresholds.size()) p.push_back((t + fc.thresholds[i + 1]) / 2);
  }
  return p;
}

}  // namespace

TEST(ParsePaths, Fig2Tree) {
  const auto table = parse_paths(fig2_tree());
  ASSERT_EQ(table.rows.size(), 3u);
  const auto& first = table.rows.front();
  ASSERT_EQ(first.conditions.size(), 1u);
  EXPECT_EQ(first.conditions[0], (Condition{0, Relation::kLessEqual, 0.8}));
  EXPECT_EQ(first.class_index, 0);
  const auto& last = table.rows.back();
  ASSERT_EQ(last.conditions.size(), 2u);
  EXPECT_EQ(last.conditions[0], (Condition{0, Relation::kGreater, 0.8}));
  EXPECT_EQ(last.conditions[1], (Condition{0, Relation::kGreater, 1.75}));
  EXPECT_EQ(last.class_index, 2);
}

TEST(ParsePaths, SingleLeafAndCompleteDepthTwo) {
  DecisionTree leaf;
  leaf.feature_names = {"a"};
  leaf.class_names = {"c"};
  leaf.nodes = {DecisionTree::Node::make_leaf(0)};
  const auto one = parse_paths(leaf);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_TRUE(one.rows[0].conditions.empty());

  const auto full = random_tree({.features = 2, .leaves = 4, .classes = 2, .levels = 5, .balanced = true, .seed = 3});
  ASSERT_EQ(full.depth(), 2u);
  const auto table = parse_paths(full);
  ASSERT_EQ(table.rows.size(), 4u);
  for (const auto& r : table.rows) EXPECT_EQ(r.conditions.size(), 2u);
}

TEST(ReduceColumns, Examples) {
  PathTable p;
  p.num_features = 1;
  p.rows = {{{{0, Relation::kGreater, 0.8}, {0, Relation::kGreater, 1.75}}, 2},
            {{{0, Relation::kLessEqual, 3}, {0, Relation::kGreater, 1}}, 0},
            {{}, 2}};
  const auto r = reduce_columns(p);
  EXPECT_EQ(r.rules[0][0], Rule::above(1.75));
  EXPECT_TRUE(std::isnan(r.rules[0][0].th2));
  EXPECT_EQ(r.rules[1][0], Rule::between(1, 3));
  EXPECT_EQ(r.rules[2][0], Rule::none());
  // Natural-number class codes in order of first appearance.
  EXPECT_EQ(r.classes, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(r.class_labels, (std::vector<int>{2, 0}));

  PathTable bad;
  bad.num_features = 1;
  bad.rows = {{{{0, Relation::kLessEqual, 3}, {0, Relation::kLessEqual, 2}, {0, Relation::kGreater, 2.5}}, 0}};
  EXPECT_THROW(reduce_columns(bad), ConsistencyError);
}

TEST(Codebook, Fig1Codes) {
  const auto fc = fig1_codes();
  ASSERT_EQ(fc.width(), 5u);
  const std::vector<std::string> expected{"00001", "00011", "00111", "01111", "11111"};
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(fc.code(k), expected[k - 1]);
}

TEST(Codebook, BuiltFromReducedTable) {
  const auto r = reduce_columns(parse_paths(fig2_tree()));
  const auto cb = build_codebook(r);
  ASSERT_EQ(cb.features.size(), 1u);
  EXPECT_EQ(cb.features[0].thresholds, (std::vector<double>{0.8, 1.75}));
  EXPECT_EQ(cb.features[0].code(1), "001");
  EXPECT_EQ(cb.features[0].code(2), "011");
  EXPECT_EQ(cb.features[0].code(3), "111");

  ReducedTable none;
  none.num_features = 1;
  none.rules = {{Rule::none()}};
  none.classes = {0};
  none.class_labels = {0};
  const auto empty = build_codebook(none);
  EXPECT_EQ(empty.features[0].width(), 1u);
  EXPECT_EQ(empty.features[0].code(1), "1");
}

TEST(EncodeRule, Fig1Rules) {
  const auto fc = fig1_codes();
  EXPECT_EQ(encode_rule(Rule::at_most(0.8), fc), "00001");
  EXPECT_EQ(encode_rule(Rule::between(1.65, 1.75), fc), "01111");
  EXPECT_EQ(encode_rule(Rule::between(0.8, 1.65), fc), "00x11");
  EXPECT_EQ(encode_rule(Rule::above(1.5), fc), "xx111");
  EXPECT_EQ(encode_rule(Rule::none(), fc), "xxxx1");  // every input code ends in 1
  EXPECT_THROW(encode_rule(Rule::at_most(0.9), fc), ConsistencyError);
}

TEST(EncodeInput, Fig1Inputs) {
  FeatureCodebook cb;
  cb.features = {fig1_codes()};
  EXPECT_EQ(encode_input({0.5}, cb), "00001");
  EXPECT_EQ(encode_input({1.7}, cb), "01111");
  EXPECT_EQ(encode_input({0.8}, cb), "00001");
  EXPECT_EQ(encode_input({99.0}, cb), "11111");
  EXPECT_THROW(encode_input({std::nan("")}, cb), InputError);
  EXPECT_THROW(encode_input({1.0, 2.0}, cb), InputError);
}

TEST(BuildLut, TwoPathFig2Example) {
  PathTable p;
  p.num_features = 1;
  p.rows = {{{{0, Relation::kLessEqual, 0.8}}, 0}, {{{0, Relation::kGreater, 0.8}, {0, Relation::kGreater, 1.75}}, 2}};
  const auto lut = build_lut(reduce_columns(p));
  ASSERT_EQ(lut.num_rows(), 2u);
  EXPECT_EQ(lut.rows[0], "001");
  EXPECT_EQ(lut.rows[1], "111");
  EXPECT_EQ(lut.n_total(), 6u);
}

TEST(BuildLut, MinimalTable) {
  ReducedTable r;
  r.num_features = 1;
  r.rules = {{Rule::none()}};
  r.classes = {0};
  r.class_labels = {0};
  const auto lut = build_lut(r);
  ASSERT_EQ(lut.num_rows(), 1u);
  EXPECT_EQ(lut.rows[0], "1");
  EXPECT_EQ(lut.n_total(), 1u);
}

TEST(BuildLut, GoldenDump) {
  std::ostringstream os;
  write_lut(os, compile_tree(fig2_tree()));
  EXPECT_EQ(os.str(),
            "lut rows 3 width 3 classes 3\n"
            "widths 3\n"
            "labels 0 1 2\n"
            "001 : 0\n"
            "011 : 1\n"
            "111 : 2\n");
  std::istringstream is(os.str());
  const auto back = read_lut(is);
  EXPECT_EQ(back.rows, (std::vector<std::string>{"001", "011", "111"}));
  EXPECT_EQ(back.classes, (std::vector<int>{0, 1, 2}));
  std::istringstream commented("# config 1234\n" + os.str());
  EXPECT_EQ(read_lut(commented).rows, back.rows);
  std::istringstream bad("lut rows 1 width 3 classes 1\nwidths 3\nlabels 0\n0a1 : 0\n");
  EXPECT_THROW(read_lut(bad), InputError);
}

TEST(CompilerProperty, MatchingEquivalenceAndExactlyOneRow) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto t = random_tree({.features = 3, .leaves = 25, .classes = 3, .levels = 6, .balanced = seed % 2 == 0, .seed = seed});
    const auto reduced = reduce_columns(parse_paths(t));
    const auto lut = build_lut(reduced);
    const auto& cb = lut.codebook;

    // Per-feature equivalence over every probe point.
    for (std::size_t j = 0; j < reduced.num_rows(); ++j) {
      for (std::size_t f = 0; f < reduced.num_features; ++f) {
        const auto code = encode_rule(reduced.rules[j][f], cb.features[f]);
        for (double v : probes(cb.features[f])) {
          const auto key = cb.features[f].code(cb.features[f].range_of(v));
          EXPECT_EQ(ternary_match(code, key), satisfies(reduced.rules[j][f], v));
        }
      }
    }

    // Whole-row: the grid of per-feature probes, exactly one row matches and
    // it carries the tree's class.
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 400; ++trial) {
      FeatureVector x(t.num_features());
      for (std::size_t f = 0; f < x.size(); ++f) {
        const auto p = probes(cb.features[f]);
        x[f] = p[std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(rng)];
      }
      const auto key = encode_input(x, cb);
      std::vector<std::size_t> hits;
      for (std::size_t j = 0; j < lut.num_rows(); ++j)
        if (ternary_match(lut.rows[j], key)) hits.push_back(j);
      ASSERT_EQ(hits.size(), 1u);
      EXPECT_EQ(lut.class_labels[static_cast<std::size_t>(lut.classes[hits[0]])], predict(t, x));
    }
  }
}

TEST(CompilerProperty, CodeShapeAndBitCount) {
  const std::regex shape("0*x*1*");
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto t = random_tree({.features = 4, .leaves = 1 + seed * 7, .classes = 4, .levels = 12, .balanced = false, .seed = seed});
    const auto reduced = reduce_columns(parse_paths(t));
    const auto lut = build_lut(reduced);
    ASSERT_EQ(reduced.num_rows(), t.num_leaves());

    std::size_t sum_n = 0;
    for (std::size_t f = 0; f < reduced.num_features; ++f) {
      std::set<double> unique;
      for (const auto& row : reduced.rules)
        for (double v : {row[f].th1, row[f].th2})
          if (!std::isnan(v)) unique.insert(v);
      sum_n += unique.size() + 1;
      EXPECT_EQ(lut.segment_widths[f], unique.size() + 1);
    }
    EXPECT_EQ(lut.width(), sum_n);
    EXPECT_EQ(lut.n_total(), t.num_leaves() * sum_n);

    const auto owner = lut.column_owner();
    for (std::size_t j = 0; j < lut.num_rows(); ++j) {
      std::size_t offset = 0;
      for (std::size_t f = 0; f < reduced.num_features; ++f) {
        const auto seg = lut.rows[j].substr(offset, lut.segment_widths[f]);
        EXPECT_EQ(owner[offset], f);
        offset += lut.segment_widths[f];
        EXPECT_TRUE(std::regex_match(seg, shape)) << seg;
        if (reduced.rules[j][f].comparator == Comparator::kNone) {
          EXPECT_EQ(seg, std::string(seg.size() - 1, 'x') + "1");
        }
        EXPECT_EQ(seg.back(), '1');
      }
    }
  }
}
