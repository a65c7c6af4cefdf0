#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "treecam/dataset.hpp"

namespace fs = std::filesystem;
using namespace treecam;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / ("treecam_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const std::string kIris = std::string(TREECAM_DATA) + "/iris.csv";

}  // namespace

TEST(LoadCsv, IrisShape) {
  auto load = load_csv(kIris);
  const Dataset& d = load.data;
  EXPECT_EQ(d.size(), 150u);
  EXPECT_EQ(d.num_features(), 4u);
  EXPECT_EQ(d.num_classes(), 3u);
  EXPECT_EQ(load.dropped, 0u);
  EXPECT_EQ(d.class_names[0], "setosa");
  d.validate();
}

TEST(LoadCsv, SingleInstanceSingleFeature) {
  auto path = write_temp("one.csv", "x,label\n0.25,a\n");
  auto load = load_csv(path);
  EXPECT_EQ(load.data.num_features(), 1u);
  EXPECT_EQ(load.data.size(), 1u);
  EXPECT_DOUBLE_EQ(load.data.rows[0][0], 0.25);
}

TEST(LoadCsv, DropsIncompleteRows) {
  std::string text = "a,b,y\n";
  for (int i = 0; i < 10; ++i) text += (i == 4 ? std::string("1.0,,p") : std::to_string(i) + ",2.0," + (i % 2 ? "p" : "q")) + "\n";
  auto load = load_csv(write_temp("missing.csv", text));
  EXPECT_EQ(load.data.size(), 9u);
  EXPECT_EQ(load.dropped, 1u);
}

TEST(LoadCsv, LabelColumnByNameAndIndex) {
  auto path = write_temp("labelfirst.csv", "y,a,b\nu,1,2\nv,3,4\n");
  CsvOptions by_name;
  by_name.label_column = std::string("y");
  auto a = load_csv(path, by_name);
  CsvOptions by_index;
  by_index.label_column = std::size_t{0};
  auto b = load_csv(path, by_index);
  EXPECT_EQ(a.data.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(a.data.rows, b.data.rows);
  EXPECT_EQ(a.data.rows[1], (FeatureVector{3, 4}));
}

TEST(LoadCsv, HeaderlessFile) {
  CsvOptions opts;
  opts.has_header = false;
  auto load = load_csv(write_temp("nohead.csv", "1,2,a\n3,4,b\n"), opts);
  EXPECT_EQ(load.data.size(), 2u);
  EXPECT_EQ(load.data.feature_names[1], "f1");
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), InputError);
  EXPECT_THROW(load_csv(write_temp("bad.csv", "a,y\nhello,p\n")), InputError);
  EXPECT_THROW(load_csv(write_temp("allbad.csv", "a,y\n,p\n?,q\n")), InputError);
  CsvOptions opts;
  opts.label_column = std::string("nope");
  EXPECT_THROW(load_csv(kIris, opts), InputError);
}

TEST(Normalize, MinMaxExamples) {
  Dataset d;
  d.feature_names = {"f", "c"};
  d.class_names = {"a"};
  d.rows = {{2, 5}, {4, 5}, {6, 5}};
  d.labels = {0, 0, 0};
  auto [n, p] = normalize(d);
  EXPECT_DOUBLE_EQ(n.rows[0][0], 0.0);
  EXPECT_DOUBLE_EQ(n.rows[1][0], 0.5);
  EXPECT_DOUBLE_EQ(n.rows[2][0], 1.0);
  for (const auto& r : n.rows) EXPECT_EQ(r[1], 0.0);
  EXPECT_DOUBLE_EQ(p.min[0], 2.0);
  EXPECT_DOUBLE_EQ(p.max[0], 6.0);
}

TEST(Normalize, IrisColumnAttainsBounds) {
  const Dataset d = load_csv(kIris).data;
  auto [n, p] = normalize(d);
  double lo = d.rows[0][0], hi = d.rows[0][0];
  for (const auto& r : d.rows) {
    lo = std::min(lo, r[0]);
    hi = std::max(hi, r[0]);
  }
  EXPECT_EQ(p.min[0], lo);
  EXPECT_EQ(p.max[0], hi);
  double nlo = 1, nhi = 0;
  for (const auto& r : n.rows) {
    EXPECT_GE(r[0], 0.0);
    EXPECT_LE(r[0], 1.0);
    nlo = std::min(nlo, r[0]);
    nhi = std::max(nhi, r[0]);
  }
  EXPECT_EQ(nlo, 0.0);
  EXPECT_EQ(nhi, 1.0);
}

TEST(Normalize, IdempotentOnNormalizedData) {
  const Dataset d = load_csv(kIris).data;
  auto [once, p] = normalize(d);
  auto [twice, q] = normalize(once);
  for (std::size_t i = 0; i < once.size(); ++i)
    for (std::size_t f = 0; f < once.num_features(); ++f) EXPECT_NEAR(once.rows[i][f], twice.rows[i][f], 1e-12);
}

TEST(Split, NinetyTen) {
  const Dataset d = load_csv(kIris).data;
  auto s = split(d, 0.1, 7);
  EXPECT_EQ(s.train.size(), 135u);
  EXPECT_EQ(s.test.size(), 15u);
}

TEST(Split, DeterministicUnderSeed) {
  const Dataset d = load_csv(kIris).data;
  auto a = split(d, 0.1, 7);
  auto b = split(d, 0.1, 7);
  EXPECT_EQ(a.train.rows, b.train.rows);
  EXPECT_EQ(a.test.rows, b.test.rows);
}

TEST(Split, SeedsGiveDifferentPermutations) {
  Dataset d;
  d.feature_names = {"i"};
  d.class_names = {"a"};
  for (int i = 0; i < 150; ++i) {
    d.rows.push_back({static_cast<double>(i)});
    d.labels.push_back(0);
  }
  auto a = split(d, 0.1, 1);
  auto b = split(d, 0.1, 2);
  EXPECT_NE(a.test.rows, b.test.rows);
  // Partition covers every row exactly once.
  std::set<double> seen;
  for (const auto& r : a.train.rows) seen.insert(r[0]);
  for (const auto& r : a.test.rows) seen.insert(r[0]);
  EXPECT_EQ(seen.size(), 150u);
}

TEST(Split, RejectsBadFraction) {
  const Dataset d = load_csv(kIris).data;
  EXPECT_THROW(split(d, 0.0, 1), InputError);
  EXPECT_THROW(split(d, 1.0, 1), InputError);
  EXPECT_THROW(split(d, 0.001, 1), InputError);
}
