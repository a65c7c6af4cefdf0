#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "treecam/cart.hpp"
#include "treecam/interchange.hpp"
#include "treecam/synthetic.hpp"

using namespace treecam;

namespace {

DecisionTree load_fixture(const std::string& name) {
  std::ifstream in(std::string(TREECAM_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree(ss.str());
}

// Independent oracle: enumerate every root-to-leaf path recursively and
// collect the classes of those whose conditions hold for x.
void matching_leaves(const DecisionTree& t, int id, const FeatureVector& x, bool ok, std::vector<int>& out) {
  const auto& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.leaf) {
    if (ok) out.push_back(n.class_index);
    return;
  }
  const double v = x[static_cast<std::size_t>(n.feature)];
  matching_leaves(t, n.left, x, ok && v <= n.threshold, out);
  matching_leaves(t, n.right, x, ok && !(v <= n.threshold), out);
}

Dataset two_class_gap() {
  Dataset d;
  d.feature_names = {"noise", "key"};
  d.class_names = {"lo", "hi"};
  d.rows = {{0.3, 0.2}, {0.1, 0.8}, {0.5, 0.5}, {0.2, 1.0}, {0.4, 1.3}, {0.6, 1.1}};
  d.labels = {0, 0, 0, 1, 1, 1};
  return d;
}

}  // namespace

TEST(Predict, Fig2MiniTree) {
  const auto t = load_fixture("fig2_tree.json");
  EXPECT_EQ(t.class_names[static_cast<std::size_t>(predict(t, {0.5}))], "Setosa");
  EXPECT_EQ(t.class_names[static_cast<std::size_t>(predict(t, {2.0}))], "Virginica");
  EXPECT_EQ(t.class_names[static_cast<std::size_t>(predict(t, {0.8}))], "Setosa");
}

TEST(Predict, SingleLeaf) {
  DecisionTree t;
  t.feature_names = {"a", "b"};
  t.class_names = {"p", "q"};
  t.nodes = {DecisionTree::Node::make_leaf(1)};
  EXPECT_EQ(predict(t, {0.0, 0.0}), 1);
  EXPECT_EQ(predict(t, {-5.0, 9.0}), 1);
}

TEST(Predict, MalformedReference) {
  DecisionTree t;
  t.feature_names = {"a"};
  t.class_names = {"p"};
  t.nodes = {DecisionTree::Node::make_split(0, 0.5, 1, 7), DecisionTree::Node::make_leaf(0)};
  EXPECT_THROW(predict(t, {0.9}), ConsistencyError);
  EXPECT_THROW(predict(t, {0.9, 1.0}), InputError);
}

TEST(Cart, PerfectSplitAtMidpoint) {
  const auto t = train_cart(two_class_gap());
  ASSERT_EQ(t.depth(), 1u);
  const auto& root = t.nodes[static_cast<std::size_t>(t.root)];
  EXPECT_EQ(root.feature, 1);
  EXPECT_DOUBLE_EQ(root.threshold, 0.9);
}

TEST(Cart, PureSetIsSingleLeaf) {
  Dataset d = two_class_gap();
  for (auto& l : d.labels) l = 1;
  const auto t = train_cart(d);
  EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.nodes[0].class_index, 1);
}

TEST(Cart, MaxDepthAndLeafTies) {
  Dataset d;
  d.feature_names = {"a"};
  d.class_names = {"x", "y"};
  d.rows = {{0}, {0}};
  d.labels = {1, 0};
  const auto t = train_cart(d);
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.nodes[0].class_index, 0);  // tie resolves to lowest class index

  const Dataset iris = load_csv(std::string(TREECAM_DATA) + "/iris.csv").data;
  EXPECT_EQ(train_cart(iris, {.max_depth = 1}).depth(), 1u);
  EXPECT_LE(train_cart(iris, {.max_depth = 3}).depth(), 3u);
}

TEST(Cart, ThresholdsNeverEqualTrainingValues) {
  const Dataset iris = load_csv(std::string(TREECAM_DATA) + "/iris.csv").data;
  const auto t = train_cart(iris);
  for (const auto& n : t.nodes) {
    if (n.leaf) continue;
    for (const auto& r : iris.rows) EXPECT_NE(r[static_cast<std::size_t>(n.feature)], n.threshold);
  }
}

TEST(Cart, Deterministic) {
  const Dataset iris = load_csv(std::string(TREECAM_DATA) + "/iris.csv").data;
  auto s = split(iris, 0.1, 11);
  EXPECT_EQ(train_cart(s.train), train_cart(s.train));
}

TEST(Cart, IrisGoldenMatchesExhaustiveTraversal) {
  const Dataset iris = load_csv(std::string(TREECAM_DATA) + "/iris.csv").data;
  auto s = split(iris, 0.1, 7);
  auto [train, norm] = normalize(s.train);
  const Dataset test = apply_norm(s.test, norm);
  const auto t = train_cart(train);
  EXPECT_EQ(accuracy(t, train), 1.0);  // fully grown tree on distinct rows
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::vector<int> leaves;
    matching_leaves(t, t.root, test.rows[i], true, leaves);
    ASSERT_EQ(leaves.size(), 1u);
    EXPECT_EQ(leaves[0], predict(t, test.rows[i]));
    hits += leaves[0] == test.labels[i];
  }
  EXPECT_DOUBLE_EQ(accuracy(t, test), static_cast<double>(hits) / static_cast<double>(test.size()));
}

TEST(TreeProperty, ExactlyOnePathPerInput) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = random_tree({.features = 5, .leaves = 40, .classes = 3, .levels = 9, .seed = seed});
    for (int i = 0; i < 300; ++i) {
      FeatureVector x(5);
      for (auto& v : x) v = u(rng);
      std::vector<int> leaves;
      matching_leaves(t, t.root, x, true, leaves);
      ASSERT_EQ(leaves.size(), 1u);
      EXPECT_EQ(leaves[0], predict(t, x));
    }
  }
}

TEST(Interchange, RoundTripIsIdentity) {
  const Dataset iris = load_csv(std::string(TREECAM_DATA) + "/iris.csv").data;
  auto [train, norm] = normalize(iris);
  const auto t = train_cart(train);
  const auto doc = export_tree(t);
  const auto back = parse_tree(doc.dump(2));
  EXPECT_EQ(back, t);
  EXPECT_EQ(export_tree(back), doc);
}

TEST(Interchange, Fig2Subtree) {
  DecisionTree t;
  t.feature_names = {"petal_width"};
  t.class_names = {"Setosa", "Virginica"};
  t.nodes = {DecisionTree::Node::make_split(0, 0.8, 1, 2), DecisionTree::Node::make_leaf(0),
             DecisionTree::Node::make_leaf(1)};
  const auto doc = export_tree(t);
  int splits = 0;
  for (const auto& n : doc["nodes"]) {
    if (n["type"] == "split") {
      ++splits;
      EXPECT_EQ(n["threshold"].get<double>(), 0.8);
    }
  }
  EXPECT_EQ(splits, 1);
  EXPECT_EQ(doc["version"], kTreeFormatVersion);
}

TEST(Interchange, RejectsBadDocuments) {
  auto doc = export_tree(load_fixture("fig2_tree.json"));
  auto dangling = doc;
  dangling["nodes"][0]["right"] = 42;
  EXPECT_THROW(import_tree(dangling), InputError);
  auto version = doc;
  version["version"] = 99;
  EXPECT_THROW(import_tree(version), InputError);
  auto cyclic = doc;
  cyclic["nodes"][2]["left"] = 0;
  EXPECT_THROW(import_tree(cyclic), InputError);
  EXPECT_THROW(parse_tree("{not json"), InputError);
  EXPECT_THROW(parse_tree(R"({"version":1})"), InputError);
}
