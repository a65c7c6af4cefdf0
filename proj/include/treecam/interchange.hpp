#pragma once

#include <string>

#include <json.hpp>

#include "treecam/error.hpp"
#include "treecam/tree.hpp"

namespace treecam {

inline constexpr int kTreeFormatVersion = 1;

/// Tree document: {version, feature_names, class_names, root,
/// nodes: [{type: "split", feature, threshold, left, right} | {type: "leaf", class}]}.
/// Thresholds are written with round-trip precision.
inline nlohmann::json export_tree(const DecisionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    if (n.leaf) {
      nodes.push_back({{"type", "leaf"}, {"class", n.class_index}});
    } else {
      nodes.push_back({{"type", "split"},
                       {"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return {{"version", kTreeFormatVersion},
          {"feature_names", t.feature_names},
          {"class_names", t.class_names},
          {"root", t.root},
          {"nodes", std::move(nodes)}};
}

inline DecisionTree import_tree(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw InputError("tree document must be an object");
    const int version = doc.at("version").get<int>();
    if (version != kTreeFormatVersion) throw InputError("unsupported tree format version " + std::to_string(version));

    DecisionTree t;
    t.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    t.class_names = doc.at("class_names").get<std::vector<std::string>>();
    t.root = doc.value("root", 0);
    for (const auto& jn : doc.at("nodes")) {
      const auto type = jn.at("type").get<std::string>();
      if (type == "leaf") {
        t.nodes.push_back(DecisionTree::Node::make_leaf(jn.at("class").get<int>()));
      } else if (type == "split") {
        t.nodes.push_back(DecisionTree::Node::make_split(jn.at("feature").get<int>(), jn.at("threshold").get<double>(),
                                                         jn.at("left").get<int>(), jn.at("right").get<int>()));
      } else {
        throw InputError("unknown node type '" + type + "'");
      }
    }
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tree document: ") + e.what());
  } catch (const ConsistencyError& e) {
    throw InputError(std::string("invalid tree: ") + e.what());
  }
}

inline DecisionTree parse_tree(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tree document: ") + e.what());
  }
  return import_tree(doc);
}

}  // namespace treecam
