#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforest/error.hpp"
#include "uforest/forest.hpp"
#include "uforest/tree.hpp"

// JSON persistence for fitted trees and forests. Doubles are written in
// shortest round-trip form, so save/load is lossless.

namespace uforest {

inline constexpr int kFormatVersion = 1;

namespace detail {

using json = nlohmann::json;

inline json posterior_to_json(const TreePosterior& p) {
  return {{"num_classes", p.num_classes}, {"probs", p.probs}, {"leaf_sizes", p.leaf_sizes}};
}

inline TreePosterior posterior_from_json(const json& j) {
  TreePosterior p{j.at("num_classes").get<std::size_t>(), j.at("probs").get<std::vector<double>>(),
                  j.at("leaf_sizes").get<std::vector<std::size_t>>()};
  if (p.probs.size() != p.num_classes * p.leaf_sizes.size()) throw DataError("forest json: posterior shape mismatch");
  return p;
}

inline void check_header(const json& j, const std::string& kind) {
  if (!j.is_object() || j.value("format", "") != kind) throw DataError("json: expected a '" + kind + "' document");
  if (j.value("version", 0) != kFormatVersion)
    throw DataError("json: unsupported " + kind + " version " + std::to_string(j.value("version", 0)));
}

}  // namespace detail

inline nlohmann::json tree_to_json(const TreePartition& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes())
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.leaf, n.count, n.impurity});
  return {{"format", "uforest-tree"}, {"version", kFormatVersion}, {"dim", tree.dim()}, {"nodes", std::move(nodes)}};
}

inline TreePartition tree_from_json(const nlohmann::json& j) {
  try {
    detail::check_header(j, "uforest-tree");
    std::vector<TreeNode> nodes;
    for (const auto& n : j.at("nodes")) {
      if (!n.is_array() || n.size() != 7) throw DataError("tree json: node must have 7 fields");
      nodes.push_back({n[0].get<std::int32_t>(), n[1].get<double>(), n[2].get<std::uint32_t>(), n[3].get<std::uint32_t>(),
                       n[4].get<std::uint32_t>(), n[5].get<std::uint32_t>(), n[6].get<double>()});
    }
    return TreePartition(j.at("dim").get<std::size_t>(), std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("tree json: ") + e.what());
  } catch (const InputError& e) {
    throw DataError(e.what());
  }
}

inline nlohmann::json forest_to_json(const UncertaintyForest& forest) {
  const auto& c = forest.config();
  nlohmann::json config{{"n_trees", c.n_trees},
                        {"min_leaf_size", c.tree_params.min_leaf_size},
                        {"max_depth", c.tree_params.max_depth ? nlohmann::json(*c.tree_params.max_depth) : nlohmann::json()},
                        {"n_candidate_features", c.tree_params.n_candidate_features},
                        {"impurity", to_string(c.tree_params.impurity)},
                        {"kappa", c.kappa},
                        {"frac_partition", c.frac_partition},
                        {"frac_vote", c.frac_vote},
                        {"frac_eval", c.frac_eval},
                        {"eval_mode", to_string(c.eval_mode)},
                        {"aggregation", to_string(c.aggregation)},
                        {"honest", c.honest},
                        {"correction", c.correction},
                        {"subsample_size", c.subsample_size ? nlohmann::json(*c.subsample_size) : nlohmann::json()}};
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : forest.trees())
    trees.push_back({{"partition", tree_to_json(t.partition)},
                     {"raw", detail::posterior_to_json(t.raw)},
                     {"posterior", detail::posterior_to_json(t.posterior)},
                     {"eval_rows", t.eval_rows}});
  return {{"format", "uforest-forest"},
          {"version", kFormatVersion},
          {"seed", forest.seed()},
          {"dim", forest.dim()},
          {"num_classes", forest.num_classes()},
          {"fit_rows", forest.fit_rows()},
          {"config", std::move(config)},
          {"shared_eval_rows", std::vector<std::size_t>(forest.shared_eval_rows().begin(), forest.shared_eval_rows().end())},
          {"trees", std::move(trees)}};
}

inline UncertaintyForest forest_from_json(const nlohmann::json& j) {
  try {
    detail::check_header(j, "uforest-forest");
    const auto& jc = j.at("config");
    ForestConfig c;
    c.n_trees = jc.at("n_trees").get<std::size_t>();
    c.tree_params.min_leaf_size = jc.at("min_leaf_size").get<std::size_t>();
    if (!jc.at("max_depth").is_null()) c.tree_params.max_depth = jc.at("max_depth").get<std::size_t>();
    c.tree_params.n_candidate_features = jc.at("n_candidate_features").get<std::size_t>();
    c.tree_params.impurity = parse_impurity(jc.at("impurity").get<std::string>());
    c.kappa = jc.at("kappa").get<double>();
    c.frac_partition = jc.at("frac_partition").get<double>();
    c.frac_vote = jc.at("frac_vote").get<double>();
    c.frac_eval = jc.at("frac_eval").get<double>();
    c.eval_mode = parse_eval_mode(jc.at("eval_mode").get<std::string>());
    c.aggregation = parse_aggregation(jc.at("aggregation").get<std::string>());
    c.honest = jc.at("honest").get<bool>();
    c.correction = jc.at("correction").get<bool>();
    if (!jc.at("subsample_size").is_null()) c.subsample_size = jc.at("subsample_size").get<std::size_t>();
    c.validate();

    std::vector<FittedTree> trees;
    for (const auto& jt : j.at("trees")) {
      FittedTree t{tree_from_json(jt.at("partition")), detail::posterior_from_json(jt.at("raw")),
                   detail::posterior_from_json(jt.at("posterior")), jt.at("eval_rows").get<std::vector<std::size_t>>()};
      if (t.posterior.num_leaves() != t.partition.num_leaves()) throw DataError("forest json: leaf count mismatch");
      trees.push_back(std::move(t));
    }
    if (trees.size() != c.n_trees) throw DataError("forest json: tree count does not match n_trees");
    return UncertaintyForest(c, j.at("seed").get<std::uint64_t>(), j.at("dim").get<std::size_t>(),
                             j.at("num_classes").get<std::size_t>(), j.at("fit_rows").get<std::size_t>(), std::move(trees),
                             j.at("shared_eval_rows").get<std::vector<std::size_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("forest json: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("forest json: ") + e.what());
  }
}

}  // namespace uforest
