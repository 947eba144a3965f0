#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace steersim {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FeatureVector {
    std::vector<double> values;
    uint32_t schema_id = 0;
};

struct Dataset {
    std::vector<FeatureVector> features;
    std::vector<uint8_t> labels;  // 0/1

    size_t size() const { return features.size(); }
    size_t dim() const { return features.empty() ? 0 : features.front().values.size(); }
    size_t positives() const;
    void validate() const;  // throws on NaN, length or schema mismatch
};

// Gini impurity 1 - p^2 - (1-p)^2 of a boolean label set.
double gini(std::span<const uint8_t> labels);

struct TreeNode {
    int32_t split_feature = -1;  // -1 for leaves
    double split_value = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    uint32_t sample_count = 0;
    uint32_t positive_count = 0;

    bool is_leaf() const { return split_feature < 0; }
    double positive_fraction() const {
        return static_cast<double>(positive_count) / static_cast<double>(sample_count);
    }
};

struct TreeParams {
    int max_depth = 12;
    int min_leaf = 5;
    int features_per_split = 0;  // 0 = all features
    uint64_t seed = 0;           // feature subsampling stream
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_proba(std::span<const double> x) const;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 5;
    int features_per_split = -1;  // -1 = ceil(sqrt(d)), 0 = all
    bool bootstrap = true;
    uint64_t seed = 0;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    ForestParams params;
    uint32_t schema_id = 0;

    double predict_proba(const FeatureVector& x) const;  // throws SchemaError on mismatch
    double predict_proba(std::span<const double> x) const;

    nlohmann::json to_json() const;
    static ForestModel from_json(const nlohmann::json& j);  // rejects unknown versions
    void save(const std::string& path) const;
    static ForestModel load(const std::string& path);
};

// Greedy CART on the Gini criterion. Candidate thresholds are midpoints of
// consecutive distinct sorted values; ties broken toward the lowest feature
// index, then the lowest threshold. A single-class dataset yields one leaf.
TreeModel train_tree(const Dataset& data, const TreeParams& params);

// Bagged forest. Each tree draws its bootstrap resample and feature subsets
// from a stream derived from (seed, tree_index), so training order and
// parallelism cannot change the result.
ForestModel train_forest(const Dataset& data, const ForestParams& params);

}  // namespace steersim
