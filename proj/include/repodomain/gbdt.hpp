#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "repodomain/corpus.hpp"
#include "repodomain/features.hpp"

namespace repodomain {

struct TrainConfig {
    int num_rounds = 100;
    double learning_rate = 0.1;   // in (0, 1]
    int max_leaves = 31;          // >= 2
    int min_samples_leaf = 1;
    double l2_leaf_penalty = 0.0;
    double feature_subsample = 1.0;  // fraction of columns per tree, in (0, 1]
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);

    bool operator==(const TrainConfig&) const = default;
};

// Flat node storage; node 0 is the root.
struct TreeNode {
    bool is_leaf = true;
    size_t column = 0;
    double threshold = 0.0;  // x < threshold goes left
    double value = 0.0;      // leaf output
    int left = -1;
    int right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const double* row) const;
    int leaf_count() const;
};

// Multiclass boosted ensemble: one regression tree per class per round,
// trained on softmax gradients with Newton leaf values -G / (H + l2).
struct GbdtModel {
    std::vector<DomainLabel> classes;
    std::vector<FeatureColumnMeta> columns;
    std::vector<double> base_scores;                 // log class priors
    std::vector<std::vector<RegressionTree>> rounds; // num_rounds x K
    TrainConfig config;
    std::vector<double> training_loss;  // cross-entropy per round, [0] = before boosting

    size_t n_classes() const { return classes.size(); }
    size_t n_columns() const { return columns.size(); }

    nlohmann::json to_json() const;
    static GbdtModel from_json(const nlohmann::json& j);
};

// Leaf-wise training: repeatedly splits the leaf with the highest gain until
// max_leaves is reached or no split has positive gain. Deterministic given
// (data, config, seed).
GbdtModel train(const FeatureMatrix& matrix_with_labels, const TrainConfig& config);

std::vector<double> softmax(const std::vector<double>& scores);

// Accumulated tree scores + base scores through a softmax. Each row sums to 1.
std::vector<std::vector<double>> predict_proba(const GbdtModel& model, const FeatureMatrix& rows);
std::vector<double> predict_proba_row(const GbdtModel& model, const std::vector<double>& row);

// argmax with first-index tie-break
std::vector<DomainLabel> predict(const GbdtModel& model, const FeatureMatrix& rows);

// Split counts per column across all trees, and the per-group percentage
// breakdown (sums to 100 for any model with at least one split).
std::map<std::string, std::int64_t> feature_importance(const GbdtModel& model);
std::map<FeatureGroup, double> group_importance(const GbdtModel& model);

}  // namespace repodomain
