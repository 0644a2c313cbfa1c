#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "repodomain/features.hpp"
#include "repodomain/gbdt.hpp"

namespace repodomain {

enum class SearchObjective { MacroF1, RocAucOvr };

std::string objective_name(SearchObjective objective);
SearchObjective objective_from_name(const std::string& name);

struct SearchBudget {
    double wall_seconds = 1000.0;
    int max_trials = 25;
    SearchObjective objective = SearchObjective::MacroF1;
    int cv_folds = 10;
    std::uint64_t seed = 0;
    bool smote_inside_folds = true;
    int smote_k = 5;
};

struct SearchOutcome {
    TrainConfig best_config;
    double best_score = 0.0;
    int completed_trials = 0;
};

// Budgeted random search over the documented hyperparameter ranges
// (num_rounds 50-500, learning_rate 0.01-0.3 log-uniform, max_leaves 4-128,
// min_samples_leaf 1-50, l2 0-10, feature_subsample 0.5-1.0). Each trial is
// scored by stratified cross-validation; SMOTE, when enabled, runs inside
// each fold on the training portion only. Halts at whichever of wall_seconds
// or max_trials is hit first; a trial that finishes past the deadline is
// discarded. Throws BudgetTooSmall when no trial completes in time.
SearchOutcome search(const FeatureMatrix& matrix_with_labels, const SearchBudget& budget);

// Mean objective of one configuration under the same CV protocol; used by
// the search loop and exposed for head-to-head config comparisons.
double cv_objective(const FeatureMatrix& matrix_with_labels, const TrainConfig& config,
                    const SearchBudget& budget);

// One draw from the search space. search() consumes the generator exactly
// once per trial, so replaying the seed reproduces the trial sequence.
TrainConfig sample_train_config(std::mt19937_64& rng);

}  // namespace repodomain
