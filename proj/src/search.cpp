#include "repodomain/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "repodomain/eval.hpp"

namespace repodomain {

std::string objective_name(SearchObjective objective) {
    return objective == SearchObjective::MacroF1 ? "macro_f1" : "roc_auc_ovr";
}

SearchObjective objective_from_name(const std::string& name) {
    if (name == "macro_f1") return SearchObjective::MacroF1;
    if (name == "roc_auc_ovr") return SearchObjective::RocAucOvr;
    throw Error("InvalidArgument", "unknown objective '" + name + "' (macro_f1, roc_auc_ovr)");
}

namespace {

FeatureMatrix submatrix(const FeatureMatrix& m, const std::vector<size_t>& rows) {
    FeatureMatrix out;
    out.n_rows = rows.size();
    out.columns = m.columns;
    out.values.reserve(rows.size() * m.n_cols());
    std::vector<DomainLabel> labels;
    for (size_t r : rows) {
        for (size_t c = 0; c < m.n_cols(); ++c) out.values.push_back(m.at(r, c));
        if (m.labels) labels.push_back((*m.labels)[r]);
    }
    if (m.labels) out.labels = std::move(labels);
    return out;
}

}  // namespace

TrainConfig sample_train_config(std::mt19937_64& rng) {
    TrainConfig cfg;
    cfg.num_rounds = static_cast<int>(std::uniform_int_distribution<int>(50, 500)(rng));
    double log_lr = std::uniform_real_distribution<double>(std::log(0.01), std::log(0.3))(rng);
    cfg.learning_rate = std::exp(log_lr);
    cfg.max_leaves = std::uniform_int_distribution<int>(4, 128)(rng);
    cfg.min_samples_leaf = std::uniform_int_distribution<int>(1, 50)(rng);
    cfg.l2_leaf_penalty = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    cfg.feature_subsample = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    cfg.seed = rng();
    return cfg;
}

double cv_objective(const FeatureMatrix& matrix_with_labels, const TrainConfig& config,
                    const SearchBudget& budget) {
    matrix_with_labels.check();
    if (!matrix_with_labels.labels) throw DegenerateLabelsError("search needs a labelled matrix");
    const auto& labels = *matrix_with_labels.labels;

    std::map<DomainLabel, std::int64_t> counts;
    for (DomainLabel l : labels) ++counts[l];
    if (counts.size() < 2) throw DegenerateLabelsError("search needs at least two classes");
    std::int64_t min_count = counts.begin()->second;
    for (const auto& [label, count] : counts) min_count = std::min(min_count, count);
    if (min_count < 2) throw TooFewSamplesError("a class has fewer than 2 rows");
    const int folds = static_cast<int>(
        std::min<std::int64_t>(budget.cv_folds, min_count));

    auto assignment = stratified_fold_assignment(labels, folds, budget.seed);

    double score_sum = 0.0;
    for (int fold = 0; fold < folds; ++fold) {
        std::vector<size_t> train_rows, test_rows;
        for (size_t i = 0; i < labels.size(); ++i) {
            (assignment[i] == fold ? test_rows : train_rows).push_back(i);
        }
        FeatureMatrix train_matrix = submatrix(matrix_with_labels, train_rows);
        FeatureMatrix test_matrix = submatrix(matrix_with_labels, test_rows);
        if (budget.smote_inside_folds) {
            std::map<DomainLabel, std::int64_t> train_counts;
            for (DomainLabel l : *train_matrix.labels) ++train_counts[l];
            bool synthesizable = true;
            for (const auto& [label, count] : train_counts) {
                if (count < 2) synthesizable = false;
            }
            if (synthesizable) {
                train_matrix =
                    smote(train_matrix, budget.smote_k,
                          budget.seed + 0x9e3779b9ull * static_cast<std::uint64_t>(fold + 1))
                        .matrix;
            }
        }
        GbdtModel model = train(train_matrix, config);
        auto truth = *test_matrix.labels;
        if (budget.objective == SearchObjective::MacroF1) {
            score_sum += macro_f1_of(model.classes, truth, predict(model, test_matrix));
        } else {
            score_sum += roc_auc_ovr(truth, predict_proba(model, test_matrix), model.classes);
        }
    }
    return score_sum / static_cast<double>(folds);
}

SearchOutcome search(const FeatureMatrix& matrix_with_labels, const SearchBudget& budget) {
    if (budget.wall_seconds <= 0.0 || budget.max_trials <= 0 || budget.cv_folds < 2) {
        throw Error("InvalidArgument", "search budget needs positive limits and >= 2 folds");
    }

    const auto start = std::chrono::steady_clock::now();
    auto elapsed_seconds = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    std::mt19937_64 rng(budget.seed);
    SearchOutcome outcome;
    bool has_incumbent = false;
    for (int trial = 0; trial < budget.max_trials; ++trial) {
        if (elapsed_seconds() >= budget.wall_seconds) break;
        TrainConfig config = sample_train_config(rng);
        double score = cv_objective(matrix_with_labels, config, budget);
        if (elapsed_seconds() > budget.wall_seconds) break;  // finished late: discard
        ++outcome.completed_trials;
        if (!has_incumbent || score > outcome.best_score) {
            outcome.best_config = config;
            outcome.best_score = score;
            has_incumbent = true;
        }
    }
    if (!has_incumbent) {
        throw BudgetTooSmallError("no search trial completed within the budget");
    }
    return outcome;
}

}  // namespace repodomain
