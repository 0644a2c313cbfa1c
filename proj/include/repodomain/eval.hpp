#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repodomain/corpus.hpp"
#include "repodomain/features.hpp"
#include "repodomain/gbdt.hpp"
#include "repodomain/search.hpp"

namespace repodomain {

struct EmptyMatrixError : Error {
    explicit EmptyMatrixError(const std::string& m) : Error("EmptyMatrix", m) {}
};

struct ConfusionMatrix {
    std::vector<DomainLabel> classes;
    std::vector<std::vector<std::int64_t>> counts;  // row = true, column = predicted

    static ConfusionMatrix from_predictions(const std::vector<DomainLabel>& classes,
                                            const std::vector<DomainLabel>& truth,
                                            const std::vector<DomainLabel>& predicted);
    std::int64_t total() const;
    std::int64_t trace() const;
};

struct ClassMetrics {
    DomainLabel label = DomainLabel::Documentation;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    std::optional<double> roc_auc_ovr;
    std::optional<double> zero_r_accuracy;
    std::string provenance;
    std::vector<std::string> flags;  // e.g. zero-denominator classes
};

// Precision/recall/F1 per class plus macro averages and accuracy. Classes
// with a zero column (or row) sum get 0 and are flagged.
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

// Macro one-vs-rest ROC-AUC via the rank statistic with mid-ranks. Classes
// lacking a positive or a negative are skipped and flagged.
double roc_auc_ovr(const std::vector<DomainLabel>& truth,
                   const std::vector<std::vector<double>>& scores,
                   const std::vector<DomainLabel>& classes,
                   std::vector<std::string>* flags = nullptr);

// Baseline that always predicts the modal training label.
double zero_r(const std::vector<DomainLabel>& train_labels,
              const std::vector<DomainLabel>& test_labels);

// Deterministic stratified fold ids (0..folds-1) per row.
std::vector<int> stratified_fold_assignment(const std::vector<DomainLabel>& labels, int folds,
                                            std::uint64_t seed);

double macro_f1_of(const std::vector<DomainLabel>& classes, const std::vector<DomainLabel>& truth,
                   const std::vector<DomainLabel>& predicted);

struct EvalConfig {
    PipelineConfig pipeline;
    TrainConfig train;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct CrossValidationSummary {
    Aggregate macro_precision;
    Aggregate macro_recall;
    Aggregate macro_f1;
    Aggregate accuracy;
    Aggregate roc_auc_ovr;
    Aggregate zero_r_accuracy;
};

struct CrossValidationResult {
    std::vector<MetricsReport> folds;
    CrossValidationSummary summary;
    int folds_used = 0;
    std::vector<std::string> warnings;
};

// Stratified k-fold CV; vectorizer, selector, SMOTE and model are all refit
// inside each fold on that fold's training portion only.
CrossValidationResult cross_validate(const Dataset& dataset, const EvalConfig& config,
                                     int folds = 10, std::uint64_t seed = 0,
                                     const EmbeddingTable* embeddings = nullptr);

struct EvalOutput {
    MetricsReport report;
    ConfusionMatrix confusion;
};

// Applies a trained model+pipeline to labelled records and reports metrics.
EvalOutput evaluate_on(const FeaturePipeline& pipeline, const GbdtModel& model,
                       const std::vector<RepoRecord>& records,
                       const EmbeddingTable* embeddings = nullptr);

struct AblationRow {
    std::string name;
    TrainConfig best_config;
    CrossValidationSummary summary;
};

// The five data-source configurations, each tuned and cross-validated under
// the same budget.
std::vector<AblationRow> ablation(const Dataset& dataset, const SearchBudget& budget,
                                  const PipelineConfig& base = PipelineConfig{},
                                  const EmbeddingTable* embeddings = nullptr);

}  // namespace repodomain
