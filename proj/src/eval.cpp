#include "repodomain/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace repodomain {

ConfusionMatrix ConfusionMatrix::from_predictions(const std::vector<DomainLabel>& classes,
                                                  const std::vector<DomainLabel>& truth,
                                                  const std::vector<DomainLabel>& predicted) {
    if (truth.size() != predicted.size()) {
        throw SchemaMismatchError("truth/prediction length mismatch");
    }
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
    auto index_of = [&](DomainLabel label) {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw SchemaMismatchError("label outside confusion classes");
        return static_cast<size_t>(it - classes.begin());
    };
    for (size_t i = 0; i < truth.size(); ++i) {
        ++cm.counts[index_of(truth[i])][index_of(predicted[i])];
    }
    return cm;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts) {
        for (auto v : row) t += v;
    }
    return t;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
    const size_t k = cm.classes.size();
    if (k == 0 || cm.counts.size() != k) throw EmptyMatrixError("empty confusion matrix");
    for (const auto& row : cm.counts) {
        if (row.size() != k) throw EmptyMatrixError("ragged confusion matrix");
        for (auto v : row) {
            if (v < 0) throw EmptyMatrixError("negative confusion count");
        }
    }
    const std::int64_t total = cm.total();
    if (total == 0) throw EmptyMatrixError("confusion matrix has no samples");

    MetricsReport report;
    double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
    for (size_t i = 0; i < k; ++i) {
        std::int64_t row_sum = 0, col_sum = 0;
        for (size_t j = 0; j < k; ++j) {
            row_sum += cm.counts[i][j];
            col_sum += cm.counts[j][i];
        }
        ClassMetrics m;
        m.label = cm.classes[i];
        const double diag = static_cast<double>(cm.counts[i][i]);
        if (col_sum == 0) {
            report.flags.push_back("zero predicted count for " + label_id(cm.classes[i]) +
                                   ": precision set to 0");
        } else {
            m.precision = diag / static_cast<double>(col_sum);
        }
        if (row_sum == 0) {
            report.flags.push_back("zero true count for " + label_id(cm.classes[i]) +
                                   ": recall set to 0");
        } else {
            m.recall = diag / static_cast<double>(row_sum);
        }
        if (m.precision + m.recall > 0.0) {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        sum_p += m.precision;
        sum_r += m.recall;
        sum_f1 += m.f1;
        report.per_class.push_back(m);
    }
    report.macro_precision = sum_p / static_cast<double>(k);
    report.macro_recall = sum_r / static_cast<double>(k);
    report.macro_f1 = sum_f1 / static_cast<double>(k);
    report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    return report;
}

double roc_auc_ovr(const std::vector<DomainLabel>& truth,
                   const std::vector<std::vector<double>>& scores,
                   const std::vector<DomainLabel>& classes, std::vector<std::string>* flags) {
    if (truth.size() != scores.size() || truth.empty()) {
        throw EmptySampleError("roc_auc_ovr needs matching non-empty labels and scores");
    }
    double auc_sum = 0.0;
    size_t used = 0;
    for (size_t c = 0; c < classes.size(); ++c) {
        std::vector<std::pair<double, bool>> ranked;  // (score, is_positive)
        size_t positives = 0;
        for (size_t i = 0; i < truth.size(); ++i) {
            bool pos = truth[i] == classes[c];
            if (pos) ++positives;
            ranked.emplace_back(scores[i][c], pos);
        }
        size_t negatives = ranked.size() - positives;
        if (positives == 0 || negatives == 0) {
            if (flags) {
                flags->push_back("class " + label_id(classes[c]) +
                                 " lacks positives or negatives: skipped in ROC-AUC");
            }
            continue;
        }
        std::sort(ranked.begin(), ranked.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double rank_sum_pos = 0.0;
        size_t i = 0;
        while (i < ranked.size()) {
            size_t j = i;
            while (j + 1 < ranked.size() && ranked[j + 1].first == ranked[i].first) ++j;
            double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (size_t t = i; t <= j; ++t) {
                if (ranked[t].second) rank_sum_pos += mid_rank;
            }
            i = j + 1;
        }
        double np = static_cast<double>(positives);
        double nn = static_cast<double>(negatives);
        auc_sum += (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
        ++used;
    }
    if (used == 0) throw EmptySampleError("no class had both positives and negatives");
    return auc_sum / static_cast<double>(used);
}

double zero_r(const std::vector<DomainLabel>& train_labels,
              const std::vector<DomainLabel>& test_labels) {
    if (train_labels.empty() || test_labels.empty()) {
        throw EmptySampleError("zero_r needs non-empty label sets");
    }
    std::map<DomainLabel, std::int64_t> counts;
    for (DomainLabel l : train_labels) ++counts[l];
    DomainLabel modal = counts.begin()->first;
    std::int64_t best = counts.begin()->second;
    for (const auto& [label, count] : counts) {
        if (count > best) {
            modal = label;
            best = count;
        }
    }
    std::int64_t hits = 0;
    for (DomainLabel l : test_labels) {
        if (l == modal) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test_labels.size());
}

std::vector<int> stratified_fold_assignment(const std::vector<DomainLabel>& labels, int folds,
                                            std::uint64_t seed) {
    if (folds < 2) throw Error("InvalidArgument", "need at least 2 folds");
    std::map<DomainLabel, std::vector<size_t>> by_label;
    for (size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<int> assignment(labels.size(), 0);
    size_t offset = 0;  // rotates so per-label remainders spread across folds
    for (auto& [label, idx] : by_label) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (size_t i = 0; i < idx.size(); ++i) {
            assignment[idx[i]] = static_cast<int>((i + offset) % static_cast<size_t>(folds));
        }
        offset = (offset + idx.size()) % static_cast<size_t>(folds);
    }
    return assignment;
}

double macro_f1_of(const std::vector<DomainLabel>& classes, const std::vector<DomainLabel>& truth,
                   const std::vector<DomainLabel>& predicted) {
    return metrics_from_confusion(ConfusionMatrix::from_predictions(classes, truth, predicted))
        .macro_f1;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

namespace {

Aggregate aggregate_of(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return a;
}

std::vector<DomainLabel> labels_of_records(const std::vector<RepoRecord>& records) {
    std::vector<DomainLabel> labels;
    labels.reserve(records.size());
    for (const auto& r : records) {
        if (!r.label) throw SchemaMismatchError("cross-validation requires labelled records");
        labels.push_back(*r.label);
    }
    return labels;
}

}  // namespace

CrossValidationResult cross_validate(const Dataset& dataset, const EvalConfig& config,
                                     int folds, std::uint64_t seed,
                                     const EmbeddingTable* embeddings) {
    if (dataset.records.empty()) throw EmptyDatasetError("cross_validate on empty dataset");
    auto labels = labels_of_records(dataset.records);

    std::map<DomainLabel, std::int64_t> class_counts;
    for (DomainLabel l : labels) ++class_counts[l];
    std::int64_t min_count = class_counts.begin()->second;
    for (const auto& [label, count] : class_counts) min_count = std::min(min_count, count);
    if (class_counts.size() < 2) {
        throw DegenerateLabelsError("cross_validate needs at least two classes");
    }
    if (min_count < 2) {
        throw TooFewSamplesError("a class has fewer than 2 records; cannot stratify folds");
    }

    CrossValidationResult result;
    result.folds_used = folds;
    if (static_cast<std::int64_t>(folds) > min_count) {
        result.folds_used = static_cast<int>(min_count);
        result.warnings.push_back("folds reduced to " + std::to_string(result.folds_used) +
                                  ": smallest class has only " + std::to_string(min_count) +
                                  " records");
    }

    auto assignment = stratified_fold_assignment(labels, result.folds_used, seed);

    std::vector<double> mp, mr, mf, acc, auc, zr;
    for (int fold = 0; fold < result.folds_used; ++fold) {
        std::vector<RepoRecord> train_records, test_records;
        for (size_t i = 0; i < dataset.records.size(); ++i) {
            (assignment[i] == fold ? test_records : train_records).push_back(dataset.records[i]);
        }

        FeaturePipeline pipeline = FeaturePipeline::fit(train_records, config.pipeline, embeddings);
        FeatureMatrix train_matrix = pipeline.transform(train_records, embeddings);
        if (config.pipeline.smote_enabled) {
            std::map<DomainLabel, std::int64_t> train_counts;
            for (DomainLabel l : *train_matrix.labels) ++train_counts[l];
            std::int64_t smallest = train_counts.begin()->second;
            for (const auto& [label, count] : train_counts) smallest = std::min(smallest, count);
            if (smallest >= 2) {
                train_matrix = smote(train_matrix, config.pipeline.smote_k,
                                     seed + 0x9e3779b9ull * static_cast<std::uint64_t>(fold + 1))
                                   .matrix;
            } else {
                result.warnings.push_back("fold " + std::to_string(fold) +
                                          ": SMOTE skipped, a class has a single training row");
            }
        }
        GbdtModel model = train(train_matrix, config.train);

        FeatureMatrix test_matrix = pipeline.transform(test_records, embeddings);
        auto probs = predict_proba(model, test_matrix);
        auto predictions = predict(model, test_matrix);
        auto test_labels = labels_of_records(test_records);
        auto train_labels = labels_of_records(train_records);

        MetricsReport report = metrics_from_confusion(
            ConfusionMatrix::from_predictions(model.classes, test_labels, predictions));
        report.roc_auc_ovr = roc_auc_ovr(test_labels, probs, model.classes, &report.flags);
        report.zero_r_accuracy = zero_r(train_labels, test_labels);
        report.provenance = "fold " + std::to_string(fold);

        mp.push_back(report.macro_precision);
        mr.push_back(report.macro_recall);
        mf.push_back(report.macro_f1);
        acc.push_back(report.accuracy);
        auc.push_back(*report.roc_auc_ovr);
        zr.push_back(*report.zero_r_accuracy);
        result.folds.push_back(std::move(report));
    }

    result.summary.macro_precision = aggregate_of(mp);
    result.summary.macro_recall = aggregate_of(mr);
    result.summary.macro_f1 = aggregate_of(mf);
    result.summary.accuracy = aggregate_of(acc);
    result.summary.roc_auc_ovr = aggregate_of(auc);
    result.summary.zero_r_accuracy = aggregate_of(zr);
    return result;
}

EvalOutput evaluate_on(const FeaturePipeline& pipeline, const GbdtModel& model,
                       const std::vector<RepoRecord>& records,
                       const EmbeddingTable* embeddings) {
    if (records.empty()) throw EmptyDatasetError("evaluate_on needs records");
    FeatureMatrix matrix = pipeline.transform(records, embeddings);
    auto probs = predict_proba(model, matrix);
    auto predictions = predict(model, matrix);
    auto truth = labels_of_records(records);

    EvalOutput out;
    out.confusion = ConfusionMatrix::from_predictions(model.classes, truth, predictions);
    out.report = metrics_from_confusion(out.confusion);
    try {
        out.report.roc_auc_ovr = roc_auc_ovr(truth, probs, model.classes, &out.report.flags);
    } catch (const EmptySampleError&) {
        out.report.flags.push_back("ROC-AUC unavailable: no class with positives and negatives");
    }
    out.report.zero_r_accuracy = zero_r(truth, truth);  // majority baseline of the sample
    return out;
}

std::vector<AblationRow> ablation(const Dataset& dataset, const SearchBudget& budget,
                                  const PipelineConfig& base, const EmbeddingTable* embeddings) {
    std::vector<AblationRow> rows;
    for (const auto& [name, pipeline_config] : ablation_configs(base)) {
        FeaturePipeline pipeline = FeaturePipeline::fit(dataset.records, pipeline_config, embeddings);
        FeatureMatrix matrix = pipeline.transform(dataset.records, embeddings);

        SearchBudget trial_budget = budget;
        trial_budget.smote_inside_folds = pipeline_config.smote_enabled;
        trial_budget.smote_k = pipeline_config.smote_k;
        SearchOutcome outcome = search(matrix, trial_budget);

        EvalConfig eval_config{pipeline_config, outcome.best_config};
        auto cv = cross_validate(dataset, eval_config, budget.cv_folds, budget.seed, embeddings);

        rows.push_back({name, outcome.best_config, cv.summary});
    }
    return rows;
}

}  // namespace repodomain
