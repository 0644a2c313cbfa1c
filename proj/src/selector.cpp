#include <algorithm>
#include <cmath>

#include "repodomain/features.hpp"

namespace repodomain {

namespace {

std::vector<DomainLabel> distinct_labels(const std::vector<DomainLabel>& labels) {
    std::vector<DomainLabel> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

// Deterministic full-batch subgradient descent on
//   lambda/2 ||w||^2 + mean_i hinge(y_i (w.x_i + b)),  lambda = 1 / (C n),
// with the Pegasos step schedule and ball projection. The bias is
// unregularized and excluded from the importance measure.
std::vector<double> fit_binary_hinge(const FeatureMatrix& m, const std::vector<int>& y,
                                     double c) {
    const size_t n = m.n_rows;
    const size_t d = m.n_cols();
    const double lambda = 1.0 / (c * static_cast<double>(n));
    std::vector<double> w(d, 0.0);
    double bias = 0.0;

    const int epochs = 500;
    std::vector<double> grad(d);
    for (int t = 1; t <= epochs; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double score = bias;
            for (size_t j = 0; j < d; ++j) score += w[j] * m.at(i, j);
            if (static_cast<double>(y[i]) * score < 1.0) {
                for (size_t j = 0; j < d; ++j) grad[j] -= y[i] * m.at(i, j);
                grad_bias -= y[i];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
        for (size_t j = 0; j < d; ++j) {
            w[j] -= eta * (lambda * w[j] + grad[j] * inv_n);
        }
        bias -= eta * grad_bias * inv_n;

        double norm_sq = 0.0;
        for (double v : w) norm_sq += v * v;
        double limit = 1.0 / std::sqrt(lambda);
        if (norm_sq > limit * limit) {
            double scale = limit / std::sqrt(norm_sq);
            for (double& v : w) v *= scale;
        }
    }
    return w;
}

}  // namespace

LinearSelector LinearSelector::fit(const FeatureMatrix& candidates, double c) {
    candidates.check();
    if (!candidates.labels) {
        throw DegenerateLabelsError("select_features needs a labelled matrix");
    }
    auto classes = distinct_labels(*candidates.labels);
    if (classes.size() < 2) {
        throw DegenerateLabelsError("select_features needs at least two classes");
    }
    if (c <= 0.0) throw Error("InvalidArgument", "selection C must be positive");

    LinearSelector sel;
    sel.c_ = c;
    for (const auto& col : candidates.columns) sel.candidate_names_.push_back(col.name);

    for (DomainLabel cls : classes) {
        std::vector<int> y(candidates.n_rows);
        for (size_t i = 0; i < candidates.n_rows; ++i) {
            y[i] = (*candidates.labels)[i] == cls ? 1 : -1;
        }
        sel.weights_.push_back(fit_binary_hinge(candidates, y, c));
    }

    const size_t d = candidates.n_cols();
    sel.importance_.assign(d, 0.0);
    for (const auto& w : sel.weights_) {
        for (size_t j = 0; j < d; ++j) {
            sel.importance_[j] = std::max(sel.importance_[j], std::fabs(w[j]));
        }
    }
    double mean = 0.0;
    for (double imp : sel.importance_) mean += imp;
    if (d > 0) mean /= static_cast<double>(d);
    // "at or above the mean" with a little float slack so a flat importance
    // profile keeps every column
    const double threshold = mean - (1e-9 * std::fabs(mean) + 1e-12);
    for (size_t j = 0; j < d; ++j) {
        if (sel.importance_[j] >= threshold) sel.kept_.push_back(j);
    }
    return sel;
}

FeatureMatrix LinearSelector::transform(const FeatureMatrix& candidates) const {
    if (candidates.n_cols() != candidate_names_.size()) {
        throw SchemaMismatchError("selector applied to a matrix of different width");
    }
    FeatureMatrix out;
    out.n_rows = candidates.n_rows;
    out.labels = candidates.labels;
    for (size_t j : kept_) out.columns.push_back(candidates.columns[j]);
    out.values.resize(out.n_rows * out.n_cols());
    for (size_t r = 0; r < out.n_rows; ++r) {
        for (size_t jj = 0; jj < kept_.size(); ++jj) {
            out.at(r, jj) = candidates.at(r, kept_[jj]);
        }
    }
    return out;
}

nlohmann::json LinearSelector::to_json() const {
    return {{"c", c_},
            {"weights", weights_},
            {"importance", importance_},
            {"kept", kept_},
            {"candidate_names", candidate_names_}};
}

LinearSelector LinearSelector::from_json(const nlohmann::json& j) {
    LinearSelector sel;
    sel.c_ = j.at("c").get<double>();
    sel.weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
    sel.importance_ = j.at("importance").get<std::vector<double>>();
    sel.kept_ = j.at("kept").get<std::vector<size_t>>();
    sel.candidate_names_ = j.at("candidate_names").get<std::vector<std::string>>();
    for (size_t idx : sel.kept_) {
        if (idx >= sel.candidate_names_.size()) {
            throw SchemaMismatchError("selector kept index out of range");
        }
    }
    return sel;
}

FeatureMatrix select_features(const FeatureMatrix& matrix_with_labels, double c) {
    return LinearSelector::fit(matrix_with_labels, c).transform(matrix_with_labels);
}

}  // namespace repodomain
