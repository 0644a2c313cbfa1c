#include "repodomain/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace repodomain {

void TrainConfig::validate() const {
    if (num_rounds <= 0) throw Error("InvalidArgument", "num_rounds must be positive");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw Error("InvalidArgument", "learning_rate must lie in (0, 1]");
    }
    if (max_leaves < 2) throw Error("InvalidArgument", "max_leaves must be at least 2");
    if (min_samples_leaf <= 0) throw Error("InvalidArgument", "min_samples_leaf must be positive");
    if (l2_leaf_penalty < 0.0) throw Error("InvalidArgument", "l2_leaf_penalty must be nonnegative");
    if (!(feature_subsample > 0.0 && feature_subsample <= 1.0)) {
        throw Error("InvalidArgument", "feature_subsample must lie in (0, 1]");
    }
}

nlohmann::json TrainConfig::to_json() const {
    return {{"num_rounds", num_rounds},
            {"learning_rate", learning_rate},
            {"max_leaves", max_leaves},
            {"min_samples_leaf", min_samples_leaf},
            {"l2_leaf_penalty", l2_leaf_penalty},
            {"feature_subsample", feature_subsample},
            {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.num_rounds = j.at("num_rounds").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.max_leaves = j.at("max_leaves").get<int>();
    cfg.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    cfg.l2_leaf_penalty = j.at("l2_leaf_penalty").get<double>();
    cfg.feature_subsample = j.at("feature_subsample").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

double RegressionTree::predict(const double* row) const {
    int node = 0;
    while (!nodes[static_cast<size_t>(node)].is_leaf) {
        const TreeNode& n = nodes[static_cast<size_t>(node)];
        node = row[n.column] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(node)].value;
}

int RegressionTree::leaf_count() const {
    int count = 0;
    for (const auto& n : nodes) {
        if (n.is_leaf) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

constexpr double kMinHessian = 1e-16;

double leaf_score(double g, double h, double l2) { return g * g / (h + l2) / 2.0; }

struct SplitCandidate {
    bool valid = false;
    size_t column = 0;
    double threshold = 0.0;
    double gain = 0.0;
    double g_left = 0.0;
    double h_left = 0.0;
    size_t n_left = 0;
};

// Exact greedy scan over sorted unique values of one column within a leaf.
// Tie-break: callers scan columns in ascending order and keep strictly
// better gains, which yields lowest-column / lowest-threshold determinism.
void scan_column(const FeatureMatrix& m, const std::vector<size_t>& rows,
                 const std::vector<double>& grad, const std::vector<double>& hess,
                 size_t column, double g_total, double h_total, double l2,
                 int min_samples_leaf, SplitCandidate& best) {
    struct Point {
        double x;
        double g;
        double h;
    };
    std::vector<Point> points;
    points.reserve(rows.size());
    for (size_t r : rows) points.push_back({m.at(r, column), grad[r], hess[r]});
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });

    const double parent = leaf_score(g_total, h_total, l2);
    double g_left = 0.0;
    double h_left = 0.0;
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        g_left += points[i].g;
        h_left += points[i].h;
        if (points[i].x == points[i + 1].x) continue;
        size_t n_left = i + 1;
        size_t n_right = points.size() - n_left;
        if (n_left < static_cast<size_t>(min_samples_leaf) ||
            n_right < static_cast<size_t>(min_samples_leaf)) {
            continue;
        }
        double gain = leaf_score(g_left, h_left, l2) +
                      leaf_score(g_total - g_left, h_total - h_left, l2) - parent;
        if (gain > best.gain) {
            double threshold = points[i].x + (points[i + 1].x - points[i].x) / 2.0;
            if (!(threshold > points[i].x)) threshold = points[i + 1].x;
            best.valid = true;
            best.column = column;
            best.threshold = threshold;
            best.gain = gain;
            best.g_left = g_left;
            best.h_left = h_left;
            best.n_left = n_left;
        }
    }
}

struct LeafState {
    int node = 0;
    std::vector<size_t> rows;
    double g_total = 0.0;
    double h_total = 0.0;
    SplitCandidate best;
};

RegressionTree fit_tree(const FeatureMatrix& m, const std::vector<double>& grad,
                        const std::vector<double>& hess, const TrainConfig& config,
                        const std::vector<size_t>& columns) {
    RegressionTree tree;
    tree.nodes.push_back(TreeNode{});

    auto evaluate_leaf = [&](LeafState& leaf) {
        leaf.best = SplitCandidate{};
        if (leaf.rows.size() < 2 * static_cast<size_t>(config.min_samples_leaf)) return;
        for (size_t column : columns) {
            scan_column(m, leaf.rows, grad, hess, column, leaf.g_total, leaf.h_total,
                        config.l2_leaf_penalty, config.min_samples_leaf, leaf.best);
        }
    };

    LeafState root;
    root.node = 0;
    root.rows.resize(m.n_rows);
    std::iota(root.rows.begin(), root.rows.end(), 0);
    for (size_t r : root.rows) {
        root.g_total += grad[r];
        root.h_total += hess[r];
    }
    evaluate_leaf(root);

    std::vector<LeafState> leaves;
    leaves.push_back(std::move(root));

    while (static_cast<int>(leaves.size()) < config.max_leaves) {
        size_t best_idx = leaves.size();
        for (size_t i = 0; i < leaves.size(); ++i) {
            if (!leaves[i].best.valid || leaves[i].best.gain <= 0.0) continue;
            if (best_idx == leaves.size() || leaves[i].best.gain > leaves[best_idx].best.gain) {
                best_idx = i;
            }
        }
        if (best_idx == leaves.size()) break;

        LeafState parent = std::move(leaves[best_idx]);
        leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(best_idx));

        LeafState left, right;
        for (size_t r : parent.rows) {
            if (m.at(r, parent.best.column) < parent.best.threshold) {
                left.rows.push_back(r);
                left.g_total += grad[r];
                left.h_total += hess[r];
            } else {
                right.rows.push_back(r);
                right.g_total += grad[r];
                right.h_total += hess[r];
            }
        }

        const int left_index = static_cast<int>(tree.nodes.size());
        const int right_index = left_index + 1;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        TreeNode& node = tree.nodes[static_cast<size_t>(parent.node)];
        node.is_leaf = false;
        node.column = parent.best.column;
        node.threshold = parent.best.threshold;
        node.left = left_index;
        node.right = right_index;
        left.node = left_index;
        right.node = right_index;

        evaluate_leaf(left);
        evaluate_leaf(right);
        leaves.push_back(std::move(left));
        leaves.push_back(std::move(right));
    }

    for (const auto& leaf : leaves) {
        tree.nodes[static_cast<size_t>(leaf.node)].value =
            -leaf.g_total / (leaf.h_total + config.l2_leaf_penalty + kMinHessian);
    }
    return tree;
}

}  // namespace

std::vector<double> softmax(const std::vector<double>& scores) {
    double max_score = -std::numeric_limits<double>::infinity();
    for (double s : scores) max_score = std::max(max_score, s);
    std::vector<double> out(scores.size());
    double sum = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - max_score);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

GbdtModel train(const FeatureMatrix& matrix_with_labels, const TrainConfig& config) {
    config.validate();
    matrix_with_labels.check();
    if (!matrix_with_labels.labels) throw DegenerateLabelsError("train needs a labelled matrix");

    const auto& labels = *matrix_with_labels.labels;
    std::vector<DomainLabel> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw DegenerateLabelsError("train needs at least two classes");

    const size_t n = matrix_with_labels.n_rows;
    const size_t k = classes.size();
    const size_t d = matrix_with_labels.n_cols();
    if (d == 0) throw SchemaMismatchError("train needs at least one feature column");

    std::vector<size_t> y(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = static_cast<size_t>(
            std::find(classes.begin(), classes.end(), labels[i]) - classes.begin());
    }

    GbdtModel model;
    model.classes = classes;
    model.columns = matrix_with_labels.columns;
    model.config = config;
    model.base_scores.resize(k);
    for (size_t i = 0; i < n; ++i) model.base_scores[y[i]] += 1.0;
    for (size_t c = 0; c < k; ++c) {
        model.base_scores[c] = std::log(model.base_scores[c] / static_cast<double>(n));
    }

    // scores[i][c], flattened
    std::vector<double> scores(n * k);
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < k; ++c) scores[i * k + c] = model.base_scores[c];
    }

    std::vector<double> proba(n * k);
    auto refresh_proba_and_loss = [&]() {
        double loss = 0.0;
        std::vector<double> row(k);
        for (size_t i = 0; i < n; ++i) {
            for (size_t c = 0; c < k; ++c) row[c] = scores[i * k + c];
            auto p = softmax(row);
            for (size_t c = 0; c < k; ++c) proba[i * k + c] = p[c];
            loss -= std::log(std::max(p[y[i]], 1e-300));
        }
        return loss / static_cast<double>(n);
    };

    std::mt19937_64 rng(config.seed);
    std::vector<size_t> all_columns(d);
    std::iota(all_columns.begin(), all_columns.end(), 0);
    const size_t subsample_count = std::min(
        d, static_cast<size_t>(std::ceil(config.feature_subsample * static_cast<double>(d))));

    model.training_loss.push_back(refresh_proba_and_loss());

    std::vector<double> grad(n), hess(n);
    for (int round = 0; round < config.num_rounds; ++round) {
        std::vector<RegressionTree> round_trees;
        round_trees.reserve(k);
        for (size_t c = 0; c < k; ++c) {
            for (size_t i = 0; i < n; ++i) {
                double p = proba[i * k + c];
                grad[i] = p - (y[i] == c ? 1.0 : 0.0);
                hess[i] = std::max(p * (1.0 - p), kMinHessian);
            }
            std::vector<size_t> columns = all_columns;
            if (subsample_count < d) {
                std::shuffle(columns.begin(), columns.end(), rng);
                columns.resize(subsample_count);
                std::sort(columns.begin(), columns.end());
            }
            RegressionTree tree = fit_tree(matrix_with_labels, grad, hess, config, columns);
            for (size_t i = 0; i < n; ++i) {
                scores[i * k + c] +=
                    config.learning_rate *
                    tree.predict(&matrix_with_labels.values[i * d]);
            }
            round_trees.push_back(std::move(tree));
        }
        model.rounds.push_back(std::move(round_trees));
        model.training_loss.push_back(refresh_proba_and_loss());
    }
    return model;
}

std::vector<double> predict_proba_row(const GbdtModel& model, const std::vector<double>& row) {
    if (row.size() != model.n_columns()) {
        throw SchemaMismatchError("prediction row width " + std::to_string(row.size()) +
                                  " does not match model columns " +
                                  std::to_string(model.n_columns()));
    }
    std::vector<double> scores = model.base_scores;
    for (const auto& round : model.rounds) {
        for (size_t c = 0; c < model.n_classes(); ++c) {
            scores[c] += model.config.learning_rate * round[c].predict(row.data());
        }
    }
    return softmax(scores);
}

std::vector<std::vector<double>> predict_proba(const GbdtModel& model, const FeatureMatrix& rows) {
    if (rows.n_cols() != model.n_columns()) {
        throw SchemaMismatchError("prediction matrix width does not match model columns");
    }
    std::vector<std::vector<double>> out;
    out.reserve(rows.n_rows);
    for (size_t r = 0; r < rows.n_rows; ++r) out.push_back(predict_proba_row(model, rows.row(r)));
    return out;
}

std::vector<DomainLabel> predict(const GbdtModel& model, const FeatureMatrix& rows) {
    auto proba = predict_proba(model, rows);
    std::vector<DomainLabel> out;
    out.reserve(proba.size());
    for (const auto& p : proba) {
        size_t best = 0;
        for (size_t c = 1; c < p.size(); ++c) {
            if (p[c] > p[best]) best = c;
        }
        out.push_back(model.classes[best]);
    }
    return out;
}

std::map<std::string, std::int64_t> feature_importance(const GbdtModel& model) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& col : model.columns) counts[col.name] = 0;
    for (const auto& round : model.rounds) {
        for (const auto& tree : round) {
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf) ++counts[model.columns[node.column].name];
            }
        }
    }
    return counts;
}

std::map<FeatureGroup, double> group_importance(const GbdtModel& model) {
    std::map<FeatureGroup, std::int64_t> splits;
    std::int64_t total = 0;
    for (const auto& round : model.rounds) {
        for (const auto& tree : round) {
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf) {
                    ++splits[model.columns[node.column].group];
                    ++total;
                }
            }
        }
    }
    std::map<FeatureGroup, double> percents;
    for (FeatureGroup g : {FeatureGroup::Textual, FeatureGroup::Categorical,
                           FeatureGroup::Numerical}) {
        auto it = splits.find(g);
        std::int64_t count = it == splits.end() ? 0 : it->second;
        percents[g] = total == 0 ? 0.0
                                 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
    }
    return percents;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        if (n.is_leaf) {
            nodes.push_back({{"value", n.value}});
        } else {
            nodes.push_back({{"column", n.column},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right}});
        }
    }
    return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& j) {
    RegressionTree tree;
    for (const auto& n : j) {
        TreeNode node;
        if (n.contains("value")) {
            node.is_leaf = true;
            node.value = n.at("value").get<double>();
        } else {
            node.is_leaf = false;
            node.column = n.at("column").get<size_t>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
        }
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw SchemaMismatchError("empty tree payload");
    return tree;
}

}  // namespace

nlohmann::json GbdtModel::to_json() const {
    nlohmann::json j;
    std::vector<std::string> class_ids;
    for (DomainLabel c : classes) class_ids.push_back(label_id(c));
    j["classes"] = class_ids;
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : columns) {
        cols.push_back({{"name", col.name},
                        {"group", group_name(col.group)},
                        {"source", source_name(col.source)}});
    }
    j["columns"] = cols;
    j["base_scores"] = base_scores;
    j["config"] = config.to_json();
    j["training_loss"] = training_loss;
    nlohmann::json rounds_json = nlohmann::json::array();
    for (const auto& round : rounds) {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : round) trees.push_back(tree_to_json(tree));
        rounds_json.push_back(trees);
    }
    j["rounds"] = rounds_json;
    return j;
}

GbdtModel GbdtModel::from_json(const nlohmann::json& j) {
    GbdtModel model;
    for (const auto& c : j.at("classes")) model.classes.push_back(label_from_id(c.get<std::string>()));
    for (const auto& col : j.at("columns")) {
        model.columns.push_back({col.at("name").get<std::string>(),
                                 group_from_name(col.at("group").get<std::string>()),
                                 source_from_name(col.at("source").get<std::string>())});
    }
    model.base_scores = j.at("base_scores").get<std::vector<double>>();
    model.config = TrainConfig::from_json(j.at("config"));
    model.training_loss = j.at("training_loss").get<std::vector<double>>();
    for (const auto& round : j.at("rounds")) {
        std::vector<RegressionTree> trees;
        for (const auto& tree : round) trees.push_back(tree_from_json(tree));
        if (trees.size() != model.classes.size()) {
            throw SchemaMismatchError("round tree count does not match class count");
        }
        model.rounds.push_back(std::move(trees));
    }
    for (const auto& round : model.rounds) {
        for (const auto& tree : round) {
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf && node.column >= model.columns.size()) {
                    throw SchemaMismatchError("tree split references unknown column");
                }
            }
        }
    }
    return model;
}

}  // namespace repodomain
