#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "repodomain/features.hpp"

namespace repodomain {

SmoteResult smote(const FeatureMatrix& matrix_with_labels, int k, std::uint64_t seed) {
    matrix_with_labels.check();
    if (!matrix_with_labels.labels) {
        throw DegenerateLabelsError("smote needs a labelled matrix");
    }
    if (k <= 0) throw Error("InvalidArgument", "smote needs k > 0");

    const auto& labels = *matrix_with_labels.labels;
    std::map<DomainLabel, std::vector<size_t>> rows_by_class;
    for (size_t i = 0; i < labels.size(); ++i) rows_by_class[labels[i]].push_back(i);

    size_t target = 0;
    for (const auto& [cls, rows] : rows_by_class) target = std::max(target, rows.size());

    SmoteResult result;
    result.matrix = matrix_with_labels;
    std::vector<DomainLabel> out_labels = labels;
    const size_t d = matrix_with_labels.n_cols();

    std::mt19937_64 rng(seed);
    for (const auto& [cls, rows] : rows_by_class) {
        if (rows.size() >= target) continue;
        if (rows.size() < 2) {
            throw TooFewSamplesError("class '" + label_id(cls) +
                                     "' has fewer than 2 samples; cannot synthesize");
        }
        // k nearest same-class neighbors per row (Euclidean, ties by index).
        const size_t k_eff = std::min(static_cast<size_t>(k), rows.size() - 1);
        std::vector<std::vector<size_t>> neighbors(rows.size());
        for (size_t a = 0; a < rows.size(); ++a) {
            std::vector<std::pair<double, size_t>> dist;
            dist.reserve(rows.size() - 1);
            for (size_t b = 0; b < rows.size(); ++b) {
                if (a == b) continue;
                double sq = 0.0;
                for (size_t c = 0; c < d; ++c) {
                    double delta = matrix_with_labels.at(rows[a], c) -
                                   matrix_with_labels.at(rows[b], c);
                    sq += delta * delta;
                }
                dist.emplace_back(sq, rows[b]);
            }
            std::sort(dist.begin(), dist.end());
            for (size_t i = 0; i < k_eff; ++i) neighbors[a].push_back(dist[i].second);
        }

        const size_t needed = target - rows.size();
        std::uniform_int_distribution<size_t> pick_neighbor(0, k_eff - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (size_t g = 0; g < needed; ++g) {
            size_t base_local = g % rows.size();
            size_t base = rows[base_local];
            size_t neighbor = neighbors[base_local][pick_neighbor(rng)];
            double u = unit(rng);
            for (size_t c = 0; c < d; ++c) {
                double x = matrix_with_labels.at(base, c);
                double nn = matrix_with_labels.at(neighbor, c);
                result.matrix.values.push_back(x + u * (nn - x));
            }
            out_labels.push_back(cls);
            result.synthetic.push_back({base, neighbor});
        }
    }

    result.matrix.n_rows = out_labels.size();
    result.matrix.labels = std::move(out_labels);
    result.matrix.check();
    return result;
}

}  // namespace repodomain
