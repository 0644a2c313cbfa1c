#include "repodomain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace repodomain {

std::string effect_label_name(EffectLabel label) {
    switch (label) {
        case EffectLabel::Negligible: return "negligible";
        case EffectLabel::Small: return "small";
        case EffectLabel::Medium: return "medium";
        case EffectLabel::Large: return "large";
    }
    return "negligible";
}

EffectLabel classify_effect(double effect_size) {
    double es = std::fabs(effect_size);
    if (es < 0.1) return EffectLabel::Negligible;
    if (es < 0.3) return EffectLabel::Small;
    if (es < 0.5) return EffectLabel::Medium;
    return EffectLabel::Large;
}

StatResult chi_square_2x2(const ContingencyTable2x2& t, bool continuity_correction) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
        throw DegenerateTableError("negative cell in 2x2 table");
    }
    const double a = static_cast<double>(t.a);
    const double b = static_cast<double>(t.b);
    const double c = static_cast<double>(t.c);
    const double d = static_cast<double>(t.d);
    const double n = a + b + c + d;
    if (n < 1.0) throw DegenerateTableError("empty 2x2 table");
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) {
        throw DegenerateTableError("zero marginal in 2x2 table");
    }

    double diff = std::fabs(a * d - b * c);
    if (continuity_correction) diff = std::max(0.0, diff - n / 2.0);

    StatResult result;
    result.statistic = n * diff * diff / (r1 * r2 * c1 * c2);
    // df = 1 survival function of the chi-square distribution
    result.p_value = std::erfc(std::sqrt(result.statistic / 2.0));
    result.effect_size = std::sqrt(result.statistic / n);
    result.effect_label = classify_effect(result.effect_size);
    return result;
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw EmptySampleError("mann_whitney_u needs non-empty samples");
    const size_t n1 = x.size();
    const size_t n2 = y.size();
    const size_t n = n1 + n2;

    struct Entry {
        double value;
        bool from_x;
    };
    std::vector<Entry> pooled;
    pooled.reserve(n);
    for (double v : x) pooled.push_back({v, true});
    for (double v : y) pooled.push_back({v, false});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const Entry& l, const Entry& r) { return l.value < r.value; });

    // Mid-ranks for ties; also accumulate sum(t^3 - t) over tie groups.
    double rank_sum_x = 0.0;
    double tie_term = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[j + 1].value == pooled[i].value) ++j;
        double group = static_cast<double>(j - i + 1);
        double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) {
            if (pooled[k].from_x) rank_sum_x += mid_rank;
        }
        tie_term += group * group * group - group;
        i = j + 1;
    }

    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double dn = static_cast<double>(n);
    const double u = rank_sum_x - dn1 * (dn1 + 1.0) / 2.0;
    const double mean_u = dn1 * dn2 / 2.0;
    const double variance =
        dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));

    MannWhitneyResult result;
    result.u = u;
    result.statistic = u;
    if (variance <= 0.0) {
        result.p_value = 1.0;
    } else {
        double z = std::max(0.0, std::fabs(u - mean_u) - 0.5) / std::sqrt(variance);
        result.p_value = std::erfc(z / std::sqrt(2.0));  // two-sided
    }
    result.effect_size = 1.0 - 2.0 * u / (dn1 * dn2);  // rank-biserial r
    result.effect_label = classify_effect(result.effect_size);
    return result;
}

StandardizeResult standardize(const std::vector<std::vector<double>>& rows) {
    StandardizeResult result;
    result.rows = rows;
    if (rows.empty()) return result;
    const size_t dims = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != dims) throw NonFiniteInputError("ragged rows in standardize");
    }
    const double n = static_cast<double>(rows.size());
    for (size_t col = 0; col < dims; ++col) {
        double mean = 0.0;
        for (const auto& row : rows) mean += row[col];
        mean /= n;
        double var = 0.0;
        for (const auto& row : rows) {
            double d = row[col] - mean;
            var += d * d;
        }
        var /= n;  // population convention
        if (var == 0.0) {
            for (auto& row : result.rows) row[col] = 0.0;
            result.zero_variance_columns.push_back(col);
            continue;
        }
        double sd = std::sqrt(var);
        for (auto& row : result.rows) row[col] = (row[col] - mean) / sd;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exact t-SNE
// ---------------------------------------------------------------------------

namespace {

// Row-conditional affinities whose perplexity matches the target, found by
// bisection on the precision beta = 1 / (2 sigma^2).
void conditional_affinities(const std::vector<double>& sq_dists, size_t self, double target_entropy,
                            std::vector<double>& p_out) {
    const size_t n = sq_dists.size();
    double beta = 1.0;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();

    for (int step = 0; step < 50; ++step) {
        double sum_p = 0.0;
        double sum_dp = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (j == self) {
                p_out[j] = 0.0;
                continue;
            }
            double p = std::exp(-beta * sq_dists[j]);
            p_out[j] = p;
            sum_p += p;
            sum_dp += sq_dists[j] * p;
        }
        double entropy;
        if (sum_p <= 0.0) {
            entropy = 0.0;
        } else {
            entropy = std::log(sum_p) + beta * sum_dp / sum_p;
        }
        double diff = entropy - target_entropy;
        if (std::fabs(diff) < 1e-5) break;
        if (diff > 0.0) {
            beta_min = beta;
            beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
        } else {
            beta_max = beta;
            beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
        }
    }

    double sum_p = 0.0;
    for (size_t j = 0; j < n; ++j) sum_p += p_out[j];
    if (sum_p <= 0.0) {
        // isolated point: spread affinity uniformly
        double uniform = 1.0 / static_cast<double>(n - 1);
        for (size_t j = 0; j < n; ++j) p_out[j] = (j == self) ? 0.0 : uniform;
        return;
    }
    for (size_t j = 0; j < n; ++j) p_out[j] /= sum_p;
}

}  // namespace

Embedding2D tsne_project(const std::vector<std::vector<double>>& rows, const TsneConfig& config) {
    const size_t n = rows.size();
    if (n < 4) throw TooFewPointsError("t-SNE needs at least 4 points");
    const size_t dims = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != dims) throw NonFiniteInputError("ragged rows in tsne_project");
        for (double v : row) {
            if (!std::isfinite(v)) throw NonFiniteInputError("non-finite value in tsne_project");
        }
    }

    const double perplexity =
        std::min(config.perplexity, static_cast<double>(n - 1) / 3.0);
    const double target_entropy = std::log(perplexity);

    // Pairwise squared distances.
    std::vector<std::vector<double>> sq(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (size_t k = 0; k < dims; ++k) {
                double delta = rows[i][k] - rows[j][k];
                d += delta * delta;
            }
            sq[i][j] = d;
            sq[j][i] = d;
        }
    }

    // Symmetrized affinities.
    std::vector<std::vector<double>> p_cond(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) conditional_affinities(sq[i], i, target_entropy, p_cond[i]);
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            p[i][j] = std::max((p_cond[i][j] + p_cond[j][i]) / (2.0 * static_cast<double>(n)),
                               1e-12);
        }
        p[i][i] = 0.0;
    }

    // Seeded layout, tiny normal noise.
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::array<double, 2>> y(n);
    for (size_t i = 0; i < n; ++i) {
        y[i][0] = normal(rng) * 1e-4;
        y[i][1] = normal(rng) * 1e-4;
    }

    std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
    std::vector<std::array<double, 2>> grad(n);
    std::vector<std::vector<double>> num(n, std::vector<double>(n, 0.0));

    for (int iter = 0; iter < config.iterations; ++iter) {
        const double exaggeration = iter < config.exaggeration_iters ? config.early_exaggeration : 1.0;
        const double momentum =
            iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;

        double q_sum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            num[i][i] = 0.0;
            for (size_t j = i + 1; j < n; ++j) {
                double dx = y[i][0] - y[j][0];
                double dy = y[i][1] - y[j][1];
                double val = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i][j] = val;
                num[j][i] = val;
                q_sum += 2.0 * val;
            }
        }
        if (q_sum <= 0.0) q_sum = 1e-12;

        for (size_t i = 0; i < n; ++i) {
            grad[i] = {0.0, 0.0};
            for (size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double q = std::max(num[i][j] / q_sum, 1e-12);
                double coeff = 4.0 * (exaggeration * p[i][j] - q) * num[i][j];
                grad[i][0] += coeff * (y[i][0] - y[j][0]);
                grad[i][1] += coeff * (y[i][1] - y[j][1]);
            }
        }

        double mean0 = 0.0, mean1 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            velocity[i][0] = momentum * velocity[i][0] - config.learning_rate * grad[i][0];
            velocity[i][1] = momentum * velocity[i][1] - config.learning_rate * grad[i][1];
            y[i][0] += velocity[i][0];
            y[i][1] += velocity[i][1];
            mean0 += y[i][0];
            mean1 += y[i][1];
        }
        mean0 /= static_cast<double>(n);
        mean1 /= static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) {
            y[i][0] -= mean0;
            y[i][1] -= mean1;
        }
    }

    // Final KL divergence against the un-exaggerated affinities.
    double q_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double dx = y[i][0] - y[j][0];
            double dy = y[i][1] - y[j][1];
            q_sum += 2.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    double kl = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double dx = y[i][0] - y[j][0];
            double dy = y[i][1] - y[j][1];
            double q = std::max((1.0 / (1.0 + dx * dx + dy * dy)) / q_sum, 1e-12);
            kl += p[i][j] * std::log(p[i][j] / q);
        }
    }

    Embedding2D result;
    result.points = std::move(y);
    result.final_kl = kl;
    return result;
}

// ---------------------------------------------------------------------------
// Domain comparison report
// ---------------------------------------------------------------------------

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

DomainComparisonReport domain_comparison_report(const std::vector<ClassifiedProfile>& profiles) {
    DomainComparisonReport report;
    std::map<DomainLabel, std::vector<const PracticeProfile*>> by_domain;
    for (const auto& cp : profiles) by_domain[cp.domain].push_back(&cp.profile);

    auto pct = [](std::int64_t part, std::int64_t total) {
        return total == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(total);
    };

    for (const auto& [domain, group] : by_domain) {
        AdoptionRow arow;
        arow.domain = domain;
        RefactoringRow rrow;
        rrow.domain = domain;
        std::vector<double> ownership;
        for (const auto* p : group) {
            (p->uses_automation ? arow.adopted : arow.not_adopted) += 1;
            rrow.refactoring += p->refactoring_commits;
            rrow.non_refactoring += p->non_refactoring_commits;
            ownership.push_back(p->ownership_ratio);
        }
        auto repos = arow.adopted + arow.not_adopted;
        arow.adopted_percent = pct(arow.adopted, repos);
        arow.not_adopted_percent = pct(arow.not_adopted, repos);
        auto commits = rrow.refactoring + rrow.non_refactoring;
        rrow.refactoring_percent = pct(rrow.refactoring, commits);
        rrow.non_refactoring_percent = pct(rrow.non_refactoring, commits);
        report.adoption.push_back(arow);
        report.refactoring.push_back(rrow);
        report.ownership.push_back(
            {domain, static_cast<std::int64_t>(group.size()), median(std::move(ownership))});

        report.adoption_total.adopted += arow.adopted;
        report.adoption_total.not_adopted += arow.not_adopted;
        report.refactoring_total.refactoring += rrow.refactoring;
        report.refactoring_total.non_refactoring += rrow.non_refactoring;
    }
    auto total_repos = report.adoption_total.adopted + report.adoption_total.not_adopted;
    report.adoption_total.adopted_percent = pct(report.adoption_total.adopted, total_repos);
    report.adoption_total.not_adopted_percent = pct(report.adoption_total.not_adopted, total_repos);
    auto total_commits = report.refactoring_total.refactoring + report.refactoring_total.non_refactoring;
    report.refactoring_total.refactoring_percent = pct(report.refactoring_total.refactoring, total_commits);
    report.refactoring_total.non_refactoring_percent =
        pct(report.refactoring_total.non_refactoring, total_commits);

    if (by_domain.size() < 2) {
        report.flags.push_back("fewer than two domains: no hypothesis tests emitted");
        return report;
    }

    // One-vs-rest chi-square for adoption and refactoring volume.
    for (const auto& arow : report.adoption) {
        ContingencyTable2x2 table{arow.adopted, arow.not_adopted,
                                  report.adoption_total.adopted - arow.adopted,
                                  report.adoption_total.not_adopted - arow.not_adopted};
        try {
            report.tests.push_back(
                {"chi2_adoption", arow.domain, std::nullopt, chi_square_2x2(table)});
        } catch (const DegenerateTableError&) {
            report.flags.push_back("degenerate adoption table for " + label_id(arow.domain));
        }
    }
    for (const auto& rrow : report.refactoring) {
        ContingencyTable2x2 table{rrow.refactoring, rrow.non_refactoring,
                                  report.refactoring_total.refactoring - rrow.refactoring,
                                  report.refactoring_total.non_refactoring - rrow.non_refactoring};
        try {
            report.tests.push_back(
                {"chi2_refactoring", rrow.domain, std::nullopt, chi_square_2x2(table)});
        } catch (const DegenerateTableError&) {
            report.flags.push_back("degenerate refactoring table for " + label_id(rrow.domain));
        }
    }

    // Pairwise Mann-Whitney on the ownership ratio.
    std::vector<DomainLabel> domains;
    for (const auto& [domain, _] : by_domain) domains.push_back(domain);
    for (size_t i = 0; i < domains.size(); ++i) {
        for (size_t j = i + 1; j < domains.size(); ++j) {
            std::vector<double> xs, ys;
            for (const auto* p : by_domain[domains[i]]) xs.push_back(p->ownership_ratio);
            for (const auto* p : by_domain[domains[j]]) ys.push_back(p->ownership_ratio);
            report.tests.push_back(
                {"mwu_ownership", domains[i], domains[j], mann_whitney_u(xs, ys)});
        }
    }
    return report;
}

}  // namespace repodomain
