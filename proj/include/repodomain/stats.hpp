#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repodomain/common.hpp"
#include "repodomain/corpus.hpp"
#include "repodomain/practices.hpp"

namespace repodomain {

// Row 1 = focal domain (yes, no), row 2 = all other domains (yes, no).
struct ContingencyTable2x2 {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 0;

    std::int64_t total() const { return a + b + c + d; }
};

enum class EffectLabel { Negligible, Small, Medium, Large };

std::string effect_label_name(EffectLabel label);

// Kim's thresholds: |es| < 0.1 negligible, then small/medium/large at 0.1/0.3/0.5.
EffectLabel classify_effect(double effect_size);

struct StatResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double effect_size = 0.0;
    EffectLabel effect_label = EffectLabel::Negligible;
};

// Pearson chi-square for a 2x2 table with optional Yates continuity
// correction; phi = sqrt(chi2 / N). Throws DegenerateTable on a zero marginal.
StatResult chi_square_2x2(const ContingencyTable2x2& t, bool continuity_correction = true);

struct MannWhitneyResult : StatResult {
    double u = 0.0;  // U statistic of the first sample (same value as statistic)
};

// U from rank sums with mid-ranks; two-sided p via the tie-corrected normal
// approximation with continuity correction; effect size is the rank-biserial
// correlation r = 1 - 2U/(n1*n2).
MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

struct StandardizeResult {
    std::vector<std::vector<double>> rows;
    std::vector<size_t> zero_variance_columns;  // mapped to all-zero, flagged
};

// Column-wise (x - mean) / sd with the population-sd convention.
StandardizeResult standardize(const std::vector<std::vector<double>>& rows);

struct TsneConfig {
    double perplexity = 30.0;  // capped at (N - 1) / 3
    double learning_rate = 200.0;
    int iterations = 1000;
    double early_exaggeration = 12.0;  // applied for the first 250 iterations
    int exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iter = 250;
    std::uint64_t seed = 0;
};

struct Embedding2D {
    std::vector<std::array<double, 2>> points;
    double final_kl = 0.0;
};

// Exact (O(N^2)) t-SNE. Per-point bandwidths are found by bisection so every
// conditional distribution matches the configured perplexity (tolerance 1e-5,
// at most 50 steps). Deterministic given config.seed. Expects standardized
// input; see standardize().
Embedding2D tsne_project(const std::vector<std::vector<double>>& rows, const TsneConfig& config);

// ---------------------------------------------------------------------------
// Domain comparison report (adoption, refactoring, ownership)
// ---------------------------------------------------------------------------

struct ClassifiedProfile {
    RepoRef ref;
    DomainLabel domain = DomainLabel::Documentation;
    PracticeProfile profile;
};

struct AdoptionRow {
    DomainLabel domain;
    std::int64_t adopted = 0;
    std::int64_t not_adopted = 0;
    double adopted_percent = 0.0;
    double not_adopted_percent = 0.0;
};

struct RefactoringRow {
    DomainLabel domain;
    std::int64_t refactoring = 0;
    std::int64_t non_refactoring = 0;
    double refactoring_percent = 0.0;
    double non_refactoring_percent = 0.0;
};

struct OwnershipRow {
    DomainLabel domain;
    std::int64_t repositories = 0;
    double median_ownership_ratio = 0.0;
};

struct PairwiseTest {
    std::string test;  // "chi2_adoption", "chi2_refactoring", "mwu_ownership"
    DomainLabel domain_a;
    std::optional<DomainLabel> domain_b;  // absent for one-vs-rest tests
    StatResult result;
};

struct DomainComparisonReport {
    std::vector<AdoptionRow> adoption;
    AdoptionRow adoption_total;
    std::vector<RefactoringRow> refactoring;
    RefactoringRow refactoring_total;
    std::vector<OwnershipRow> ownership;
    std::vector<PairwiseTest> tests;
    std::vector<std::string> flags;
};

DomainComparisonReport domain_comparison_report(const std::vector<ClassifiedProfile>& profiles);

double median(std::vector<double> values);

}  // namespace repodomain
