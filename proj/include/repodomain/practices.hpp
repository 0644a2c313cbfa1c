#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repodomain/ingest.hpp"

namespace repodomain {

// Ratzinger's 13 keyword stems; matched as lowercase substrings.
inline const std::vector<std::string>& refactoring_keywords() {
    static const std::vector<std::string> keywords = {
        "refactor", "restruct", "clean", "not use", "unus", "reformat", "import",
        "remov",    "replac",   "split", "reorg",   "renam", "move",
    };
    return keywords;
}

bool is_refactoring(const std::string& message);

struct RefactoringStats {
    std::int64_t refactoring_commits = 0;
    std::int64_t non_refactoring_commits = 0;
    std::int64_t total_commits = 0;
    double refactoring_ratio = 0.0;
    bool ratio_flagged = false;  // true when total = 0
};

RefactoringStats refactoring_stats(const std::vector<CommitRecord>& commits);

struct OwnershipStats {
    std::int64_t major_contributors = 0;
    std::int64_t minor_contributors = 0;
    std::int64_t total_contributors = 0;
    double ownership_ratio = 0.0;
    double threshold = 0.05;
    bool ratio_flagged = false;  // true when no contributors
};

// Ownership proportion = author's commits / total commits; major iff the
// proportion is at or above the threshold.
OwnershipStats ownership_stats(const std::vector<CommitRecord>& commits, double threshold = 0.05);

// The nine per-repository practice features.
struct PracticeProfile {
    std::int64_t refactoring_commits = 0;
    std::int64_t non_refactoring_commits = 0;
    std::int64_t total_commits = 0;
    double refactoring_ratio = 0.0;
    std::int64_t major_contributors = 0;
    std::int64_t minor_contributors = 0;
    std::int64_t total_contributors = 0;
    double ownership_ratio = 0.0;
    bool uses_automation = false;
    bool flagged = false;  // degenerate zero-commit/zero-contributor input

    std::vector<double> as_row() const;
    static const std::vector<std::string>& feature_names();
};

PracticeProfile practice_profile(const RawRepo& raw, const std::vector<CommitRecord>& commits);

struct ExclusionReport {
    std::vector<std::pair<RepoRef, std::int64_t>> excluded;  // ref, commit count
    std::int64_t analysed = 0;
};

// Drops repositories whose commit count strictly exceeds max_commits.
std::pair<std::vector<std::pair<RepoRef, std::int64_t>>, ExclusionReport> exclude_outliers(
    const std::vector<std::pair<RepoRef, std::int64_t>>& repos_with_counts,
    std::int64_t max_commits = 200000);

}  // namespace repodomain
