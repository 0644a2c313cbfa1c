#include "repodomain/practices.hpp"

#include <map>

namespace repodomain {

bool is_refactoring(const std::string& message) {
    std::string lowered = to_lower(message);
    for (const auto& keyword : refactoring_keywords()) {
        if (lowered.find(keyword) != std::string::npos) return true;
    }
    return false;
}

RefactoringStats refactoring_stats(const std::vector<CommitRecord>& commits) {
    RefactoringStats stats;
    for (const auto& commit : commits) {
        if (is_refactoring(commit.message)) {
            ++stats.refactoring_commits;
        } else {
            ++stats.non_refactoring_commits;
        }
    }
    stats.total_commits = stats.refactoring_commits + stats.non_refactoring_commits;
    if (stats.total_commits == 0) {
        stats.ratio_flagged = true;
    } else {
        stats.refactoring_ratio = static_cast<double>(stats.refactoring_commits) /
                                  static_cast<double>(stats.total_commits);
    }
    return stats;
}

OwnershipStats ownership_stats(const std::vector<CommitRecord>& commits, double threshold) {
    OwnershipStats stats;
    stats.threshold = threshold;
    std::map<std::string, std::int64_t> per_author;
    for (const auto& commit : commits) ++per_author[commit.author_id];
    auto total_commits = static_cast<double>(commits.size());
    for (const auto& [author, count] : per_author) {
        double proportion = static_cast<double>(count) / total_commits;
        if (proportion >= threshold) {
            ++stats.major_contributors;
        } else {
            ++stats.minor_contributors;
        }
    }
    stats.total_contributors = stats.major_contributors + stats.minor_contributors;
    if (stats.total_contributors == 0) {
        stats.ratio_flagged = true;
    } else {
        stats.ownership_ratio = static_cast<double>(stats.major_contributors) /
                                static_cast<double>(stats.total_contributors);
    }
    return stats;
}

std::vector<double> PracticeProfile::as_row() const {
    return {
        static_cast<double>(refactoring_commits),
        static_cast<double>(non_refactoring_commits),
        static_cast<double>(total_commits),
        refactoring_ratio,
        static_cast<double>(major_contributors),
        static_cast<double>(minor_contributors),
        static_cast<double>(total_contributors),
        ownership_ratio,
        uses_automation ? 1.0 : 0.0,
    };
}

const std::vector<std::string>& PracticeProfile::feature_names() {
    static const std::vector<std::string> names = {
        "refactoring_commits", "non_refactoring_commits", "total_commits",
        "refactoring_ratio",   "major_contributors",      "minor_contributors",
        "total_contributors",  "ownership_ratio",         "uses_automation",
    };
    return names;
}

PracticeProfile practice_profile(const RawRepo& raw, const std::vector<CommitRecord>& commits) {
    PracticeProfile profile;
    RefactoringStats refs = refactoring_stats(commits);
    OwnershipStats own = ownership_stats(commits);
    profile.refactoring_commits = refs.refactoring_commits;
    profile.non_refactoring_commits = refs.non_refactoring_commits;
    profile.total_commits = refs.total_commits;
    profile.refactoring_ratio = refs.refactoring_ratio;
    profile.major_contributors = own.major_contributors;
    profile.minor_contributors = own.minor_contributors;
    profile.total_contributors = own.total_contributors;
    profile.ownership_ratio = own.ownership_ratio;
    profile.uses_automation = raw.has_workflow_files;
    profile.flagged = refs.ratio_flagged || own.ratio_flagged;
    return profile;
}

std::pair<std::vector<std::pair<RepoRef, std::int64_t>>, ExclusionReport> exclude_outliers(
    const std::vector<std::pair<RepoRef, std::int64_t>>& repos_with_counts,
    std::int64_t max_commits) {
    std::vector<std::pair<RepoRef, std::int64_t>> kept;
    ExclusionReport report;
    for (const auto& entry : repos_with_counts) {
        if (entry.second > max_commits) {
            report.excluded.push_back(entry);
        } else {
            kept.push_back(entry);
        }
    }
    report.analysed = static_cast<std::int64_t>(kept.size());
    return {std::move(kept), report};
}

}  // namespace repodomain
