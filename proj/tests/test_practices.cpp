#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "repodomain/practices.hpp"

using namespace repodomain;

namespace {

CommitRecord commit(const std::string& sha_seed, const std::string& author,
                    const std::string& message) {
    CommitRecord c;
    c.sha = sha_seed;
    c.author_id = author;
    c.message = message;
    c.authored_at = 1647852672;
    return c;
}

std::vector<CommitRecord> commits_by_author(const std::map<std::string, int>& counts) {
    std::vector<CommitRecord> commits;
    int serial = 0;
    for (const auto& [author, n] : counts) {
        for (int i = 0; i < n; ++i) {
            commits.push_back(commit("sha" + std::to_string(serial++), author, "work item"));
        }
    }
    return commits;
}

// Independent oracle: explicit character-by-character scan for each stem,
// no library search functions.
bool oracle_is_refactoring(const std::string& message) {
    std::string lowered;
    for (char c : message) {
        lowered.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    for (const auto& keyword : refactoring_keywords()) {
        if (keyword.size() > lowered.size()) continue;
        for (size_t start = 0; start + keyword.size() <= lowered.size(); ++start) {
            bool match = true;
            for (size_t i = 0; i < keyword.size(); ++i) {
                if (lowered[start + i] != keyword[i]) {
                    match = false;
                    break;
                }
            }
            if (match) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("is_refactoring keyword matching") {
    CHECK(is_refactoring("Refactor parser module"));
    CHECK_FALSE(is_refactoring("Add login page"));
    CHECK(is_refactoring("Cleanup and rename helpers"));  // "clean" and "renam"
    // stems must match inside larger words
    CHECK(is_refactoring("unused variable dropped"));
    CHECK(is_refactoring("renamed the builder"));
    CHECK(is_refactoring("do not use this API"));  // "not use"
    CHECK(is_refactoring("Removed dead code"));
    CHECK(is_refactoring("REFORMAT sources"));
    CHECK(is_refactoring("import cleanup"));
    CHECK_FALSE(is_refactoring(""));
    CHECK_FALSE(is_refactoring("bugfix for issue #42"));
}

TEST_CASE("is_refactoring is case-insensitive") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> words = {"Refactor", "LOGIN",  "Unused", "page",
                                            "RENAMED",  "tests",  "Move",   "docs",
                                            "SPLIT",    "bugfix", "NOT USE", "api"};
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len(0, 6);
    for (int iter = 0; iter < 500; ++iter) {
        std::string m;
        int n = len(rng);
        for (int i = 0; i < n; ++i) m += words[pick(rng)] + " ";
        CHECK(is_refactoring(m) == is_refactoring(to_lower(m)));
    }
}

TEST_CASE("is_refactoring agrees with the brute-force oracle on a 200-message fixture") {
    std::vector<std::string> messages;
    const std::vector<std::string> positives = {
        "Refactor the parser",   "restructure modules",  "clean up whitespace",
        "do not use the cache",  "unused import removed", "reformat with clang-format",
        "import paths fixed",    "remove legacy shim",   "replace allocator",
        "split the test file",   "reorganize folders",   "renamed internals",
        "move files to src",     "Unused variable",      "Renamed method",
        "Removal of dead code",  "IMPORTant fix",        "cleanup pass",
    };
    const std::vector<std::string> negatives = {
        "add login page",       "fix overflow",     "bump version",   "update docs",
        "support dark mode",    "initial commit",   "merge branch",   "release v2",
        "fix typo",             "add unit coverage", "improve speed", "patch CVE",
    };
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<size_t> pos_pick(0, positives.size() - 1);
    std::uniform_int_distribution<size_t> neg_pick(0, negatives.size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 200; ++i) {
        messages.push_back(coin(rng) ? positives[pos_pick(rng)] : negatives[neg_pick(rng)]);
    }
    for (const auto& m : messages) {
        CAPTURE(m);
        CHECK(is_refactoring(m) == oracle_is_refactoring(m));
    }
}

TEST_CASE("refactoring_stats") {
    SUBCASE("empty commit list is flagged") {
        RefactoringStats stats = refactoring_stats({});
        CHECK(stats.total_commits == 0);
        CHECK(stats.refactoring_ratio == 0.0);
        CHECK(stats.ratio_flagged);
    }
    SUBCASE("3 refactoring of 10 gives ratio 0.3") {
        std::vector<CommitRecord> commits;
        for (int i = 0; i < 3; ++i) {
            commits.push_back(commit("r" + std::to_string(i), "a", "refactor step"));
        }
        for (int i = 0; i < 7; ++i) {
            commits.push_back(commit("p" + std::to_string(i), "a", "feature work"));
        }
        RefactoringStats stats = refactoring_stats(commits);
        CHECK(stats.refactoring_commits == 3);
        CHECK(stats.non_refactoring_commits == 7);
        CHECK(stats.refactoring_ratio == doctest::Approx(0.3));
        CHECK_FALSE(stats.ratio_flagged);
    }
    SUBCASE("counts partition the commit set") {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<int> coin(0, 1);
        std::vector<CommitRecord> commits;
        for (int i = 0; i < 137; ++i) {
            commits.push_back(commit("s" + std::to_string(i), "a",
                                     coin(rng) ? "renamed field" : "fix bug"));
        }
        RefactoringStats stats = refactoring_stats(commits);
        CHECK(stats.refactoring_commits + stats.non_refactoring_commits == 137);
        CHECK(stats.total_commits == 137);
    }
}

TEST_CASE("ownership_stats") {
    SUBCASE("boundary is inclusive: exactly 5% is major") {
        auto commits = commits_by_author({{"A", 50}, {"B", 45}, {"C", 5}});
        OwnershipStats stats = ownership_stats(commits);
        CHECK(stats.major_contributors == 3);
        CHECK(stats.minor_contributors == 0);
        CHECK(stats.ownership_ratio == doctest::Approx(1.0));
    }
    SUBCASE("one dominant author") {
        auto commits = commits_by_author({{"A", 96}, {"B", 2}, {"C", 2}});
        OwnershipStats stats = ownership_stats(commits);
        CHECK(stats.major_contributors == 1);
        CHECK(stats.minor_contributors == 2);
        CHECK(stats.ownership_ratio == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("4% is minor under the strict inequality side") {
        auto commits = commits_by_author({{"A", 4}, {"B", 96}});
        OwnershipStats stats = ownership_stats(commits);
        CHECK(stats.major_contributors == 1);
        CHECK(stats.minor_contributors == 1);
        CHECK(stats.ownership_ratio == doctest::Approx(0.5));
    }
    SUBCASE("proportions sum to one on random commit multisets") {
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<int> author_count(1, 12);
        std::uniform_int_distribution<int> commit_count(1, 40);
        for (int iter = 0; iter < 1000; ++iter) {
            std::map<std::string, int> authors;
            int n = author_count(rng);
            for (int a = 0; a < n; ++a) {
                authors["dev" + std::to_string(a)] = commit_count(rng);
            }
            auto commits = commits_by_author(authors);
            double total = static_cast<double>(commits.size());
            double sum = 0.0;
            for (const auto& [author, count] : authors) sum += static_cast<double>(count) / total;
            CHECK(std::fabs(sum - 1.0) < 1e-12);
            OwnershipStats stats = ownership_stats(commits);
            CHECK(stats.major_contributors + stats.minor_contributors ==
                  static_cast<std::int64_t>(authors.size()));
        }
    }
    SUBCASE("raising the threshold never increases the major count") {
        std::mt19937_64 rng(29);
        std::uniform_int_distribution<int> author_count(1, 10);
        std::uniform_int_distribution<int> commit_count(1, 30);
        std::uniform_real_distribution<double> threshold_pick(0.0, 0.5);
        for (int iter = 0; iter < 1000; ++iter) {
            std::map<std::string, int> authors;
            int n = author_count(rng);
            for (int a = 0; a < n; ++a) {
                authors["dev" + std::to_string(a)] = commit_count(rng);
            }
            auto commits = commits_by_author(authors);
            double t1 = threshold_pick(rng);
            double t2 = threshold_pick(rng);
            if (t1 > t2) std::swap(t1, t2);
            CHECK(ownership_stats(commits, t2).major_contributors <=
                  ownership_stats(commits, t1).major_contributors);
        }
    }
    SUBCASE("empty input is flagged") {
        OwnershipStats stats = ownership_stats({});
        CHECK(stats.total_contributors == 0);
        CHECK(stats.ratio_flagged);
        CHECK(stats.ownership_ratio == 0.0);
    }
}

TEST_CASE("practice_profile") {
    SUBCASE("workflow files with zero commits") {
        RawRepo raw;
        raw.ref = RepoRef("o", "r");
        raw.has_workflow_files = true;
        PracticeProfile profile = practice_profile(raw, {});
        CHECK(profile.uses_automation);
        CHECK(profile.total_commits == 0);
        CHECK(profile.flagged);
    }
    SUBCASE("fields agree with the two sub-operations run independently") {
        RawRepo raw;
        raw.ref = RepoRef("o", "r");
        std::vector<CommitRecord> commits;
        for (int i = 0; i < 6; ++i) {
            commits.push_back(commit("a" + std::to_string(i), "alice",
                                     i < 2 ? "refactor pass" : "feature"));
        }
        for (int i = 0; i < 4; ++i) {
            commits.push_back(commit("b" + std::to_string(i), "bob", "more features"));
        }
        PracticeProfile profile = practice_profile(raw, commits);
        RefactoringStats refs = refactoring_stats(commits);
        OwnershipStats own = ownership_stats(commits);
        CHECK(profile.refactoring_commits == refs.refactoring_commits);
        CHECK(profile.non_refactoring_commits == refs.non_refactoring_commits);
        CHECK(profile.total_commits == refs.total_commits);
        CHECK(profile.refactoring_ratio == refs.refactoring_ratio);
        CHECK(profile.major_contributors == own.major_contributors);
        CHECK(profile.minor_contributors == own.minor_contributors);
        CHECK(profile.total_contributors == own.total_contributors);
        CHECK(profile.ownership_ratio == own.ownership_ratio);
        CHECK_FALSE(profile.uses_automation);
        CHECK(profile.major_contributors + profile.minor_contributors ==
              profile.total_contributors);
        CHECK(profile.as_row().size() == PracticeProfile::feature_names().size());
    }
}

TEST_CASE("exclude_outliers") {
    auto ref = [](int i) { return RepoRef("owner" + std::to_string(i), "repo"); };
    SUBCASE("all under the threshold: identity") {
        std::vector<std::pair<RepoRef, std::int64_t>> repos = {{ref(1), 10}, {ref(2), 199999}};
        auto [kept, report] = exclude_outliers(repos);
        CHECK(kept.size() == 2);
        CHECK(report.excluded.empty());
    }
    SUBCASE("exactly 200,000 commits is retained (strictly greater excludes)") {
        std::vector<std::pair<RepoRef, std::int64_t>> repos = {{ref(1), 200000}};
        auto [kept, report] = exclude_outliers(repos);
        CHECK(kept.size() == 1);
        CHECK(report.excluded.empty());
    }
    SUBCASE("893 repositories with 4 outliers leave 889 analysed") {
        std::vector<std::pair<RepoRef, std::int64_t>> repos;
        for (int i = 0; i < 889; ++i) repos.emplace_back(ref(i), 1000 + i);
        repos.emplace_back(RepoRef("chromium", "chromium"), 1200000);
        repos.emplace_back(RepoRef("llvm", "llvm-project"), 450000);
        repos.emplace_back(RepoRef("Homebrew", "homebrew-core"), 300000);
        repos.emplace_back(RepoRef("aosp-mirror", "platform_frameworks_base"), 900000);
        auto [kept, report] = exclude_outliers(repos);
        CHECK(report.analysed == 889);
        CHECK(report.excluded.size() == 4);
        bool found_chromium = false;
        for (const auto& [r, count] : report.excluded) {
            if (r.full_name() == "chromium/chromium") found_chromium = true;
        }
        CHECK(found_chromium);
    }
}
