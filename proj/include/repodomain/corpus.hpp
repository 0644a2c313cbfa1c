#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repodomain/common.hpp"

namespace repodomain {

// The six raw application domains, plus the merged class that replaces
// ApplicationSoftware and SystemSoftware in the five-class scheme.
enum class DomainLabel {
    ApplicationSoftware,
    SystemSoftware,
    WebLibsFrameworks,
    NonWebLibsFrameworks,
    SoftwareTools,
    Documentation,
    ApplicationAndSystemSoftware,
};

enum class LabelScheme { Raw6, Merged5 };

const std::vector<DomainLabel>& labels_of_scheme(LabelScheme scheme);
LabelScheme scheme_of(DomainLabel label);
std::string label_id(DomainLabel label);        // stable snake_case id for files
std::string label_display(DomainLabel label);   // human-readable table name
DomainLabel label_from_id(const std::string& id);

enum class RepoStatus { Active, Gone, Deprecated };

std::string status_id(RepoStatus status);
RepoStatus status_from_id(const std::string& id);

// One repository, cleaned and ready for feature extraction.
struct RepoRecord {
    RepoRef ref;
    std::optional<DomainLabel> label;
    std::string cleaned_readme;
    std::optional<std::string> description;  // stored absence-preserving
    std::vector<std::string> topics;
    std::vector<std::string> labels;  // issue labels
    std::vector<std::string> root_entries;
    std::vector<std::string> contributor_logins;
    std::map<std::string, std::int64_t> languages;
    std::optional<std::string> licence_key;
    std::int64_t releases = 0;
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    bool has_workflow_files = false;
    RepoStatus status = RepoStatus::Active;

    // Description with absence mapped to "" for feature extraction.
    std::string description_text() const { return description.value_or(""); }

    bool operator==(const RepoRecord&) const = default;
};

struct Dataset {
    LabelScheme scheme = LabelScheme::Raw6;
    std::vector<RepoRecord> records;

    size_t size() const { return records.size(); }
    // Throws SchemaMismatch when a label falls outside the declared scheme.
    void validate() const;
};

struct FeatureMissing {
    std::string feature;
    std::int64_t present = 0;
    std::int64_t missing = 0;
    double missing_percent = 0.0;
};

struct LabelSummary {
    DomainLabel label;
    std::int64_t count = 0;
    double percent = 0.0;
    double avg_languages = 0.0;
    double avg_topics = 0.0;
    double avg_root_entries = 0.0;
    double avg_contributors = 0.0;
};

struct DatasetStats {
    std::int64_t total = 0;
    std::vector<FeatureMissing> features;
    std::vector<LabelSummary> labels;
};

// Strips HTML and Markdown markup and collapses whitespace. Total and
// idempotent: clean_text(clean_text(x)) == clean_text(x).
std::string clean_text(const std::string& raw_markup);

inline const std::vector<std::string>& default_deprecation_lexicon() {
    static const std::vector<std::string> phrases = {
        "no longer maintained",
        "deprecated",
        "has been removed",
        "repository is archived",
    };
    return phrases;
}

// Flags records whose cleaned readme or description carries a deprecation
// phrase (case-insensitive substring). Status is otherwise left untouched.
RepoRecord mark_deprecated(RepoRecord record,
                           const std::vector<std::string>& lexicon = default_deprecation_lexicon());

// Raw6 -> Merged5: ApplicationSoftware and SystemSoftware become the merged
// class, everything else is unchanged. Dataset size is preserved.
Dataset merge_labels(Dataset dataset);

// Deterministic stratified split; per-label test share is round(n * f),
// kept at least 1 and at most n-1 whenever the label allows it.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

DatasetStats dataset_stats(const Dataset& dataset);

// JSONL, one record per line, every line carries schema_version.
// Unknown fields or a bumped version are rejected with SchemaMismatch.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace repodomain
