#include "repodomain/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace repodomain {

using nlohmann::json;

namespace {

const std::vector<DomainLabel> kRaw6 = {
    DomainLabel::ApplicationSoftware,   DomainLabel::SystemSoftware,
    DomainLabel::WebLibsFrameworks,     DomainLabel::NonWebLibsFrameworks,
    DomainLabel::SoftwareTools,         DomainLabel::Documentation,
};

const std::vector<DomainLabel> kMerged5 = {
    DomainLabel::ApplicationAndSystemSoftware, DomainLabel::WebLibsFrameworks,
    DomainLabel::NonWebLibsFrameworks,         DomainLabel::SoftwareTools,
    DomainLabel::Documentation,
};

}  // namespace

const std::vector<DomainLabel>& labels_of_scheme(LabelScheme scheme) {
    return scheme == LabelScheme::Raw6 ? kRaw6 : kMerged5;
}

LabelScheme scheme_of(DomainLabel label) {
    switch (label) {
        case DomainLabel::ApplicationSoftware:
        case DomainLabel::SystemSoftware:
            return LabelScheme::Raw6;
        case DomainLabel::ApplicationAndSystemSoftware:
            return LabelScheme::Merged5;
        default:
            // Shared by both schemes; callers only ask this for the exclusives,
            // Raw6 is the conventional answer otherwise.
            return LabelScheme::Raw6;
    }
}

std::string label_id(DomainLabel label) {
    switch (label) {
        case DomainLabel::ApplicationSoftware: return "application_software";
        case DomainLabel::SystemSoftware: return "system_software";
        case DomainLabel::WebLibsFrameworks: return "web_libs_frameworks";
        case DomainLabel::NonWebLibsFrameworks: return "non_web_libs_frameworks";
        case DomainLabel::SoftwareTools: return "software_tools";
        case DomainLabel::Documentation: return "documentation";
        case DomainLabel::ApplicationAndSystemSoftware: return "application_and_system_software";
    }
    throw SchemaMismatchError("unknown label value");
}

std::string label_display(DomainLabel label) {
    switch (label) {
        case DomainLabel::ApplicationSoftware: return "Application Software";
        case DomainLabel::SystemSoftware: return "System Software";
        case DomainLabel::WebLibsFrameworks: return "Web Libs & Frameworks";
        case DomainLabel::NonWebLibsFrameworks: return "Non-Web Libs & Frameworks";
        case DomainLabel::SoftwareTools: return "Software Tools";
        case DomainLabel::Documentation: return "Documentation";
        case DomainLabel::ApplicationAndSystemSoftware: return "Application & System Software";
    }
    throw SchemaMismatchError("unknown label value");
}

DomainLabel label_from_id(const std::string& id) {
    for (DomainLabel l : kRaw6) {
        if (label_id(l) == id) return l;
    }
    if (id == "application_and_system_software") return DomainLabel::ApplicationAndSystemSoftware;
    throw SchemaMismatchError("unknown domain label '" + id + "'");
}

std::string status_id(RepoStatus status) {
    switch (status) {
        case RepoStatus::Active: return "active";
        case RepoStatus::Gone: return "gone";
        case RepoStatus::Deprecated: return "deprecated";
    }
    throw SchemaMismatchError("unknown status value");
}

RepoStatus status_from_id(const std::string& id) {
    if (id == "active") return RepoStatus::Active;
    if (id == "gone") return RepoStatus::Gone;
    if (id == "deprecated") return RepoStatus::Deprecated;
    throw SchemaMismatchError("unknown status '" + id + "'");
}

void Dataset::validate() const {
    const auto& allowed = labels_of_scheme(scheme);
    for (const auto& r : records) {
        if (r.label &&
            std::find(allowed.begin(), allowed.end(), *r.label) == allowed.end()) {
            throw SchemaMismatchError("label '" + label_id(*r.label) +
                                      "' does not belong to the dataset's scheme");
        }
    }
}

// ---------------------------------------------------------------------------
// clean_text
// ---------------------------------------------------------------------------

namespace {

bool ci_starts_with(const std::string& s, size_t pos, const char* lit) {
    for (size_t i = 0; lit[i]; ++i) {
        if (pos + i >= s.size()) return false;
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != lit[i]) return false;
    }
    return true;
}

size_t ci_find(const std::string& s, size_t pos, const char* lit) {
    for (size_t i = pos; i < s.size(); ++i) {
        if (ci_starts_with(s, i, lit)) return i;
    }
    return std::string::npos;
}

// Structural pass: drops comments, script/style elements and tags (their text
// content survives) and rewrites [text](url) / ![alt](url) to the text part.
std::string strip_markup(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        char c = s[i];
        if (c == '<') {
            if (ci_starts_with(s, i, "<!--")) {
                size_t end = s.find("-->", i + 4);
                i = (end == std::string::npos) ? n : end + 3;
                continue;
            }
            if (ci_starts_with(s, i, "<script")) {
                size_t close = ci_find(s, i + 7, "</script");
                if (close == std::string::npos) { i = n; continue; }
                size_t gt = s.find('>', close);
                i = (gt == std::string::npos) ? n : gt + 1;
                continue;
            }
            if (ci_starts_with(s, i, "<style")) {
                size_t close = ci_find(s, i + 6, "</style");
                if (close == std::string::npos) { i = n; continue; }
                size_t gt = s.find('>', close);
                i = (gt == std::string::npos) ? n : gt + 1;
                continue;
            }
            size_t gt = s.find('>', i + 1);
            if (gt != std::string::npos) {
                out.push_back(' ');  // tag boundaries separate words
                i = gt + 1;
                continue;
            }
            out.push_back(c);
            ++i;
            continue;
        }
        bool image_bang = (c == '!' && i + 1 < n && s[i + 1] == '[');
        if (c == '[' || image_bang) {
            size_t open = image_bang ? i + 1 : i;
            size_t close = s.find(']', open + 1);
            if (close != std::string::npos && close + 1 < n && s[close + 1] == '(') {
                size_t paren = s.find(')', close + 2);
                if (paren != std::string::npos) {
                    // Inner text may itself contain markup.
                    out += strip_markup(s.substr(open + 1, close - open - 1));
                    i = paren + 1;
                    continue;
                }
            }
            out.push_back(c);
            ++i;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

// Heading/emphasis/code-fence characters, residual link brackets, and stray
// angle brackets (so no tag pattern can re-form from leftovers).
bool is_markup_residue_char(char c) {
    return c == '#' || c == '*' || c == '_' || c == '`' || c == '[' || c == ']' || c == '<' ||
           c == '>';
}

}  // namespace

std::string clean_text(const std::string& raw_markup) {
    std::string structural = strip_markup(raw_markup);
    std::string filtered;
    filtered.reserve(structural.size());
    for (char c : structural) {
        if (!is_markup_residue_char(c)) filtered.push_back(c);
    }
    return collapse_whitespace(filtered);
}

RepoRecord mark_deprecated(RepoRecord record, const std::vector<std::string>& lexicon) {
    std::string haystack = to_lower(record.cleaned_readme + " " + record.description_text());
    for (const auto& phrase : lexicon) {
        if (!phrase.empty() && haystack.find(to_lower(phrase)) != std::string::npos) {
            record.status = RepoStatus::Deprecated;
            return record;
        }
    }
    return record;
}

Dataset merge_labels(Dataset dataset) {
    if (dataset.scheme != LabelScheme::Raw6) {
        throw SchemaMismatchError("merge_labels expects the 6-class raw scheme");
    }
    for (auto& r : dataset.records) {
        if (r.label && (*r.label == DomainLabel::ApplicationSoftware ||
                        *r.label == DomainLabel::SystemSoftware)) {
            r.label = DomainLabel::ApplicationAndSystemSoftware;
        }
    }
    dataset.scheme = LabelScheme::Merged5;
    return dataset;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
    if (dataset.records.empty()) throw EmptyDatasetError("cannot split an empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error("InvalidArgument", "test_fraction must lie in (0, 1)");
    }

    std::map<DomainLabel, std::vector<size_t>> by_label;
    for (size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& r = dataset.records[i];
        if (!r.label) {
            throw SchemaMismatchError("stratified_split requires every record to be labelled");
        }
        by_label[*r.label].push_back(i);
    }

    std::mt19937_64 rng(seed);
    std::vector<bool> in_test(dataset.records.size(), false);
    for (DomainLabel label : labels_of_scheme(dataset.scheme)) {
        auto it = by_label.find(label);
        if (it == by_label.end()) continue;
        auto& idx = it->second;
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n = static_cast<std::int64_t>(idx.size());
        auto k = std::llround(static_cast<double>(n) * test_fraction);
        if (k == 0 && n >= 2) k = 1;
        if (k >= n) k = n - 1;  // keep at least one training record per label
        for (std::int64_t j = 0; j < k; ++j) in_test[idx[static_cast<size_t>(j)]] = true;
    }

    Dataset train{dataset.scheme, {}};
    Dataset test{dataset.scheme, {}};
    for (size_t i = 0; i < dataset.records.size(); ++i) {
        (in_test[i] ? test : train).records.push_back(dataset.records[i]);
    }
    return {std::move(train), std::move(test)};
}

DatasetStats dataset_stats(const Dataset& dataset) {
    DatasetStats stats;
    stats.total = static_cast<std::int64_t>(dataset.records.size());

    auto add_feature = [&](const std::string& name, auto missing_pred) {
        FeatureMissing fm;
        fm.feature = name;
        for (const auto& r : dataset.records) {
            if (missing_pred(r)) ++fm.missing; else ++fm.present;
        }
        fm.missing_percent =
            stats.total == 0 ? 0.0 : 100.0 * static_cast<double>(fm.missing) /
                                         static_cast<double>(stats.total);
        stats.features.push_back(std::move(fm));
    };

    add_feature("Description", [](const RepoRecord& r) { return !r.description.has_value(); });
    add_feature("README File", [](const RepoRecord& r) { return r.cleaned_readme.empty(); });
    add_feature("Topics", [](const RepoRecord& r) { return r.topics.empty(); });
    add_feature("Licence", [](const RepoRecord& r) { return !r.licence_key.has_value(); });
    add_feature("Programming Languages", [](const RepoRecord& r) { return r.languages.empty(); });
    add_feature("Labels", [](const RepoRecord& r) { return r.labels.empty(); });
    add_feature("Contributors", [](const RepoRecord& r) { return r.contributor_logins.empty(); });
    add_feature("Sub-folders/files", [](const RepoRecord& r) { return r.root_entries.empty(); });
    add_feature("Releases", [](const RepoRecord&) { return false; });
    add_feature("Stars", [](const RepoRecord&) { return false; });
    add_feature("Forks", [](const RepoRecord&) { return false; });

    std::int64_t labelled = 0;
    for (const auto& r : dataset.records) {
        if (r.label) ++labelled;
    }
    for (DomainLabel label : labels_of_scheme(dataset.scheme)) {
        LabelSummary ls;
        ls.label = label;
        double langs = 0, topics = 0, roots = 0, contribs = 0;
        for (const auto& r : dataset.records) {
            if (!r.label || *r.label != label) continue;
            ++ls.count;
            langs += static_cast<double>(r.languages.size());
            topics += static_cast<double>(r.topics.size());
            roots += static_cast<double>(r.root_entries.size());
            contribs += static_cast<double>(r.contributor_logins.size());
        }
        if (ls.count > 0) {
            auto c = static_cast<double>(ls.count);
            ls.percent = labelled == 0 ? 0.0 : 100.0 * c / static_cast<double>(labelled);
            ls.avg_languages = langs / c;
            ls.avg_topics = topics / c;
            ls.avg_root_entries = roots / c;
            ls.avg_contributors = contribs / c;
        }
        stats.labels.push_back(ls);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// JSONL persistence (schema_version 1)
// ---------------------------------------------------------------------------

namespace {

constexpr int kDatasetSchemaVersion = 1;

json record_to_json(const RepoRecord& r, LabelScheme scheme) {
    json j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["scheme"] = scheme == LabelScheme::Raw6 ? "raw6" : "merged5";
    j["ref"] = r.ref.full_name();
    if (r.label) j["label"] = label_id(*r.label);
    j["cleaned_readme"] = r.cleaned_readme;
    if (r.description) j["description"] = *r.description;
    j["topics"] = r.topics;
    j["labels"] = r.labels;
    j["root_entries"] = r.root_entries;
    j["contributor_logins"] = r.contributor_logins;
    j["languages"] = r.languages;
    if (r.licence_key) j["licence_key"] = *r.licence_key;
    j["releases"] = r.releases;
    j["stars"] = r.stars;
    j["forks"] = r.forks;
    j["has_workflow_files"] = r.has_workflow_files;
    j["status"] = status_id(r.status);
    return j;
}

const std::vector<std::string>& known_record_fields() {
    static const std::vector<std::string> fields = {
        "schema_version", "scheme",    "ref",          "label",
        "cleaned_readme", "description", "topics",     "labels",
        "root_entries",   "contributor_logins", "languages", "licence_key",
        "releases",       "stars",     "forks",        "has_workflow_files",
        "status",
    };
    return fields;
}

RepoRecord record_from_json(const json& j, LabelScheme& scheme_out, bool& scheme_seen) {
    if (!j.is_object()) throw SchemaMismatchError("dataset line is not a JSON object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw SchemaMismatchError("dataset line lacks schema_version");
    }
    int version = j["schema_version"].get<int>();
    if (version != kDatasetSchemaVersion) {
        throw SchemaMismatchError("unsupported dataset schema_version " +
                                  std::to_string(version) + " (expected " +
                                  std::to_string(kDatasetSchemaVersion) + ")");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& known = known_record_fields();
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw SchemaMismatchError("unknown field '" + it.key() +
                                      "' for dataset schema_version " +
                                      std::to_string(kDatasetSchemaVersion));
        }
    }

    std::string scheme_str = j.at("scheme").get<std::string>();
    LabelScheme scheme =
        scheme_str == "raw6" ? LabelScheme::Raw6
        : scheme_str == "merged5"
            ? LabelScheme::Merged5
            : throw SchemaMismatchError("unknown scheme '" + scheme_str + "'");
    if (scheme_seen && scheme != scheme_out) {
        throw SchemaMismatchError("dataset mixes label schemes");
    }
    scheme_out = scheme;
    scheme_seen = true;

    RepoRecord r;
    r.ref = RepoRef::parse(j.at("ref").get<std::string>());
    if (j.contains("label")) r.label = label_from_id(j["label"].get<std::string>());
    r.cleaned_readme = j.at("cleaned_readme").get<std::string>();
    if (j.contains("description")) r.description = j["description"].get<std::string>();
    r.topics = j.at("topics").get<std::vector<std::string>>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.root_entries = j.at("root_entries").get<std::vector<std::string>>();
    r.contributor_logins = j.at("contributor_logins").get<std::vector<std::string>>();
    r.languages = j.at("languages").get<std::map<std::string, std::int64_t>>();
    if (j.contains("licence_key")) r.licence_key = j["licence_key"].get<std::string>();
    r.releases = j.at("releases").get<std::int64_t>();
    r.stars = j.at("stars").get<std::int64_t>();
    r.forks = j.at("forks").get<std::int64_t>();
    r.has_workflow_files = j.at("has_workflow_files").get<bool>();
    r.status = status_from_id(j.at("status").get<std::string>());
    return r;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& r : dataset.records) {
        out << record_to_json(r, dataset.scheme).dump() << "\n";
    }
    if (!out) throw IoError("failed writing dataset to '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    Dataset dataset;
    bool scheme_seen = false;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaMismatchError("dataset line " + std::to_string(line_no) +
                                      " is not valid JSON: " + e.what());
        }
        try {
            dataset.records.push_back(record_from_json(j, dataset.scheme, scheme_seen));
        } catch (const json::exception& e) {
            throw SchemaMismatchError("dataset line " + std::to_string(line_no) + ": " +
                                      e.what());
        }
    }
    dataset.validate();
    return dataset;
}

}  // namespace repodomain
