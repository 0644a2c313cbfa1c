#include "repodomain/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace repodomain {

std::string group_name(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::Textual: return "textual";
        case FeatureGroup::Categorical: return "categorical";
        case FeatureGroup::Numerical: return "numerical";
    }
    throw SchemaMismatchError("unknown feature group");
}

FeatureGroup group_from_name(const std::string& name) {
    if (name == "textual") return FeatureGroup::Textual;
    if (name == "categorical") return FeatureGroup::Categorical;
    if (name == "numerical") return FeatureGroup::Numerical;
    throw SchemaMismatchError("unknown feature group '" + name + "'");
}

std::string source_name(FeatureSource source) {
    switch (source) {
        case FeatureSource::Description: return "description";
        case FeatureSource::Readme: return "readme";
        case FeatureSource::Labels: return "labels";
        case FeatureSource::Topics: return "topics";
        case FeatureSource::Licence: return "licence";
        case FeatureSource::Languages: return "languages";
        case FeatureSource::Contributors: return "contributors";
        case FeatureSource::RootEntries: return "root_entries";
        case FeatureSource::Releases: return "releases";
        case FeatureSource::Stars: return "stars";
        case FeatureSource::Forks: return "forks";
        case FeatureSource::Embedding: return "embedding";
    }
    throw SchemaMismatchError("unknown feature source");
}

FeatureSource source_from_name(const std::string& name) {
    static const std::vector<FeatureSource> all = {
        FeatureSource::Description, FeatureSource::Readme,      FeatureSource::Labels,
        FeatureSource::Topics,      FeatureSource::Licence,     FeatureSource::Languages,
        FeatureSource::Contributors, FeatureSource::RootEntries, FeatureSource::Releases,
        FeatureSource::Stars,       FeatureSource::Forks,       FeatureSource::Embedding,
    };
    for (FeatureSource s : all) {
        if (source_name(s) == name) return s;
    }
    throw SchemaMismatchError("unknown feature source '" + name + "'");
}

std::vector<double> FeatureMatrix::row(size_t r) const {
    return std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(r * n_cols()),
                               values.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_cols()));
}

void FeatureMatrix::check() const {
    if (values.size() != n_rows * columns.size()) {
        throw SchemaMismatchError("feature matrix shape mismatch");
    }
    if (labels && labels->size() != n_rows) {
        throw SchemaMismatchError("feature matrix label count mismatch");
    }
    std::set<std::string> names;
    for (const auto& col : columns) {
        if (!names.insert(col.name).second) {
            throw SchemaMismatchError("duplicate feature column '" + col.name + "'");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteInputError("non-finite feature value");
    }
}

FeatureMatrix assemble(const std::vector<FeatureMatrix>& parts) {
    FeatureMatrix out;
    bool first = true;
    for (const auto& part : parts) {
        if (part.n_cols() == 0 && part.n_rows == 0) continue;
        if (first) {
            out.n_rows = part.n_rows;
            out.labels = part.labels;
            first = false;
        } else if (part.n_rows != out.n_rows) {
            throw SchemaMismatchError("assemble: mismatched row counts");
        } else if (part.labels && out.labels && *part.labels != *out.labels) {
            throw SchemaMismatchError("assemble: mismatched labels between parts");
        } else if (part.labels && !out.labels) {
            out.labels = part.labels;
        }
        out.columns.insert(out.columns.end(), part.columns.begin(), part.columns.end());
    }
    out.values.resize(out.n_rows * out.n_cols());
    size_t col_offset = 0;
    for (const auto& part : parts) {
        if (part.n_cols() == 0 && part.n_rows == 0) continue;
        for (size_t r = 0; r < out.n_rows; ++r) {
            for (size_t c = 0; c < part.n_cols(); ++c) {
                out.at(r, col_offset + c) = part.at(r, c);
            }
        }
        col_offset += part.n_cols();
    }
    out.check();
    return out;
}

FeatureMatrix numerical_features(const std::vector<RepoRecord>& records) {
    FeatureMatrix m;
    m.n_rows = records.size();
    m.columns = {
        {"releases", FeatureGroup::Numerical, FeatureSource::Releases},
        {"stars", FeatureGroup::Numerical, FeatureSource::Stars},
        {"forks", FeatureGroup::Numerical, FeatureSource::Forks},
    };
    m.values.resize(m.n_rows * 3);
    for (size_t r = 0; r < records.size(); ++r) {
        m.at(r, 0) = static_cast<double>(records[r].releases);
        m.at(r, 1) = static_cast<double>(records[r].stars);
        m.at(r, 2) = static_cast<double>(records[r].forks);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Categorical encoding
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> values_of_source(const RepoRecord& r, FeatureSource source) {
    switch (source) {
        case FeatureSource::Topics:
            return r.topics;
        case FeatureSource::Licence:
            return r.licence_key ? std::vector<std::string>{*r.licence_key}
                                 : std::vector<std::string>{};
        case FeatureSource::Languages: {
            std::vector<std::string> keys;
            keys.reserve(r.languages.size());
            for (const auto& [lang, bytes] : r.languages) keys.push_back(lang);
            return keys;
        }
        case FeatureSource::Contributors:
            return r.contributor_logins;
        case FeatureSource::RootEntries:
            return r.root_entries;
        default:
            throw SchemaMismatchError("source '" + source_name(source) + "' is not categorical");
    }
}

std::string categorical_column_name(FeatureSource source, const std::string& value) {
    switch (source) {
        case FeatureSource::Topics: return "topic=" + value;
        case FeatureSource::Licence: return "licence=" + value;
        case FeatureSource::Languages: return "lang=" + value;
        case FeatureSource::Contributors: return "contrib=" + value;
        case FeatureSource::RootEntries: return "root=" + value;
        default: throw SchemaMismatchError("source is not categorical");
    }
}

const std::vector<FeatureSource>& categorical_source_order() {
    static const std::vector<FeatureSource> order = {
        FeatureSource::Topics, FeatureSource::Licence, FeatureSource::Languages,
        FeatureSource::Contributors, FeatureSource::RootEntries,
    };
    return order;
}

}  // namespace

CategoricalEncoder CategoricalEncoder::fit(
    const std::vector<RepoRecord>& records, const std::set<FeatureSource>& sources,
    const std::optional<std::set<std::string>>& contributor_whitelist) {
    if (records.empty()) throw EmptyDatasetError("encode_categorical needs records");
    CategoricalEncoder encoder;
    for (FeatureSource source : categorical_source_order()) {
        if (!sources.count(source)) continue;
        std::set<std::string> distinct;
        for (const auto& r : records) {
            for (const auto& v : values_of_source(r, source)) {
                if (source == FeatureSource::Contributors && contributor_whitelist &&
                    !contributor_whitelist->count(v)) {
                    continue;
                }
                distinct.insert(v);
            }
        }
        encoder.vocabularies_.emplace_back(
            source, std::vector<std::string>(distinct.begin(), distinct.end()));
    }
    return encoder;
}

FeatureMatrix CategoricalEncoder::transform(const std::vector<RepoRecord>& records) const {
    FeatureMatrix m;
    m.n_rows = records.size();
    std::map<std::string, size_t> index;
    for (const auto& [source, values] : vocabularies_) {
        for (const auto& v : values) {
            index[categorical_column_name(source, v)] = m.columns.size();
            m.columns.push_back(
                {categorical_column_name(source, v), FeatureGroup::Categorical, source});
        }
    }
    m.values.assign(m.n_rows * m.n_cols(), 0.0);
    for (size_t r = 0; r < records.size(); ++r) {
        for (const auto& [source, values] : vocabularies_) {
            for (const auto& v : values_of_source(records[r], source)) {
                auto it = index.find(categorical_column_name(source, v));
                if (it != index.end()) m.at(r, it->second) = 1.0;
            }
        }
    }
    return m;
}

nlohmann::json CategoricalEncoder::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [source, values] : vocabularies_) {
        j.push_back({{"source", source_name(source)}, {"values", values}});
    }
    return j;
}

CategoricalEncoder CategoricalEncoder::from_json(const nlohmann::json& j) {
    CategoricalEncoder encoder;
    for (const auto& entry : j) {
        encoder.vocabularies_.emplace_back(source_from_name(entry.at("source").get<std::string>()),
                                           entry.at("values").get<std::vector<std::string>>());
    }
    return encoder;
}

FeatureMatrix encode_categorical(const std::vector<RepoRecord>& records,
                                 const std::set<FeatureSource>& sources) {
    return CategoricalEncoder::fit(records, sources).transform(records);
}

std::set<std::string> top_contributors(const std::vector<RepoRecord>& records, int k) {
    if (k <= 0) throw Error("InvalidArgument", "top_contributors needs k > 0");
    std::map<DomainLabel, std::map<std::string, std::int64_t>> appearances;
    for (const auto& r : records) {
        if (!r.label) continue;
        std::set<std::string> unique(r.contributor_logins.begin(), r.contributor_logins.end());
        for (const auto& login : unique) ++appearances[*r.label][login];
    }
    std::set<std::string> result;
    for (const auto& [label, counts] : appearances) {
        std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (size_t i = 0; i < ranked.size() && i < static_cast<size_t>(k); ++i) {
            result.insert(ranked[i].first);
        }
    }
    return result;
}

}  // namespace repodomain
