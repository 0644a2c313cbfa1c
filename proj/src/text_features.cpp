#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "repodomain/features.hpp"

namespace repodomain {

// ---------------------------------------------------------------------------
// Embedding table
// ---------------------------------------------------------------------------

EmbeddingTable EmbeddingTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file '" + path + "'");
    EmbeddingTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream stream(line);
        std::string ref;
        stream >> ref;
        std::vector<double> vec;
        double v = 0.0;
        while (stream >> v) vec.push_back(v);
        if (ref.empty() || vec.empty()) {
            throw SchemaMismatchError("embedding line " + std::to_string(line_no) +
                                      " needs a ref and at least one value");
        }
        if (table.dim_ == 0) {
            table.dim_ = vec.size();
        } else if (vec.size() != table.dim_) {
            throw SchemaMismatchError("embedding line " + std::to_string(line_no) +
                                      " has width " + std::to_string(vec.size()) +
                                      ", expected " + std::to_string(table.dim_));
        }
        table.rows_[ref] = std::move(vec);
    }
    return table;
}

const std::vector<double>* EmbeddingTable::find(const RepoRef& ref) const {
    auto it = rows_.find(ref.full_name());
    return it == rows_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

namespace {

FeatureSource source_of_field(TextField field) {
    switch (field) {
        case TextField::Description: return FeatureSource::Description;
        case TextField::Readme: return FeatureSource::Readme;
        case TextField::Labels: return FeatureSource::Labels;
    }
    throw SchemaMismatchError("unknown text field");
}

std::string field_text(const RepoRecord& record, TextField field) {
    switch (field) {
        case TextField::Description: return record.description_text();
        case TextField::Readme: return record.cleaned_readme;
        case TextField::Labels: return join(record.labels, " ");
    }
    throw SchemaMismatchError("unknown text field");
}

}  // namespace

std::string text_document(const RepoRecord& record, const std::set<TextField>& fields) {
    std::vector<std::string> parts;
    for (TextField field : {TextField::Description, TextField::Readme, TextField::Labels}) {
        if (fields.count(field)) parts.push_back(field_text(record, field));
    }
    return join(parts, " ");
}

TfidfVectorizer TfidfVectorizer::fit(const std::vector<RepoRecord>& records,
                                     const std::set<TextField>& fields,
                                     const TextVectorizerConfig& config) {
    if (records.empty()) throw EmptyDatasetError("vectorize_text needs records");

    // Document frequencies across the combined stream, plus per-field
    // frequencies so each term can be tagged with its dominant origin.
    std::map<std::string, size_t> df;
    std::map<std::string, std::map<TextField, size_t>> df_by_field;
    for (const auto& record : records) {
        std::set<std::string> combined;
        for (TextField field : {TextField::Description, TextField::Readme, TextField::Labels}) {
            if (!fields.count(field)) continue;
            auto tokens = tokenize(field_text(record, field));
            std::set<std::string> unique(tokens.begin(), tokens.end());
            for (const auto& t : unique) {
                ++df_by_field[t][field];
                combined.insert(t);
            }
        }
        for (const auto& t : combined) ++df[t];
    }

    std::vector<std::pair<std::string, size_t>> kept;
    for (const auto& [term, count] : df) {
        if (count >= config.min_doc_freq) kept.emplace_back(term, count);
    }
    if (kept.empty()) {
        throw EmptyVocabularyError("no term reaches min_doc_freq " +
                                   std::to_string(config.min_doc_freq));
    }
    if (kept.size() > config.vocab_size_cap) {
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        kept.resize(config.vocab_size_cap);
    }
    std::sort(kept.begin(), kept.end());  // lexicographic column order

    TfidfVectorizer v;
    v.fields_ = fields;
    const double n = static_cast<double>(records.size());
    for (const auto& [term, count] : kept) {
        v.index_[term] = v.terms_.size();
        v.terms_.push_back(term);
        v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
        // Dominant field by per-field df; field order breaks ties.
        TextField best = *fields.begin();
        size_t best_count = 0;
        for (TextField field : {TextField::Description, TextField::Readme, TextField::Labels}) {
            if (!fields.count(field)) continue;
            auto it = df_by_field[term].find(field);
            size_t c = it == df_by_field[term].end() ? 0 : it->second;
            if (c > best_count) {
                best = field;
                best_count = c;
            }
        }
        v.term_source_.push_back(source_of_field(best));
    }
    return v;
}

FeatureMatrix TfidfVectorizer::transform(const std::vector<RepoRecord>& records) const {
    FeatureMatrix m;
    m.n_rows = records.size();
    m.columns.reserve(terms_.size());
    for (size_t i = 0; i < terms_.size(); ++i) {
        m.columns.push_back({"tfidf:" + terms_[i], FeatureGroup::Textual, term_source_[i]});
    }
    m.values.assign(m.n_rows * m.n_cols(), 0.0);
    for (size_t r = 0; r < records.size(); ++r) {
        auto tokens = tokenize(text_document(records[r], fields_));
        std::map<size_t, double> tf;
        for (const auto& token : tokens) {
            auto it = index_.find(token);
            if (it != index_.end()) tf[it->second] += 1.0;
        }
        double norm_sq = 0.0;
        for (const auto& [col, count] : tf) {
            double w = count * idf_[col];
            m.at(r, col) = w;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (const auto& [col, count] : tf) m.at(r, col) *= inv;
        }
    }
    return m;
}

double TfidfVectorizer::idf(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) throw SchemaMismatchError("term '" + term + "' not in vocabulary");
    return idf_[it->second];
}

nlohmann::json TfidfVectorizer::to_json() const {
    std::vector<std::string> fields;
    for (TextField field : {TextField::Description, TextField::Readme, TextField::Labels}) {
        if (fields_.count(field)) fields.push_back(source_name(source_of_field(field)));
    }
    std::vector<std::string> sources;
    sources.reserve(term_source_.size());
    for (FeatureSource s : term_source_) sources.push_back(source_name(s));
    return {{"fields", fields}, {"terms", terms_}, {"idf", idf_}, {"term_sources", sources}};
}

TfidfVectorizer TfidfVectorizer::from_json(const nlohmann::json& j) {
    TfidfVectorizer v;
    for (const auto& f : j.at("fields")) {
        FeatureSource s = source_from_name(f.get<std::string>());
        if (s == FeatureSource::Description) v.fields_.insert(TextField::Description);
        if (s == FeatureSource::Readme) v.fields_.insert(TextField::Readme);
        if (s == FeatureSource::Labels) v.fields_.insert(TextField::Labels);
    }
    v.terms_ = j.at("terms").get<std::vector<std::string>>();
    v.idf_ = j.at("idf").get<std::vector<double>>();
    for (const auto& s : j.at("term_sources")) {
        v.term_source_.push_back(source_from_name(s.get<std::string>()));
    }
    if (v.idf_.size() != v.terms_.size() || v.term_source_.size() != v.terms_.size()) {
        throw SchemaMismatchError("inconsistent vectorizer payload");
    }
    for (size_t i = 0; i < v.terms_.size(); ++i) v.index_[v.terms_[i]] = i;
    return v;
}

FeatureMatrix vectorize_text(const std::vector<RepoRecord>& records,
                             const TextVectorizerConfig& config,
                             const std::set<TextField>& fields,
                             const EmbeddingTable* embeddings) {
    if (config.mode == TextMode::Tfidf) {
        return TfidfVectorizer::fit(records, fields, config).transform(records);
    }
    if (!embeddings) {
        throw MissingEmbeddingError("precomputed_embedding mode needs an embedding table");
    }
    FeatureMatrix m;
    m.n_rows = records.size();
    for (size_t i = 0; i < embeddings->dim(); ++i) {
        m.columns.push_back({"emb:" + std::to_string(i), FeatureGroup::Textual,
                             FeatureSource::Embedding});
    }
    m.values.assign(m.n_rows * m.n_cols(), 0.0);
    for (size_t r = 0; r < records.size(); ++r) {
        const auto* vec = embeddings->find(records[r].ref);
        if (!vec) {
            throw MissingEmbeddingError("no embedding for '" + records[r].ref.full_name() + "'");
        }
        for (size_t c = 0; c < vec->size(); ++c) m.at(r, c) = (*vec)[c];
    }
    return m;
}

}  // namespace repodomain
