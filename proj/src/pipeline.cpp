#include <algorithm>

#include "repodomain/features.hpp"

namespace repodomain {

namespace {

std::string text_field_name(TextField field) {
    switch (field) {
        case TextField::Description: return "description";
        case TextField::Readme: return "readme";
        case TextField::Labels: return "labels";
    }
    throw SchemaMismatchError("unknown text field");
}

TextField text_field_from_name(const std::string& name) {
    if (name == "description") return TextField::Description;
    if (name == "readme") return TextField::Readme;
    if (name == "labels") return TextField::Labels;
    throw SchemaMismatchError("unknown text field '" + name + "'");
}

std::vector<DomainLabel> record_labels_or_throw(const std::vector<RepoRecord>& records) {
    std::vector<DomainLabel> labels;
    labels.reserve(records.size());
    for (const auto& r : records) {
        if (!r.label) return {};
        labels.push_back(*r.label);
    }
    return labels;
}

}  // namespace

nlohmann::json PipelineConfig::to_json() const {
    std::vector<std::string> fields;
    for (TextField f : text_fields) fields.push_back(text_field_name(f));
    std::vector<std::string> cats;
    for (FeatureSource s : categorical_sources) cats.push_back(source_name(s));
    return {
        {"text_fields", fields},
        {"text_mode", text.mode == TextMode::Tfidf ? "tfidf" : "precomputed_embedding"},
        {"vocab_size_cap", text.vocab_size_cap},
        {"embedding_dim", text.embedding_dim},
        {"min_doc_freq", text.min_doc_freq},
        {"categorical_sources", cats},
        {"use_numerical", use_numerical},
        {"top_contributors_k", top_contributors_k},
        {"select_categorical", select_categorical},
        {"selection_c", selection_c},
        {"smote_enabled", smote_enabled},
        {"smote_k", smote_k},
    };
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.text_fields.clear();
    for (const auto& f : j.at("text_fields")) {
        cfg.text_fields.insert(text_field_from_name(f.get<std::string>()));
    }
    std::string mode = j.at("text_mode").get<std::string>();
    if (mode == "tfidf") {
        cfg.text.mode = TextMode::Tfidf;
    } else if (mode == "precomputed_embedding") {
        cfg.text.mode = TextMode::PrecomputedEmbedding;
    } else {
        throw SchemaMismatchError("unknown text mode '" + mode + "'");
    }
    cfg.text.vocab_size_cap = j.at("vocab_size_cap").get<size_t>();
    cfg.text.embedding_dim = j.at("embedding_dim").get<size_t>();
    cfg.text.min_doc_freq = j.at("min_doc_freq").get<size_t>();
    cfg.categorical_sources.clear();
    for (const auto& s : j.at("categorical_sources")) {
        cfg.categorical_sources.insert(source_from_name(s.get<std::string>()));
    }
    cfg.use_numerical = j.at("use_numerical").get<bool>();
    cfg.top_contributors_k = j.at("top_contributors_k").get<int>();
    cfg.select_categorical = j.at("select_categorical").get<bool>();
    cfg.selection_c = j.at("selection_c").get<double>();
    cfg.smote_enabled = j.at("smote_enabled").get<bool>();
    cfg.smote_k = j.at("smote_k").get<int>();
    return cfg;
}

std::vector<std::pair<std::string, PipelineConfig>> ablation_configs(const PipelineConfig& base) {
    auto textual = [&](std::set<TextField> fields) {
        PipelineConfig cfg = base;
        cfg.text_fields = std::move(fields);
        cfg.categorical_sources.clear();
        cfg.use_numerical = false;
        return cfg;
    };
    PipelineConfig text_cat = base;
    text_cat.text_fields = {TextField::Description, TextField::Readme, TextField::Labels};
    text_cat.use_numerical = false;
    PipelineConfig full = base;
    full.text_fields = {TextField::Description, TextField::Readme, TextField::Labels};
    full.use_numerical = true;
    return {
        {"Description only", textual({TextField::Description})},
        {"README only", textual({TextField::Readme})},
        {"Textual data only",
         textual({TextField::Description, TextField::Readme, TextField::Labels})},
        {"Textual and categorical data", text_cat},
        {"Textual, categorical and numerical data", full},
    };
}

FeaturePipeline FeaturePipeline::fit(const std::vector<RepoRecord>& train_records,
                                     const PipelineConfig& config,
                                     const EmbeddingTable* embeddings) {
    if (train_records.empty()) throw EmptyDatasetError("pipeline fit needs records");
    FeaturePipeline p;
    p.config_ = config;

    if (!config.text_fields.empty() && config.text.mode == TextMode::Tfidf) {
        p.tfidf_ = TfidfVectorizer::fit(train_records, config.text_fields, config.text);
    } else if (!config.text_fields.empty()) {
        if (!embeddings) {
            throw MissingEmbeddingError("precomputed_embedding mode needs an embedding table");
        }
        for (const auto& r : train_records) {
            if (!embeddings->find(r.ref)) {
                throw MissingEmbeddingError("no embedding for '" + r.ref.full_name() + "'");
            }
        }
    }

    if (!config.categorical_sources.empty()) {
        std::optional<std::set<std::string>> whitelist;
        if (config.categorical_sources.count(FeatureSource::Contributors)) {
            whitelist = top_contributors(train_records, config.top_contributors_k);
        }
        p.encoder_ = CategoricalEncoder::fit(train_records, config.categorical_sources, whitelist);

        if (config.select_categorical) {
            FeatureMatrix cat = p.encoder_->transform(train_records);
            auto labels = record_labels_or_throw(train_records);
            if (!labels.empty() && cat.n_cols() > 0) {
                cat.labels = labels;
                p.selector_ = LinearSelector::fit(cat, config.selection_c);
            }
        }
    }
    return p;
}

FeatureMatrix FeaturePipeline::transform(const std::vector<RepoRecord>& records,
                                         const EmbeddingTable* embeddings) const {
    std::vector<FeatureMatrix> parts;

    if (!config_.text_fields.empty()) {
        if (config_.text.mode == TextMode::Tfidf) {
            if (!tfidf_) throw SchemaMismatchError("pipeline has no fitted vectorizer");
            parts.push_back(tfidf_->transform(records));
        } else {
            parts.push_back(vectorize_text(records, config_.text, config_.text_fields, embeddings));
        }
    }
    if (encoder_) {
        FeatureMatrix cat = encoder_->transform(records);
        if (selector_) cat = selector_->transform(cat);
        parts.push_back(std::move(cat));
    }
    if (config_.use_numerical) {
        parts.push_back(numerical_features(records));
    }
    if (parts.empty()) throw SchemaMismatchError("pipeline produces no features");

    FeatureMatrix out = assemble(parts);
    auto labels = record_labels_or_throw(records);
    if (!labels.empty()) out.labels = std::move(labels);
    out.check();
    return out;
}

nlohmann::json FeaturePipeline::to_json() const {
    nlohmann::json j;
    j["config"] = config_.to_json();
    if (tfidf_) j["tfidf"] = tfidf_->to_json();
    if (encoder_) j["encoder"] = encoder_->to_json();
    if (selector_) j["selector"] = selector_->to_json();
    return j;
}

FeaturePipeline FeaturePipeline::from_json(const nlohmann::json& j) {
    FeaturePipeline p;
    p.config_ = PipelineConfig::from_json(j.at("config"));
    if (j.contains("tfidf")) p.tfidf_ = TfidfVectorizer::from_json(j["tfidf"]);
    if (j.contains("encoder")) p.encoder_ = CategoricalEncoder::from_json(j["encoder"]);
    if (j.contains("selector")) p.selector_ = LinearSelector::from_json(j["selector"]);
    return p;
}

}  // namespace repodomain
