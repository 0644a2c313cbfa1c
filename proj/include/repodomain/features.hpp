#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "repodomain/common.hpp"
#include "repodomain/corpus.hpp"

namespace repodomain {

enum class FeatureGroup { Textual, Categorical, Numerical };
enum class FeatureSource {
    Description,
    Readme,
    Labels,
    Topics,
    Licence,
    Languages,
    Contributors,
    RootEntries,
    Releases,
    Stars,
    Forks,
    Embedding,
};

std::string group_name(FeatureGroup group);
FeatureGroup group_from_name(const std::string& name);
std::string source_name(FeatureSource source);
FeatureSource source_from_name(const std::string& name);

struct FeatureColumnMeta {
    std::string name;  // unique within a matrix
    FeatureGroup group = FeatureGroup::Textual;
    FeatureSource source = FeatureSource::Readme;

    bool operator==(const FeatureColumnMeta&) const = default;
};

// Dense row-major matrix with per-column provenance and optional labels.
struct FeatureMatrix {
    size_t n_rows = 0;
    std::vector<FeatureColumnMeta> columns;
    std::vector<double> values;  // n_rows * columns.size()
    std::optional<std::vector<DomainLabel>> labels;

    size_t n_cols() const { return columns.size(); }
    double& at(size_t r, size_t c) { return values[r * columns.size() + c]; }
    double at(size_t r, size_t c) const { return values[r * columns.size() + c]; }
    std::vector<double> row(size_t r) const;
    // Throws NonFiniteInput on NaN/inf, SchemaMismatch on shape problems.
    void check() const;
};

// Horizontal concatenation; parts need equal row counts and consistent labels.
FeatureMatrix assemble(const std::vector<FeatureMatrix>& parts);

// Raw {releases, stars, forks} counts, group=numerical.
FeatureMatrix numerical_features(const std::vector<RepoRecord>& records);

// ---------------------------------------------------------------------------
// Text vectorization
// ---------------------------------------------------------------------------

enum class TextField { Description, Readme, Labels };
enum class TextMode { Tfidf, PrecomputedEmbedding };

struct TextVectorizerConfig {
    TextMode mode = TextMode::Tfidf;
    size_t vocab_size_cap = 20000;
    size_t embedding_dim = 768;
    size_t min_doc_freq = 2;
};

// One line per record: "<owner>/<name> v0 v1 ... v{dim-1}".
class EmbeddingTable {
public:
    static EmbeddingTable load(const std::string& path);

    const std::vector<double>* find(const RepoRef& ref) const;
    size_t dim() const { return dim_; }
    size_t size() const { return rows_.size(); }

private:
    std::map<std::string, std::vector<double>> rows_;
    size_t dim_ = 0;
};

// tf * (ln((1+N)/(1+df)) + 1), rows L2-normalized. Terms below min_doc_freq
// are dropped; the vocabulary is capped by document frequency.
class TfidfVectorizer {
public:
    static TfidfVectorizer fit(const std::vector<RepoRecord>& records,
                               const std::set<TextField>& fields,
                               const TextVectorizerConfig& config);

    FeatureMatrix transform(const std::vector<RepoRecord>& records) const;

    size_t vocab_size() const { return terms_.size(); }
    double idf(const std::string& term) const;

    nlohmann::json to_json() const;
    static TfidfVectorizer from_json(const nlohmann::json& j);

private:
    std::set<TextField> fields_;
    std::vector<std::string> terms_;  // sorted; column order
    std::vector<double> idf_;
    std::vector<FeatureSource> term_source_;  // dominant origin field per term
    std::map<std::string, size_t> index_;
};

// The document fed to the vectorizer for one record.
std::string text_document(const RepoRecord& record, const std::set<TextField>& fields);

// Convenience form of the two text modes. In embedding mode rows are copied
// verbatim from the table (MissingEmbedding when a ref is absent).
FeatureMatrix vectorize_text(const std::vector<RepoRecord>& records,
                             const TextVectorizerConfig& config,
                             const std::set<TextField>& fields,
                             const EmbeddingTable* embeddings = nullptr);

// ---------------------------------------------------------------------------
// Categorical one-hot encoding
// ---------------------------------------------------------------------------

class CategoricalEncoder {
public:
    static CategoricalEncoder fit(
        const std::vector<RepoRecord>& records, const std::set<FeatureSource>& sources,
        const std::optional<std::set<std::string>>& contributor_whitelist = std::nullopt);

    FeatureMatrix transform(const std::vector<RepoRecord>& records) const;

    nlohmann::json to_json() const;
    static CategoricalEncoder from_json(const nlohmann::json& j);

private:
    // (source, sorted values); column order follows this vector
    std::vector<std::pair<FeatureSource, std::vector<std::string>>> vocabularies_;
};

FeatureMatrix encode_categorical(const std::vector<RepoRecord>& records,
                                 const std::set<FeatureSource>& sources);

// Union over labels of the k most prolific logins per label, counted by
// repository appearances; ties break lexicographically.
std::set<std::string> top_contributors(const std::vector<RepoRecord>& records, int k = 50);

// ---------------------------------------------------------------------------
// Model-based selection over categorical columns
// ---------------------------------------------------------------------------

// One-vs-rest linear classifiers with hinge loss and L2 penalty (strength
// 1/C in the per-sample convention). importance(col) = max_class |weight|;
// columns at or above the mean importance are kept.
class LinearSelector {
public:
    static LinearSelector fit(const FeatureMatrix& candidates, double c = 0.01);

    FeatureMatrix transform(const FeatureMatrix& candidates) const;

    const std::vector<size_t>& kept_columns() const { return kept_; }
    const std::vector<double>& importances() const { return importance_; }
    const std::vector<std::vector<double>>& weights() const { return weights_; }
    double regularization_c() const { return c_; }

    nlohmann::json to_json() const;
    static LinearSelector from_json(const nlohmann::json& j);

private:
    double c_ = 0.01;
    std::vector<std::vector<double>> weights_;  // K x D
    std::vector<double> importance_;
    std::vector<size_t> kept_;
    std::vector<std::string> candidate_names_;
};

FeatureMatrix select_features(const FeatureMatrix& matrix_with_labels, double c = 0.01);

// ---------------------------------------------------------------------------
// SMOTE
// ---------------------------------------------------------------------------

struct SmoteProvenance {
    size_t base_row = 0;      // index into the input matrix
    size_t neighbor_row = 0;  // same-class nearest neighbor used
};

struct SmoteResult {
    FeatureMatrix matrix;                     // originals first, synthetics appended
    std::vector<SmoteProvenance> synthetic;   // one entry per appended row
};

// Upsamples every class to the majority count. Each synthetic row is
// x + u * (nn - x) with u uniform in [0,1) and nn one of x's k nearest
// same-class neighbors. Deterministic given seed.
SmoteResult smote(const FeatureMatrix& matrix_with_labels, int k = 5, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Fitted end-to-end feature pipeline (train/serve consistent)
// ---------------------------------------------------------------------------

struct PipelineConfig {
    std::set<TextField> text_fields = {TextField::Description, TextField::Readme,
                                       TextField::Labels};
    TextVectorizerConfig text;
    std::set<FeatureSource> categorical_sources = {
        FeatureSource::Topics, FeatureSource::Licence, FeatureSource::Languages,
        FeatureSource::Contributors, FeatureSource::RootEntries};
    bool use_numerical = true;
    int top_contributors_k = 50;
    bool select_categorical = true;
    double selection_c = 0.01;
    bool smote_enabled = true;
    int smote_k = 5;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

// The five data-source configurations exercised by the ablation runner.
std::vector<std::pair<std::string, PipelineConfig>> ablation_configs(const PipelineConfig& base);

class FeaturePipeline {
public:
    FeaturePipeline() = default;

    // Fits vectorizer, encoder and selector on training records only.
    static FeaturePipeline fit(const std::vector<RepoRecord>& train_records,
                               const PipelineConfig& config,
                               const EmbeddingTable* embeddings = nullptr);

    FeatureMatrix transform(const std::vector<RepoRecord>& records,
                            const EmbeddingTable* embeddings = nullptr) const;

    const PipelineConfig& config() const { return config_; }

    nlohmann::json to_json() const;
    static FeaturePipeline from_json(const nlohmann::json& j);

private:
    PipelineConfig config_;
    std::optional<TfidfVectorizer> tfidf_;
    std::optional<CategoricalEncoder> encoder_;
    std::optional<LinearSelector> selector_;
};

}  // namespace repodomain
