#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <unistd.h>

#include "repodomain/features.hpp"
#include "test_helpers.hpp"

using namespace repodomain;
using namespace repodomain::testing;
namespace fs = std::filesystem;

namespace {

RepoRecord text_record(int serial, const std::string& readme,
                       std::optional<DomainLabel> label = std::nullopt) {
    RepoRecord r = make_record("o" + std::to_string(serial), "r" + std::to_string(serial), label);
    r.cleaned_readme = readme;
    return r;
}

std::string tmp_file(const std::string& name) {
    static int counter = 0;
    return (fs::temp_directory_path() /
            ("repodomain_feat_" + std::to_string(getpid()) + "_" + std::to_string(counter++) +
             "_" + name))
        .string();
}

}  // namespace

TEST_CASE("tfidf vectorization") {
    TextVectorizerConfig config;
    config.min_doc_freq = 1;

    SUBCASE("identical documents get identical rows") {
        std::vector<RepoRecord> records = {text_record(0, "alpha beta gamma"),
                                           text_record(1, "alpha beta gamma"),
                                           text_record(2, "delta")};
        FeatureMatrix m = vectorize_text(records, config, {TextField::Readme});
        REQUIRE(m.n_rows == 3);
        for (size_t c = 0; c < m.n_cols(); ++c) {
            CHECK(m.at(0, c) == m.at(1, c));
        }
    }
    SUBCASE("idf decreases with document frequency") {
        std::vector<RepoRecord> records = {text_record(0, "a b"), text_record(1, "a")};
        TfidfVectorizer v = TfidfVectorizer::fit(records, {TextField::Readme}, config);
        CHECK(v.vocab_size() == 2);
        CHECK(v.idf("a") < v.idf("b"));
    }
    SUBCASE("rows are L2-normalized, empty documents stay zero") {
        std::vector<RepoRecord> records = {text_record(0, "x y z y"), text_record(1, ""),
                                           text_record(2, "x")};
        FeatureMatrix m = vectorize_text(records, config, {TextField::Readme});
        for (size_t r = 0; r < m.n_rows; ++r) {
            double norm_sq = 0.0;
            for (size_t c = 0; c < m.n_cols(); ++c) norm_sq += m.at(r, c) * m.at(r, c);
            if (r == 1) {
                CHECK(norm_sq == 0.0);
            } else {
                CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
    SUBCASE("min_doc_freq drops rare terms") {
        TextVectorizerConfig strict;
        strict.min_doc_freq = 2;
        std::vector<RepoRecord> records = {text_record(0, "common rare1"),
                                           text_record(1, "common rare2")};
        TfidfVectorizer v = TfidfVectorizer::fit(records, {TextField::Readme}, strict);
        CHECK(v.vocab_size() == 1);
    }
    SUBCASE("vocab cap keeps the most frequent terms") {
        TextVectorizerConfig capped;
        capped.min_doc_freq = 1;
        capped.vocab_size_cap = 2;
        std::vector<RepoRecord> records = {text_record(0, "a b c"), text_record(1, "a b"),
                                           text_record(2, "a")};
        TfidfVectorizer v = TfidfVectorizer::fit(records, {TextField::Readme}, capped);
        CHECK(v.vocab_size() == 2);
        CHECK_NOTHROW(v.idf("a"));
        CHECK_NOTHROW(v.idf("b"));
        CHECK_THROWS_AS(v.idf("c"), SchemaMismatchError);
    }
    SUBCASE("empty vocabulary is an error") {
        std::vector<RepoRecord> records = {text_record(0, ""), text_record(1, "")};
        CHECK_THROWS_AS(vectorize_text(records, config, {TextField::Readme}),
                        EmptyVocabularyError);
    }
    SUBCASE("single-field vectorization tags that field as the source") {
        std::vector<RepoRecord> records;
        RepoRecord r = text_record(0, "readme words");
        r.description = "descriptive text";
        records.push_back(r);
        records.push_back(r);
        FeatureMatrix m = vectorize_text(records, config, {TextField::Description});
        CHECK(m.n_cols() == 2);  // "descriptive", "text"
        for (const auto& col : m.columns) {
            CHECK(col.source == FeatureSource::Description);
            CHECK(col.group == FeatureGroup::Textual);
        }
    }
}

TEST_CASE("precomputed embeddings") {
    std::string path = tmp_file("emb.txt");
    {
        std::ofstream out(path);
        out << "o0/r0";
        for (int i = 0; i < 768; ++i) out << " " << (0.001 * i);
        out << "\n";
        out << "o1/r1";
        for (int i = 0; i < 768; ++i) out << " " << (0.002 * i);
        out << "\n";
    }
    EmbeddingTable table = EmbeddingTable::load(path);
    CHECK(table.dim() == 768);

    TextVectorizerConfig config;
    config.mode = TextMode::PrecomputedEmbedding;

    SUBCASE("matrix width equals the embedding dimension") {
        std::vector<RepoRecord> records = {text_record(0, "x"), text_record(1, "y")};
        FeatureMatrix m = vectorize_text(records, config, {TextField::Readme}, &table);
        CHECK(m.n_cols() == 768);
        CHECK(m.at(0, 10) == doctest::Approx(0.01));
        CHECK(m.at(1, 10) == doctest::Approx(0.02));
        for (const auto& col : m.columns) CHECK(col.source == FeatureSource::Embedding);
    }
    SUBCASE("missing refs raise MissingEmbedding") {
        std::vector<RepoRecord> records = {text_record(7, "unknown repo")};
        CHECK_THROWS_AS(vectorize_text(records, config, {TextField::Readme}, &table),
                        MissingEmbeddingError);
    }
    SUBCASE("ragged embedding files are rejected") {
        std::string bad = tmp_file("bad.txt");
        {
            std::ofstream out(bad);
            out << "a/b 1 2 3\n";
            out << "c/d 1 2\n";
        }
        CHECK_THROWS_AS(EmbeddingTable::load(bad), SchemaMismatchError);
        fs::remove(bad);
    }
    fs::remove(path);
}

TEST_CASE("categorical one-hot encoding") {
    SUBCASE("licence present vs absent") {
        RepoRecord with = make_record("a", "x");
        with.licence_key = "mit";
        RepoRecord without = make_record("b", "y");
        FeatureMatrix m = encode_categorical({with, without}, {FeatureSource::Licence});
        REQUIRE(m.n_cols() == 1);
        CHECK(m.columns[0].name == "licence=mit");
        CHECK(m.at(0, 0) == 1.0);
        CHECK(m.at(1, 0) == 0.0);
    }
    SUBCASE("topic vocabulary of 3 gives 3 columns") {
        RepoRecord a = make_record("a", "x");
        a.topics = {"web", "css"};
        RepoRecord b = make_record("b", "y");
        b.topics = {"parser"};
        FeatureMatrix m = encode_categorical({a, b}, {FeatureSource::Topics});
        CHECK(m.n_cols() == 3);
    }
    SUBCASE("languages use presence, not byte counts") {
        RepoRecord a = make_record("a", "x");
        a.languages = {{"JavaScript", 999999}, {"CSS", 1}};
        RepoRecord b = make_record("b", "y");
        b.languages = {{"Rust", 5}};
        FeatureMatrix m = encode_categorical({a, b}, {FeatureSource::Languages});
        REQUIRE(m.n_cols() == 3);
        int ones_in_row0 = 0;
        for (size_t c = 0; c < 3; ++c) {
            CHECK((m.at(0, c) == 0.0 || m.at(0, c) == 1.0));
            if (m.at(0, c) == 1.0) ++ones_in_row0;
        }
        CHECK(ones_in_row0 == 2);
    }
    SUBCASE("per-source row sums equal the in-vocabulary value count") {
        Dataset dataset = synthetic_corpus({8, 6, 5, 4, 3}, 41);
        auto sources = std::set<FeatureSource>{FeatureSource::Topics, FeatureSource::Licence,
                                               FeatureSource::Languages,
                                               FeatureSource::RootEntries};
        CategoricalEncoder encoder = CategoricalEncoder::fit(dataset.records, sources);
        FeatureMatrix m = encoder.transform(dataset.records);
        for (size_t r = 0; r < m.n_rows; ++r) {
            std::map<FeatureSource, double> row_sum;
            for (size_t c = 0; c < m.n_cols(); ++c) {
                CHECK((m.at(r, c) == 0.0 || m.at(r, c) == 1.0));
                row_sum[m.columns[c].source] += m.at(r, c);
            }
            const auto& rec = dataset.records[r];
            CHECK(row_sum[FeatureSource::Topics] ==
                  doctest::Approx(static_cast<double>(rec.topics.size())));
            CHECK(row_sum[FeatureSource::Licence] ==
                  doctest::Approx(rec.licence_key ? 1.0 : 0.0));
            CHECK(row_sum[FeatureSource::Languages] ==
                  doctest::Approx(static_cast<double>(rec.languages.size())));
        }
    }
    SUBCASE("values unseen at fit time produce zero rows") {
        RepoRecord a = make_record("a", "x");
        a.topics = {"web"};
        CategoricalEncoder encoder = CategoricalEncoder::fit({a}, {FeatureSource::Topics});
        RepoRecord unseen = make_record("b", "y");
        unseen.topics = {"new-topic"};
        FeatureMatrix m = encoder.transform({unseen});
        CHECK(m.at(0, 0) == 0.0);
    }
}

TEST_CASE("top_contributors") {
    auto with_contribs = [](int serial, DomainLabel label, std::vector<std::string> logins) {
        RepoRecord r = make_record("o" + std::to_string(serial), "r" + std::to_string(serial),
                                   label);
        r.contributor_logins = std::move(logins);
        return r;
    };
    SUBCASE("k=1 takes the top login of each label") {
        std::vector<RepoRecord> records = {
            with_contribs(0, DomainLabel::Documentation, {"x", "z"}),
            with_contribs(1, DomainLabel::Documentation, {"x"}),
            with_contribs(2, DomainLabel::SoftwareTools, {"y", "z"}),
            with_contribs(3, DomainLabel::SoftwareTools, {"y"}),
        };
        CHECK(top_contributors(records, 1) == std::set<std::string>{"x", "y"});
    }
    SUBCASE("k larger than distinct logins keeps everyone") {
        std::vector<RepoRecord> records = {
            with_contribs(0, DomainLabel::Documentation, {"a", "b"}),
        };
        CHECK(top_contributors(records, 50) == std::set<std::string>{"a", "b"});
    }
    SUBCASE("5 labels bound the union by 5k") {
        std::vector<RepoRecord> records;
        int serial = 0;
        for (DomainLabel label : labels_of_scheme(LabelScheme::Merged5)) {
            for (int i = 0; i < 60; ++i) {
                records.push_back(with_contribs(serial++, label,
                                                {label_id(label) + std::to_string(i)}));
            }
        }
        auto logins = top_contributors(records, 50);
        CHECK(logins.size() <= 250);
        CHECK(logins.size() == 250);  // all distinct here, so exactly 5 * 50
    }
    SUBCASE("ties break lexicographically") {
        std::vector<RepoRecord> records = {
            with_contribs(0, DomainLabel::Documentation, {"zeta", "alpha"}),
        };
        CHECK(top_contributors(records, 1) == std::set<std::string>{"alpha"});
    }
}

namespace {

FeatureMatrix categorical_toy(const std::vector<std::vector<double>>& rows,
                              const std::vector<DomainLabel>& labels) {
    FeatureMatrix m;
    m.n_rows = rows.size();
    for (size_t c = 0; c < rows.front().size(); ++c) {
        m.columns.push_back({"cat" + std::to_string(c), FeatureGroup::Categorical,
                             FeatureSource::Topics});
    }
    for (const auto& row : rows) {
        for (double v : row) m.values.push_back(v);
    }
    m.labels = labels;
    return m;
}

}  // namespace

TEST_CASE("select_features") {
    const DomainLabel doc = DomainLabel::Documentation;
    const DomainLabel tools = DomainLabel::SoftwareTools;

    SUBCASE("an all-zero column is dropped when informative columns exist") {
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 20; ++i) {
            bool positive = i % 2 == 0;
            rows.push_back({positive ? 1.0 : 0.0, 0.0, positive ? 0.0 : 1.0});
            labels.push_back(positive ? doc : tools);
        }
        LinearSelector sel = LinearSelector::fit(categorical_toy(rows, labels));
        CHECK(sel.importances()[1] == 0.0);
        auto kept = sel.kept_columns();
        CHECK(std::find(kept.begin(), kept.end(), 1) == kept.end());
    }
    SUBCASE("a perfectly indicating column beats the mean importance") {
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<int> coin(0, 1);
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 40; ++i) {
            bool positive = i % 2 == 0;
            // column 0 indicates the class exactly, columns 1..3 are noise
            rows.push_back({positive ? 1.0 : 0.0, static_cast<double>(coin(rng)),
                            static_cast<double>(coin(rng)), static_cast<double>(coin(rng))});
            labels.push_back(positive ? doc : tools);
        }
        LinearSelector sel = LinearSelector::fit(categorical_toy(rows, labels));
        // brute-force check straight from the learned weights
        const auto& weights = sel.weights();
        std::vector<double> importances(4, 0.0);
        for (const auto& w : weights) {
            for (size_t j = 0; j < 4; ++j) {
                importances[j] = std::max(importances[j], std::fabs(w[j]));
            }
        }
        double mean = (importances[0] + importances[1] + importances[2] + importances[3]) / 4.0;
        CHECK(importances[0] > mean);
        auto kept = sel.kept_columns();
        CHECK(std::find(kept.begin(), kept.end(), 0) != kept.end());
    }
    SUBCASE("uniform importances keep every column") {
        // all columns identical: symmetric updates give equal importances
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 16; ++i) {
            double v = i % 2 == 0 ? 1.0 : 0.0;
            rows.push_back({v, v, v});
            labels.push_back(i % 2 == 0 ? doc : tools);
        }
        LinearSelector sel = LinearSelector::fit(categorical_toy(rows, labels));
        CHECK(sel.kept_columns().size() == 3);
    }
    SUBCASE("single-class input is degenerate") {
        std::vector<std::vector<double>> rows = {{1.0}, {0.0}};
        CHECK_THROWS_AS(LinearSelector::fit(categorical_toy(rows, {doc, doc})),
                        DegenerateLabelsError);
    }
    SUBCASE("transform is a pure column projection") {
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> coin(0, 1);
        for (int i = 0; i < 30; ++i) {
            rows.push_back({static_cast<double>(i % 2), static_cast<double>(coin(rng)),
                            static_cast<double>(coin(rng))});
            labels.push_back(i % 2 == 0 ? doc : tools);
        }
        FeatureMatrix m = categorical_toy(rows, labels);
        LinearSelector sel = LinearSelector::fit(m);
        FeatureMatrix projected = sel.transform(m);
        for (size_t r = 0; r < projected.n_rows; ++r) {
            for (size_t jj = 0; jj < sel.kept_columns().size(); ++jj) {
                CHECK(projected.at(r, jj) == m.at(r, sel.kept_columns()[jj]));
            }
        }
    }
}

TEST_CASE("assemble") {
    Dataset dataset = synthetic_corpus({4, 3, 3, 2, 2}, 51);
    TextVectorizerConfig config;
    config.min_doc_freq = 1;
    FeatureMatrix text = vectorize_text(dataset.records, config, {TextField::Readme});
    FeatureMatrix cat = encode_categorical(dataset.records, {FeatureSource::Licence});
    FeatureMatrix num = numerical_features(dataset.records);

    SUBCASE("column counts add up") {
        FeatureMatrix all = assemble({text, cat, num});
        CHECK(all.n_cols() == text.n_cols() + cat.n_cols() + num.n_cols());
        CHECK(all.n_rows == dataset.records.size());
    }
    SUBCASE("values and group tags are preserved") {
        FeatureMatrix all = assemble({text, cat, num});
        for (size_t r = 0; r < all.n_rows; ++r) {
            for (size_t c = 0; c < text.n_cols(); ++c) {
                CHECK(all.at(r, c) == text.at(r, c));
            }
            for (size_t c = 0; c < num.n_cols(); ++c) {
                CHECK(all.at(r, text.n_cols() + cat.n_cols() + c) == num.at(r, c));
            }
        }
        for (size_t c = 0; c < all.n_cols(); ++c) {
            FeatureGroup expected = c < text.n_cols() ? FeatureGroup::Textual
                                    : c < text.n_cols() + cat.n_cols() ? FeatureGroup::Categorical
                                                                       : FeatureGroup::Numerical;
            CHECK(all.columns[c].group == expected);
        }
    }
    SUBCASE("numerical columns carry the raw counts") {
        FeatureMatrix all = assemble({text, num});
        size_t releases_col = text.n_cols();
        CHECK(all.columns[releases_col].name == "releases");
        for (size_t r = 0; r < all.n_rows; ++r) {
            CHECK(all.at(r, releases_col) == static_cast<double>(dataset.records[r].releases));
        }
    }
    SUBCASE("mismatched row counts are rejected") {
        FeatureMatrix short_num = numerical_features(
            std::vector<RepoRecord>(dataset.records.begin(), dataset.records.end() - 1));
        CHECK_THROWS_AS(assemble({text, short_num}), SchemaMismatchError);
    }
}

TEST_CASE("smote") {
    auto matrix_of = [](const std::vector<std::vector<double>>& rows,
                        const std::vector<DomainLabel>& labels) {
        FeatureMatrix m;
        m.n_rows = rows.size();
        for (size_t c = 0; c < rows.front().size(); ++c) {
            m.columns.push_back({"f" + std::to_string(c), FeatureGroup::Numerical,
                                 FeatureSource::Stars});
        }
        for (const auto& row : rows) {
            for (double v : row) m.values.push_back(v);
        }
        m.labels = labels;
        return m;
    };
    const DomainLabel doc = DomainLabel::Documentation;
    const DomainLabel tools = DomainLabel::SoftwareTools;

    SUBCASE("classes {10, 3} both end at 10") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 10; ++i) {
            rows.push_back({unit(rng), unit(rng)});
            labels.push_back(doc);
        }
        for (int i = 0; i < 3; ++i) {
            rows.push_back({unit(rng) + 5.0, unit(rng) + 5.0});
            labels.push_back(tools);
        }
        SmoteResult result = smote(matrix_of(rows, labels), 5, 1);
        std::map<DomainLabel, int> counts;
        for (DomainLabel l : *result.matrix.labels) ++counts[l];
        CHECK(counts[doc] == 10);
        CHECK(counts[tools] == 10);
        CHECK(result.synthetic.size() == 7);
    }
    SUBCASE("majority class of 1,370 balances every class to 1,370") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 1370; ++i) {
            rows.push_back({unit(rng), unit(rng), unit(rng)});
            labels.push_back(doc);
        }
        for (int i = 0; i < 411; ++i) {
            rows.push_back({unit(rng), unit(rng), unit(rng)});
            labels.push_back(tools);
        }
        SmoteResult result = smote(matrix_of(rows, labels), 5, 2);
        std::map<DomainLabel, int> counts;
        for (DomainLabel l : *result.matrix.labels) ++counts[l];
        CHECK(counts[doc] == 1370);
        CHECK(counts[tools] == 1370);
    }
    SUBCASE("synthetic rows sit on the segment between their generating pair") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 25; ++i) {
            rows.push_back({unit(rng), unit(rng), unit(rng), unit(rng)});
            labels.push_back(doc);
        }
        for (int i = 0; i < 9; ++i) {
            rows.push_back({unit(rng), unit(rng), unit(rng), unit(rng)});
            labels.push_back(tools);
        }
        FeatureMatrix input = matrix_of(rows, labels);
        const int k = 5;
        SmoteResult result = smote(input, k, 11);
        const size_t n_orig = input.n_rows;
        REQUIRE(result.matrix.n_rows == n_orig + result.synthetic.size());

        for (size_t s = 0; s < result.synthetic.size(); ++s) {
            const auto& prov = result.synthetic[s];
            const size_t row = n_orig + s;
            // same class throughout
            CHECK((*result.matrix.labels)[row] == (*input.labels)[prov.base_row]);
            CHECK((*input.labels)[prov.base_row] == (*input.labels)[prov.neighbor_row]);
            // coordinate-wise segment membership
            for (size_t c = 0; c < input.n_cols(); ++c) {
                double lo = std::min(input.at(prov.base_row, c), input.at(prov.neighbor_row, c));
                double hi = std::max(input.at(prov.base_row, c), input.at(prov.neighbor_row, c));
                CHECK(result.matrix.at(row, c) >= lo - 1e-12);
                CHECK(result.matrix.at(row, c) <= hi + 1e-12);
            }
            // brute force: the neighbor really is one of the k nearest same-class rows
            std::vector<std::pair<double, size_t>> dists;
            for (size_t other = 0; other < n_orig; ++other) {
                if (other == prov.base_row ||
                    (*input.labels)[other] != (*input.labels)[prov.base_row]) {
                    continue;
                }
                double d = 0.0;
                for (size_t c = 0; c < input.n_cols(); ++c) {
                    double delta = input.at(prov.base_row, c) - input.at(other, c);
                    d += delta * delta;
                }
                dists.emplace_back(d, other);
            }
            std::sort(dists.begin(), dists.end());
            bool in_knn = false;
            for (size_t i = 0; i < dists.size() && i < k; ++i) {
                if (dists[i].second == prov.neighbor_row) in_knn = true;
            }
            CHECK(in_knn);
        }
    }
    SUBCASE("original rows appear verbatim and the result is seed-deterministic") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::vector<double>> rows;
        std::vector<DomainLabel> labels;
        for (int i = 0; i < 12; ++i) {
            rows.push_back({unit(rng), unit(rng)});
            labels.push_back(i < 8 ? doc : tools);
        }
        FeatureMatrix input = matrix_of(rows, labels);
        SmoteResult a = smote(input, 3, 99);
        SmoteResult b = smote(input, 3, 99);
        CHECK(a.matrix.values == b.matrix.values);
        CHECK(*a.matrix.labels == *b.matrix.labels);
        for (size_t r = 0; r < input.n_rows; ++r) {
            for (size_t c = 0; c < input.n_cols(); ++c) {
                CHECK(a.matrix.at(r, c) == input.at(r, c));
            }
        }
        SmoteResult c = smote(input, 3, 100);
        CHECK(a.matrix.values != c.matrix.values);
    }
    SUBCASE("a singleton minority class cannot be synthesized") {
        FeatureMatrix m = matrix_of({{0.0}, {1.0}, {2.0}}, {doc, doc, tools});
        CHECK_THROWS_AS(smote(m, 5, 0), TooFewSamplesError);
    }
}

TEST_CASE("pipeline fit/transform consistency and serialization") {
    Dataset dataset = synthetic_corpus({10, 8, 7, 6, 5}, 61);
    PipelineConfig config;
    config.text.min_doc_freq = 1;
    config.smote_enabled = false;
    FeaturePipeline pipeline = FeaturePipeline::fit(dataset.records, config);
    FeatureMatrix m1 = pipeline.transform(dataset.records);
    CHECK(m1.labels.has_value());
    CHECK(m1.n_rows == dataset.records.size());

    // new records use the fitted vocabularies, never refit
    Dataset other = synthetic_corpus({3, 2, 2, 2, 2}, 62);
    FeatureMatrix m2 = pipeline.transform(other.records);
    CHECK(m2.n_cols() == m1.n_cols());

    nlohmann::json j = pipeline.to_json();
    FeaturePipeline restored = FeaturePipeline::from_json(j);
    FeatureMatrix m3 = restored.transform(dataset.records);
    CHECK(m3.values == m1.values);
    REQUIRE(m3.columns.size() == m1.columns.size());
    for (size_t c = 0; c < m3.columns.size(); ++c) {
        CHECK(m3.columns[c].name == m1.columns[c].name);
    }
}

TEST_CASE("ablation configs cover the five data-source rows") {
    auto configs = ablation_configs(PipelineConfig{});
    REQUIRE(configs.size() == 5);
    CHECK(configs[0].first == "Description only");
    CHECK(configs[0].second.text_fields == std::set<TextField>{TextField::Description});
    CHECK(configs[0].second.categorical_sources.empty());
    CHECK_FALSE(configs[0].second.use_numerical);
    CHECK(configs[1].second.text_fields == std::set<TextField>{TextField::Readme});
    CHECK(configs[2].second.text_fields.size() == 3);
    CHECK_FALSE(configs[3].second.categorical_sources.empty());
    CHECK_FALSE(configs[3].second.use_numerical);
    CHECK(configs[4].second.use_numerical);
}
