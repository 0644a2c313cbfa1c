#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <unistd.h>

#include "repodomain/corpus.hpp"
#include "test_helpers.hpp"

using namespace repodomain;
using namespace repodomain::testing;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
    static int counter = 0;
    return (fs::temp_directory_path() /
            ("repodomain_corpus_" + std::to_string(getpid()) + "_" +
             std::to_string(counter++) + "_" + name))
        .string();
}

}  // namespace

TEST_CASE("clean_text strips markup and collapses whitespace") {
    CHECK(clean_text("") == "");
    CHECK(clean_text("# Title\n\n<b>hi</b>   there") == "Title hi there");
    CHECK(clean_text("[docs](http://x.y) **now**") == "docs now");
    CHECK(clean_text("![logo](img.png) start") == "logo start");
    CHECK(clean_text("<script>alert('x')</script>keep") == "keep");
    CHECK(clean_text("<style>.a{}</style>plain") == "plain");
    CHECK(clean_text("<!-- hidden -->shown") == "shown");
    CHECK(clean_text("```python\nprint(1)\n```") == "python print(1)");
    CHECK(clean_text("a\t\t b\n\n\nc") == "a b c");
}

TEST_CASE("clean_text is idempotent on adversarial markup") {
    const std::vector<std::string> tokens = {
        "<b>",  "</b>", "<",  ">",  "[",    "]",     "(",    ")",  "#",     "*",
        "_",    "`",    "!",  " ",  "\n",   "\t",    "word", "x",  "1",     "<i>",
        "<!--", "-->",  "](", "![", "http", "</h1>", "**",   "```", "<script>", "</script>",
    };
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<size_t> pick(0, tokens.size() - 1);
    std::uniform_int_distribution<int> len(0, 30);
    for (int iter = 0; iter < 500; ++iter) {
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i) s += tokens[pick(rng)];
        std::string once = clean_text(s);
        CHECK(clean_text(once) == once);
        // no consecutive whitespace and no surviving markup characters
        CHECK(once.find("  ") == std::string::npos);
        for (char c : {'#', '*', '`', '_', '[', ']', '<', '>'}) {
            CAPTURE(s);
            CHECK(once.find(c) == std::string::npos);
        }
    }
}

TEST_CASE("clean_text keeps text of non-script tags and drops tags themselves") {
    std::string cleaned = clean_text("<h1>Heading</h1><p>body text</p>");
    CHECK(cleaned == "Heading body text");
    CHECK(cleaned.find('<') == std::string::npos);
}

TEST_CASE("mark_deprecated matches the lexicon case-insensitively") {
    RepoRecord r = make_record("o", "r");
    r.cleaned_readme = "This repository is no longer maintained";
    CHECK(mark_deprecated(r).status == RepoStatus::Deprecated);

    RepoRecord active = make_record("o", "r2");
    active.cleaned_readme = "Fast JSON parser";
    CHECK(mark_deprecated(active).status == RepoStatus::Active);

    RepoRecord by_description = make_record("o", "r3");
    by_description.cleaned_readme = "some text";
    by_description.description = "DEPRECATED - use v2";
    CHECK(mark_deprecated(by_description).status == RepoStatus::Deprecated);

    // custom lexicon
    RepoRecord custom = make_record("o", "r4");
    custom.cleaned_readme = "sunset project";
    CHECK(mark_deprecated(custom, {"sunset"}).status == RepoStatus::Deprecated);
    // status other than active is preserved when nothing matches
    RepoRecord gone = make_record("o", "r5");
    gone.status = RepoStatus::Gone;
    gone.cleaned_readme = "x";
    CHECK(mark_deprecated(gone).status == RepoStatus::Gone);
}

TEST_CASE("merge_labels merges application and system software") {
    SUBCASE("Table 3 counts merge to 607") {
        Dataset dataset = borges_distribution();
        Dataset merged = merge_labels(dataset);
        CHECK(merged.scheme == LabelScheme::Merged5);
        CHECK(merged.size() == dataset.size());
        std::int64_t merged_count = 0;
        for (const auto& r : merged.records) {
            if (r.label == DomainLabel::ApplicationAndSystemSoftware) ++merged_count;
        }
        CHECK(merged_count == 607);  // 428 + 179
    }
    SUBCASE("datasets without the merged classes are fixed points") {
        Dataset dataset = make_counted_dataset({{DomainLabel::Documentation, 3},
                                                {DomainLabel::SoftwareTools, 2}});
        Dataset merged = merge_labels(dataset);
        for (size_t i = 0; i < dataset.records.size(); ++i) {
            CHECK(merged.records[i].label == dataset.records[i].label);
        }
    }
    SUBCASE("six singleton classes become five") {
        Dataset dataset = make_counted_dataset({{DomainLabel::ApplicationSoftware, 1},
                                                {DomainLabel::SystemSoftware, 1},
                                                {DomainLabel::WebLibsFrameworks, 1},
                                                {DomainLabel::NonWebLibsFrameworks, 1},
                                                {DomainLabel::SoftwareTools, 1},
                                                {DomainLabel::Documentation, 1}});
        Dataset merged = merge_labels(dataset);
        std::set<DomainLabel> distinct;
        std::int64_t merged_size = 0;
        for (const auto& r : merged.records) {
            distinct.insert(*r.label);
            if (*r.label == DomainLabel::ApplicationAndSystemSoftware) ++merged_size;
        }
        CHECK(distinct.size() == 5);
        CHECK(merged_size == 2);
    }
    SUBCASE("non-label fields survive untouched") {
        Dataset dataset = make_counted_dataset({{DomainLabel::ApplicationSoftware, 2}});
        dataset.records[0].stars = 42;
        dataset.records[0].topics = {"parser"};
        Dataset merged = merge_labels(dataset);
        CHECK(merged.records[0].stars == 42);
        CHECK(merged.records[0].topics == std::vector<std::string>{"parser"});
    }
    SUBCASE("merged input is rejected") {
        Dataset dataset = make_counted_dataset(
            {{DomainLabel::ApplicationAndSystemSoftware, 1}, {DomainLabel::Documentation, 1}},
            LabelScheme::Merged5);
        CHECK_THROWS_AS(merge_labels(dataset), SchemaMismatchError);
    }
}

TEST_CASE("stratified_split proportions and determinism") {
    SUBCASE("50/50 over two classes at f=0.1") {
        Dataset dataset = make_counted_dataset(
            {{DomainLabel::Documentation, 50}, {DomainLabel::SoftwareTools, 50}});
        auto [train, test] = stratified_split(dataset, 0.1, 3);
        CHECK(test.size() == 10);
        CHECK(train.size() == 90);
        std::int64_t doc = 0;
        for (const auto& r : test.records) {
            if (*r.label == DomainLabel::Documentation) ++doc;
        }
        CHECK(doc == 5);
    }
    SUBCASE("Table 3 proportions at f=0.1 give a 495-record test set") {
        Dataset dataset = borges_distribution();
        auto [train, test] = stratified_split(dataset, 0.1, 11);
        CHECK(test.size() == 495);
        CHECK(train.size() + test.size() == dataset.size());
    }
    SUBCASE("fixed seed reproduces the split") {
        Dataset dataset = synthetic_corpus({12, 9, 7, 5, 4}, 1);
        auto [train_a, test_a] = stratified_split(dataset, 0.25, 99);
        auto [train_b, test_b] = stratified_split(dataset, 0.25, 99);
        CHECK(train_a.records == train_b.records);
        CHECK(test_a.records == test_b.records);
        auto [train_c, test_c] = stratified_split(dataset, 0.25, 100);
        bool different = test_a.records != test_c.records;
        CHECK(different);  // overwhelmingly likely under a different seed
    }
    SUBCASE("train and test are disjoint and cover the dataset") {
        Dataset dataset = synthetic_corpus({10, 8, 6, 4, 3}, 2);
        auto [train, test] = stratified_split(dataset, 0.3, 5);
        std::set<std::string> seen;
        for (const auto& r : train.records) seen.insert(r.ref.full_name());
        for (const auto& r : test.records) CHECK(!seen.count(r.ref.full_name()));
        CHECK(train.size() + test.size() == dataset.size());
    }
    SUBCASE("per-class train frequency stays within 1/|train| of the full dataset") {
        Dataset dataset = synthetic_corpus({40, 25, 15, 10, 10}, 3);
        auto [train, test] = stratified_split(dataset, 0.2, 7);
        for (DomainLabel label : labels_of_scheme(dataset.scheme)) {
            auto count = [&](const Dataset& d) {
                std::int64_t c = 0;
                for (const auto& r : d.records) {
                    if (*r.label == label) ++c;
                }
                return static_cast<double>(c);
            };
            double full_freq = count(dataset) / static_cast<double>(dataset.size());
            double train_freq = count(train) / static_cast<double>(train.size());
            CHECK(std::fabs(full_freq - train_freq) <=
                  1.0 / static_cast<double>(train.size()) + 1e-12);
        }
    }
    SUBCASE("empty dataset is rejected") {
        CHECK_THROWS_AS(stratified_split(Dataset{}, 0.1, 0), EmptyDatasetError);
    }
}

TEST_CASE("dataset_stats reproduces the missing-value percentages") {
    SUBCASE("topics and licence missing rates match the published table") {
        Dataset dataset = borges_distribution();
        // 2,335 records with topics, 4,301 with a licence
        for (size_t i = 0; i < dataset.records.size(); ++i) {
            if (i < 2335) dataset.records[i].topics = {"t"};
            if (i < 4301) dataset.records[i].licence_key = "mit";
        }
        DatasetStats stats = dataset_stats(dataset);
        auto find_feature = [&](const std::string& name) {
            for (const auto& fm : stats.features) {
                if (fm.feature == name) return fm;
            }
            FAIL(("feature not found: " + name));
            return FeatureMissing{};
        };
        auto topics = find_feature("Topics");
        CHECK(topics.present == 2335);
        CHECK(topics.missing == 2613);
        CHECK(std::round(topics.missing_percent * 10.0) / 10.0 == doctest::Approx(52.8));
        auto licence = find_feature("Licence");
        CHECK(licence.present == 4301);
        CHECK(std::round(licence.missing_percent * 10.0) / 10.0 == doctest::Approx(13.1));
    }
    SUBCASE("fully populated records have no missing values") {
        Dataset dataset = synthetic_corpus({4, 3, 3, 2, 2}, 5);
        for (auto& r : dataset.records) {
            r.licence_key = "mit";
            r.description = "d";
        }
        DatasetStats stats = dataset_stats(dataset);
        for (const auto& fm : stats.features) {
            CAPTURE(fm.feature);
            CHECK(fm.missing == 0);
            CHECK(fm.missing_percent == 0.0);
        }
    }
    SUBCASE("label percents sum to 100 and recompute from counts") {
        Dataset dataset = borges_distribution();
        DatasetStats stats = dataset_stats(dataset);
        double sum = 0.0;
        for (const auto& ls : stats.labels) {
            sum += ls.percent;
            CHECK(ls.percent ==
                  doctest::Approx(100.0 * static_cast<double>(ls.count) /
                                  static_cast<double>(dataset.size())));
        }
        CHECK(sum == doctest::Approx(100.0).epsilon(0.001));
    }
    SUBCASE("present plus missing equals dataset size") {
        Dataset dataset = synthetic_corpus({5, 4, 3, 2, 2}, 6);
        DatasetStats stats = dataset_stats(dataset);
        for (const auto& fm : stats.features) {
            CHECK(fm.present + fm.missing == stats.total);
        }
    }
}

TEST_CASE("dataset save/load round-trip") {
    SUBCASE("empty dataset") {
        std::string path = tmp_path("empty.jsonl");
        save_dataset(Dataset{}, path);
        Dataset loaded = load_dataset(path);
        CHECK(loaded.records.empty());
        fs::remove(path);
    }
    SUBCASE("records round-trip with absence preserved") {
        Dataset dataset;
        RepoRecord a = make_record("octo", "parser", DomainLabel::SoftwareTools);
        a.cleaned_readme = "fast parser";
        a.description = std::nullopt;  // absent, must stay absent
        a.topics = {"parsing", "cpp"};
        a.languages = {{"C++", 12345}};
        a.licence_key = "apache-2.0";
        a.stars = 7;
        RepoRecord b = make_record("octo", "docs", DomainLabel::Documentation);
        b.description = "";  // present but empty: distinct from absent
        RepoRecord c = make_record("octo", "gone");
        c.status = RepoStatus::Gone;
        dataset.records = {a, b, c};

        std::string path = tmp_path("roundtrip.jsonl");
        save_dataset(dataset, path);
        Dataset loaded = load_dataset(path);
        REQUIRE(loaded.records.size() == 3);
        CHECK(loaded.records == dataset.records);
        CHECK(!loaded.records[0].description.has_value());
        CHECK(loaded.records[1].description == "");
        fs::remove(path);
    }
    SUBCASE("bumped schema version is rejected") {
        std::string path = tmp_path("bumped.jsonl");
        {
            std::ofstream out(path);
            out << R"({"schema_version":2,"scheme":"raw6","ref":"a/b"})" << "\n";
        }
        CHECK_THROWS_AS(load_dataset(path), SchemaMismatchError);
        fs::remove(path);
    }
    SUBCASE("unknown fields are rejected with a versioned error") {
        Dataset dataset;
        dataset.records = {make_record("a", "b", DomainLabel::Documentation)};
        std::string path = tmp_path("unknown.jsonl");
        save_dataset(dataset, path);
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        in.close();
        line.insert(line.size() - 1, R"(,"surprise":1)");
        {
            std::ofstream out(path);
            out << line << "\n";
        }
        try {
            load_dataset(path);
            FAIL("expected SchemaMismatch");
        } catch (const SchemaMismatchError& e) {
            CHECK(std::string(e.what()).find("surprise") != std::string::npos);
            CHECK(std::string(e.what()).find("schema_version 1") != std::string::npos);
        }
        fs::remove(path);
    }
    SUBCASE("mixed schemes are rejected") {
        std::string path = tmp_path("mixed.jsonl");
        Dataset raw;
        raw.records = {make_record("a", "b", DomainLabel::Documentation)};
        save_dataset(raw, path);
        Dataset merged{LabelScheme::Merged5,
                       {make_record("c", "d", DomainLabel::ApplicationAndSystemSoftware)}};
        std::ofstream out(path, std::ios::app);
        std::string merged_path = tmp_path("merged_tmp.jsonl");
        save_dataset(merged, merged_path);
        std::ifstream in(merged_path);
        std::string line;
        std::getline(in, line);
        out << line << "\n";
        out.close();
        CHECK_THROWS_AS(load_dataset(path), SchemaMismatchError);
        fs::remove(path);
        fs::remove(merged_path);
    }
}

TEST_CASE("label identifiers round-trip") {
    for (LabelScheme scheme : {LabelScheme::Raw6, LabelScheme::Merged5}) {
        for (DomainLabel label : labels_of_scheme(scheme)) {
            CHECK(label_from_id(label_id(label)) == label);
            CHECK(!label_display(label).empty());
        }
    }
    CHECK_THROWS_AS(label_from_id("nope"), SchemaMismatchError);
}
