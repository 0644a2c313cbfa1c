// repodomain: classify GitHub repositories by application domain and compare
// software-engineering practices across domains.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "repodomain/bundle.hpp"
#include "repodomain/corpus.hpp"
#include "repodomain/eval.hpp"
#include "repodomain/features.hpp"
#include "repodomain/gbdt.hpp"
#include "repodomain/ingest.hpp"
#include "repodomain/manifest.hpp"
#include "repodomain/practices.hpp"
#include "repodomain/reports.hpp"
#include "repodomain/search.hpp"
#include "repodomain/stats.hpp"

namespace fs = std::filesystem;
using namespace repodomain;

namespace {

struct GlobalFlags {
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string cache_dir;
    std::string api_base = "https://api.github.com";
    bool offline = false;
    bool refresh = false;
    int jobs = 1;
};

std::string join_argv(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += " ";
        cmd += argv[i];
    }
    return cmd;
}

std::vector<RepoRef> read_repo_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open repo list '" + path + "'");
    std::vector<RepoRef> refs;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        refs.push_back(RepoRef::parse(line));
    }
    return refs;
}

std::map<std::string, DomainLabel> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file '" + path + "'");
    std::map<std::string, DomainLabel> labels;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw SchemaMismatchError("labels file line needs 'owner/name,label': " + line);
        }
        labels[trim(line.substr(0, comma))] = label_from_id(trim(line.substr(comma + 1)));
    }
    return labels;
}

double parse_budget_seconds(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && (t.back() == 's' || t.back() == 'S')) t.pop_back();
    try {
        return std::stod(t);
    } catch (...) {
        throw Error("InvalidArgument", "cannot parse budget '" + text + "' (e.g. 1000s)");
    }
}

ClientOptions client_options(const GlobalFlags& flags) {
    ClientOptions opts;
    opts.base_url = flags.api_base;
    if (!flags.cache_dir.empty()) opts.cache_dir = flags.cache_dir;
    opts.offline = flags.offline;
    opts.refresh_cache = flags.refresh;
    opts.max_concurrent = flags.jobs;
    opts.wait_on_rate_limit = true;
    return opts;
}

RepoRecord record_from_raw(const RawRepo& raw) {
    RepoRecord r;
    r.ref = raw.ref;
    r.cleaned_readme = clean_text(raw.readme.value_or(""));
    r.description = raw.description;
    r.topics = raw.topics;
    r.labels = raw.labels;
    r.root_entries = raw.root_entries;
    for (const auto& [login, commits] : raw.contributors) r.contributor_logins.push_back(login);
    r.languages = raw.languages;
    r.licence_key = raw.licence_key;
    r.releases = raw.releases;
    r.stars = raw.stars;
    r.forks = raw.forks;
    r.has_workflow_files = raw.has_workflow_files;
    return mark_deprecated(std::move(r));
}

// Worker pool over a repo list; `work` must be thread-safe. Failures are
// collected, not thrown.
void parallel_over_repos(const std::vector<RepoRef>& refs, int jobs,
                         const std::function<void(const RepoRef&)>& work,
                         std::vector<std::string>& failures) {
    std::atomic<size_t> next{0};
    std::mutex failure_mutex;
    auto runner = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= refs.size()) return;
            try {
                work(refs[i]);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failures.push_back(refs[i].full_name() + ": [" + e.code() + "] " + e.what());
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failures.push_back(refs[i].full_name() + ": " + e.what());
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(refs.size())));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(runner);
    for (auto& t : threads) t.join();
}

std::optional<EmbeddingTable> load_embeddings_if(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return EmbeddingTable::load(path);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_fetch(const GlobalFlags& flags, const std::vector<std::string>& repo_args,
              const std::string& repos_file, const std::string& command_line) {
    if (flags.cache_dir.empty()) throw Error("InvalidArgument", "fetch requires --cache DIR");
    std::vector<RepoRef> refs;
    for (const auto& arg : repo_args) refs.push_back(RepoRef::parse(arg));
    if (!repos_file.empty()) {
        auto more = read_repo_list(repos_file);
        refs.insert(refs.end(), more.begin(), more.end());
    }
    if (refs.empty()) throw Error("InvalidArgument", "no repositories given");

    RunManifest manifest;
    manifest.command = command_line;
    manifest.seed = flags.seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = now_utc();
    if (!repos_file.empty()) manifest.inputs.push_back(repos_file);

    GithubClient client(client_options(flags));
    std::mutex print_mutex;
    std::vector<std::string> failures;
    parallel_over_repos(
        refs, flags.jobs,
        [&](const RepoRef& ref) {
            RawRepo repo = client.fetch_repo(ref);
            auto commits = client.fetch_commits(ref);
            std::lock_guard<std::mutex> lock(print_mutex);
            std::cout << ref.full_name() << ": " << commits.size() << " commits, "
                      << (repo.readme ? "readme" : "no readme") << "\n";
        },
        failures);

    manifest.failures = failures;
    manifest.outputs.push_back(flags.cache_dir);
    manifest.finished_at = now_utc();
    manifest.write_next_to(flags.cache_dir + "/placeholder");
    for (const auto& f : failures) std::cerr << "failed: " << f << "\n";
    return failures.size() == refs.size() && !refs.empty() ? 1 : 0;
}

int cmd_build(const GlobalFlags& flags, const std::string& in_dir, const std::string& out_path,
              const std::string& labels_file, bool merge, bool drop_deprecated,
              const std::string& command_line) {
    RunManifest manifest;
    manifest.command = command_line;
    manifest.seed = flags.seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = now_utc();
    manifest.inputs = {in_dir};

    std::map<std::string, DomainLabel> labels;
    if (!labels_file.empty()) {
        labels = read_labels_csv(labels_file);
        manifest.inputs.push_back(labels_file);
    }

    CacheStore cache(in_dir);
    Dataset dataset;
    std::vector<std::string> deprecated_list;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (!entry.is_directory()) continue;
        std::string key = entry.path().filename().string();
        auto sep = key.find("__");
        if (sep == std::string::npos) continue;
        RepoRef ref(key.substr(0, sep), key.substr(sep + 2));
        std::optional<RawRepo> raw;
        try {
            raw = cache_load_repo(cache, ref);
        } catch (const CorruptCacheError& e) {
            manifest.failures.push_back(ref.full_name() + ": [CorruptCache] " + e.what());
            continue;
        }
        if (!raw) continue;
        RepoRecord record = record_from_raw(*raw);
        auto it = labels.find(ref.full_name());
        if (it != labels.end()) record.label = it->second;
        if (record.status == RepoStatus::Deprecated) {
            deprecated_list.push_back(ref.full_name());
            if (drop_deprecated) continue;
        }
        dataset.records.push_back(std::move(record));
    }
    std::sort(dataset.records.begin(), dataset.records.end(),
              [](const RepoRecord& a, const RepoRecord& b) {
                  return a.ref.full_name() < b.ref.full_name();
              });
    if (merge) dataset = merge_labels(std::move(dataset));
    save_dataset(dataset, out_path);

    if (!deprecated_list.empty()) {
        std::cout << "deprecation-flagged repositories (review these):\n";
        for (const auto& name : deprecated_list) std::cout << "  " << name << "\n";
    }
    DatasetStats stats = dataset_stats(dataset);
    std::cout << dataset.records.size() << " records written to " << out_path << "\n";
    for (const auto& fm : stats.features) {
        std::cout << "  " << fm.feature << ": " << fm.missing << " missing ("
                  << round_percent_1dp(fm.missing_percent) << "%)\n";
    }

    manifest.outputs = {out_path};
    manifest.finished_at = now_utc();
    manifest.write_next_to(out_path);
    return 0;
}

struct TrainFlags {
    std::string data_path;
    std::string out_path;
    std::string budget = "1000s";
    int trials = 25;
    int folds = 10;
    std::string objective = "macro_f1";
    bool merge = false;
    bool no_smote = false;
    bool no_select = false;
    bool no_search = false;
    std::string text_mode = "tfidf";
    std::string embeddings_path;
    // used when --no-search is given
    int rounds = 100;
    double learning_rate = 0.1;
    int max_leaves = 31;
    int min_samples_leaf = 1;
    double l2 = 0.0;
    double feature_subsample = 1.0;
};

PipelineConfig pipeline_config_from(const TrainFlags& tf) {
    PipelineConfig cfg;
    cfg.smote_enabled = !tf.no_smote;
    cfg.select_categorical = !tf.no_select;
    if (tf.text_mode == "embedding" || tf.text_mode == "precomputed_embedding") {
        cfg.text.mode = TextMode::PrecomputedEmbedding;
    } else if (tf.text_mode != "tfidf") {
        throw Error("InvalidArgument", "unknown --text-mode '" + tf.text_mode + "'");
    }
    return cfg;
}

int cmd_train(const GlobalFlags& flags, const TrainFlags& tf, const std::string& command_line) {
    RunManifest manifest;
    manifest.command = command_line;
    manifest.seed = flags.seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = now_utc();
    manifest.inputs = {tf.data_path};

    Dataset dataset = load_dataset(tf.data_path);
    if (tf.merge && dataset.scheme == LabelScheme::Raw6) dataset = merge_labels(std::move(dataset));
    std::vector<RepoRecord> records;
    for (auto& r : dataset.records) {
        if (r.label) records.push_back(std::move(r));
    }
    if (records.empty()) throw EmptyDatasetError("no labelled records in " + tf.data_path);

    auto embeddings = load_embeddings_if(tf.embeddings_path);
    const EmbeddingTable* table = embeddings ? &*embeddings : nullptr;
    PipelineConfig pipeline_config = pipeline_config_from(tf);

    FeaturePipeline pipeline = FeaturePipeline::fit(records, pipeline_config, table);
    FeatureMatrix matrix = pipeline.transform(records, table);
    std::cout << "feature matrix: " << matrix.n_rows << " x " << matrix.n_cols() << "\n";

    TrainConfig best;
    best.seed = flags.seed;
    double cv_score = 0.0;
    if (tf.no_search) {
        best.num_rounds = tf.rounds;
        best.learning_rate = tf.learning_rate;
        best.max_leaves = tf.max_leaves;
        best.min_samples_leaf = tf.min_samples_leaf;
        best.l2_leaf_penalty = tf.l2;
        best.feature_subsample = tf.feature_subsample;
        best.validate();
    } else {
        SearchBudget budget;
        budget.wall_seconds = parse_budget_seconds(tf.budget);
        budget.max_trials = tf.trials;
        budget.cv_folds = tf.folds;
        budget.objective = objective_from_name(tf.objective);
        budget.seed = flags.seed;
        budget.smote_inside_folds = pipeline_config.smote_enabled;
        budget.smote_k = pipeline_config.smote_k;
        SearchOutcome outcome = search(matrix, budget);
        best = outcome.best_config;
        cv_score = outcome.best_score;
        std::cout << "search: " << outcome.completed_trials << " trials, best " << tf.objective
                  << " = " << cv_score << "\n";
    }

    FeatureMatrix train_matrix = matrix;
    if (pipeline_config.smote_enabled) {
        train_matrix = smote(train_matrix, pipeline_config.smote_k, flags.seed).matrix;
    }
    GbdtModel model = train(train_matrix, best);

    ModelBundle bundle;
    bundle.pipeline = pipeline;
    bundle.model = model;
    bundle.provenance = {{"data", tf.data_path},
                         {"seed", flags.seed},
                         {"objective", tf.objective},
                         {"cv_score", cv_score},
                         {"train_config", best.to_json()},
                         {"pipeline_config", pipeline_config.to_json()}};
    save_bundle(bundle, tf.out_path);
    std::cout << "model written to " << tf.out_path << "\n";

    auto groups = group_importance(model);
    std::cout << "feature-group importance: textual " << groups[FeatureGroup::Textual]
              << "%, categorical " << groups[FeatureGroup::Categorical] << "%, numerical "
              << groups[FeatureGroup::Numerical] << "%\n";

    manifest.config = bundle.provenance;
    manifest.outputs = {tf.out_path};
    manifest.finished_at = now_utc();
    manifest.write_next_to(tf.out_path);
    return 0;
}

int cmd_eval(const GlobalFlags& flags, const std::string& model_path, const std::string& data_path,
             const std::string& out_dir, const std::string& embeddings_path,
             const std::string& command_line) {
    ModelBundle bundle = load_bundle(model_path);
    Dataset dataset = load_dataset(data_path);

    LabelScheme model_scheme =
        std::find(bundle.model.classes.begin(), bundle.model.classes.end(),
                  DomainLabel::ApplicationAndSystemSoftware) != bundle.model.classes.end()
            ? LabelScheme::Merged5
            : LabelScheme::Raw6;
    if (model_scheme == LabelScheme::Merged5 && dataset.scheme == LabelScheme::Raw6) {
        std::cerr << "note: merging dataset labels to match the model's merged scheme\n";
        dataset = merge_labels(std::move(dataset));
    }

    std::vector<RepoRecord> records;
    for (auto& r : dataset.records) {
        if (r.label) records.push_back(std::move(r));
    }
    if (records.empty()) throw EmptyDatasetError("no labelled records in " + data_path);

    auto embeddings = load_embeddings_if(embeddings_path);
    EvalOutput out = evaluate_on(bundle.pipeline, bundle.model, records,
                                 embeddings ? &*embeddings : nullptr);

    if (flags.format == "csv") {
        std::cout << "metric,class,value\n";
        for (const auto& m : out.report.per_class) {
            std::cout << "precision," << label_display(m.label) << "," << m.precision << "\n";
            std::cout << "recall," << label_display(m.label) << "," << m.recall << "\n";
            std::cout << "f1," << label_display(m.label) << "," << m.f1 << "\n";
        }
        std::cout << "macro_f1,," << out.report.macro_f1 << "\n";
        std::cout << "accuracy,," << out.report.accuracy << "\n";
    } else {
        std::cout << format_confusion_text(out.confusion) << "\n"
                  << format_metrics_text(out.report);
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_confusion_csv(out.confusion, out_dir + "/confusion.csv");
        write_metrics_csv(out.report, out_dir + "/metrics.csv");
        RunManifest manifest;
        manifest.command = command_line;
        manifest.seed = flags.seed;
        manifest.tool_version = kToolVersion;
        manifest.started_at = now_utc();
        manifest.inputs = {model_path, data_path};
        manifest.outputs = {out_dir + "/confusion.csv", out_dir + "/metrics.csv"};
        manifest.finished_at = now_utc();
        manifest.write_next_to(out_dir + "/metrics.csv");
    }
    return 0;
}

int cmd_classify(const GlobalFlags& flags, const std::string& model_path,
                 const std::string& repo_arg, const std::string& out_path,
                 const std::string& embeddings_path, const std::string& command_line) {
    ModelBundle bundle = load_bundle(model_path);
    RepoRef ref = RepoRef::parse(repo_arg);
    GithubClient client(client_options(flags));
    RawRepo raw = client.fetch_repo(ref);
    RepoRecord record = record_from_raw(raw);

    auto embeddings = load_embeddings_if(embeddings_path);
    FeatureMatrix matrix =
        bundle.pipeline.transform({record}, embeddings ? &*embeddings : nullptr);
    auto proba = predict_proba(bundle.model, matrix).front();
    size_t best = 0;
    for (size_t i = 1; i < proba.size(); ++i) {
        if (proba[i] > proba[best]) best = i;
    }

    std::cout << ref.full_name() << ": " << label_display(bundle.model.classes[best]) << "\n";
    for (size_t i = 0; i < proba.size(); ++i) {
        std::cout << "  " << label_display(bundle.model.classes[i]) << ": " << proba[i] << "\n";
    }

    if (!out_path.empty()) {
        nlohmann::json j;
        j["ref"] = ref.full_name();
        j["predicted"] = label_id(bundle.model.classes[best]);
        nlohmann::json probs = nlohmann::json::object();
        for (size_t i = 0; i < proba.size(); ++i) {
            probs[label_id(bundle.model.classes[i])] = proba[i];
        }
        j["probabilities"] = probs;
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write '" + out_path + "'");
        out << j.dump(2) << "\n";
        RunManifest manifest;
        manifest.command = command_line;
        manifest.seed = flags.seed;
        manifest.tool_version = kToolVersion;
        manifest.started_at = now_utc();
        manifest.inputs = {model_path};
        manifest.outputs = {out_path};
        manifest.finished_at = now_utc();
        manifest.write_next_to(out_path);
    }
    return 0;
}

int cmd_ablate(const GlobalFlags& flags, const std::string& data_path, const std::string& out_dir,
               const std::string& budget_text, int trials, int folds, bool merge,
               const std::string& command_line) {
    Dataset dataset = load_dataset(data_path);
    if (merge && dataset.scheme == LabelScheme::Raw6) dataset = merge_labels(std::move(dataset));
    Dataset labelled{dataset.scheme, {}};
    for (auto& r : dataset.records) {
        if (r.label) labelled.records.push_back(std::move(r));
    }
    if (labelled.records.empty()) throw EmptyDatasetError("no labelled records in " + data_path);

    SearchBudget budget;
    budget.wall_seconds = parse_budget_seconds(budget_text);
    budget.max_trials = trials;
    budget.cv_folds = folds;
    budget.seed = flags.seed;
    auto rows = ablation(labelled, budget);
    std::cout << format_ablation_text(rows);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_ablation_csv(rows, out_dir + "/ablation.csv");
        RunManifest manifest;
        manifest.command = command_line;
        manifest.seed = flags.seed;
        manifest.tool_version = kToolVersion;
        manifest.started_at = now_utc();
        manifest.inputs = {data_path};
        manifest.outputs = {out_dir + "/ablation.csv"};
        manifest.finished_at = now_utc();
        manifest.write_next_to(out_dir + "/ablation.csv");
    }
    return 0;
}

int cmd_practices(const GlobalFlags& flags, const std::string& model_path,
                  const std::string& repos_file, const std::string& out_path,
                  std::int64_t max_commits, const std::string& embeddings_path,
                  const std::string& command_line) {
    ModelBundle bundle = load_bundle(model_path);
    auto refs = read_repo_list(repos_file);
    if (refs.empty()) throw EmptyDatasetError("repo list '" + repos_file + "' is empty");
    auto embeddings = load_embeddings_if(embeddings_path);
    const EmbeddingTable* table = embeddings ? &*embeddings : nullptr;

    RunManifest manifest;
    manifest.command = command_line;
    manifest.seed = flags.seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = now_utc();
    manifest.inputs = {model_path, repos_file};

    GithubClient client(client_options(flags));
    struct Mined {
        RepoRef ref;
        DomainLabel domain;
        PracticeProfile profile;
        std::int64_t commit_count;
    };
    std::vector<Mined> mined;
    std::mutex mined_mutex;
    std::vector<std::string> failures;
    parallel_over_repos(
        refs, flags.jobs,
        [&](const RepoRef& ref) {
            RawRepo raw = client.fetch_repo(ref);
            auto commits = client.fetch_commits(ref);
            RepoRecord record = record_from_raw(raw);
            FeatureMatrix matrix = bundle.pipeline.transform({record}, table);
            DomainLabel domain = predict(bundle.model, matrix).front();
            PracticeProfile profile = practice_profile(raw, commits);
            std::lock_guard<std::mutex> lock(mined_mutex);
            mined.push_back(
                {ref, domain, profile, static_cast<std::int64_t>(commits.size())});
        },
        failures);
    std::sort(mined.begin(), mined.end(), [](const Mined& a, const Mined& b) {
        return a.ref.full_name() < b.ref.full_name();
    });

    std::vector<std::pair<RepoRef, std::int64_t>> with_counts;
    with_counts.reserve(mined.size());
    for (const auto& m : mined) with_counts.emplace_back(m.ref, m.commit_count);
    auto [kept, exclusion] = exclude_outliers(with_counts, max_commits);
    std::set<std::string> kept_names;
    for (const auto& [ref, count] : kept) kept_names.insert(ref.full_name());

    std::vector<ClassifiedProfile> profiles;
    for (const auto& m : mined) {
        if (kept_names.count(m.ref.full_name())) {
            profiles.push_back({m.ref, m.domain, m.profile});
        }
    }
    write_profiles_csv(profiles, out_path);

    for (const auto& [ref, count] : exclusion.excluded) {
        std::cout << "excluded " << ref.full_name() << " (" << count << " commits > "
                  << max_commits << ")\n";
    }
    std::cout << profiles.size() << " profiles written to " << out_path << "\n";
    for (const auto& f : failures) std::cerr << "failed: " << f << "\n";

    manifest.failures = failures;
    manifest.outputs = {out_path};
    manifest.finished_at = now_utc();
    manifest.write_next_to(out_path);
    return 0;
}

int cmd_report(const GlobalFlags& flags, const std::string& profiles_path,
               const std::string& out_dir, const std::string& command_line) {
    auto profiles = read_profiles_csv(profiles_path);
    if (profiles.empty()) throw EmptyDatasetError("no profiles in '" + profiles_path + "'");
    auto report = domain_comparison_report(profiles);
    std::cout << format_domain_report_text(report);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_domain_report_csv(report, out_dir);
        RunManifest manifest;
        manifest.command = command_line;
        manifest.seed = flags.seed;
        manifest.tool_version = kToolVersion;
        manifest.started_at = now_utc();
        manifest.inputs = {profiles_path};
        manifest.outputs = {out_dir + "/adoption.csv", out_dir + "/refactoring.csv",
                            out_dir + "/ownership.csv", out_dir + "/tests.csv"};
        manifest.finished_at = now_utc();
        manifest.write_next_to(out_dir + "/tests.csv");
    }
    return 0;
}

int cmd_tsne(const GlobalFlags& flags, const std::string& profiles_path,
             const std::string& out_path, double perplexity, int iterations,
             const std::string& command_line) {
    auto profiles = read_profiles_csv(profiles_path);
    if (profiles.empty()) throw EmptyDatasetError("no profiles in '" + profiles_path + "'");
    std::vector<std::vector<double>> rows;
    rows.reserve(profiles.size());
    for (const auto& cp : profiles) rows.push_back(cp.profile.as_row());
    auto standardized = standardize(rows);
    for (size_t col : standardized.zero_variance_columns) {
        std::cerr << "note: feature '" << PracticeProfile::feature_names()[col]
                  << "' has zero variance\n";
    }
    TsneConfig config;
    config.seed = flags.seed;
    config.perplexity = perplexity;
    config.iterations = iterations;
    Embedding2D embedding = tsne_project(standardized.rows, config);
    write_tsne_csv(profiles, embedding, out_path);
    std::cout << "t-SNE projection written to " << out_path << " (final KL "
              << embedding.final_kl << ")\n";

    RunManifest manifest;
    manifest.command = command_line;
    manifest.seed = flags.seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = now_utc();
    manifest.inputs = {profiles_path};
    manifest.outputs = {out_path};
    manifest.finished_at = now_utc();
    manifest.write_next_to(out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repodomain: categorise GitHub repositories by application domain and "
                 "compare software-engineering practices across domains"};
    app.require_subcommand(1);
    const std::string command_line = join_argv(argc, argv);

    GlobalFlags flags;
    app.add_option("--seed", flags.seed, "RNG seed for all randomized steps");
    app.add_option("--format", flags.format, "Output format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
    app.add_option("--cache", flags.cache_dir, "Cache directory for API responses");
    app.add_option("--api-base", flags.api_base, "GitHub API base URL");
    app.add_flag("--offline", flags.offline, "Serve everything from the cache; never fetch");
    app.add_flag("--refresh", flags.refresh, "Refetch even when the cache is warm");
    app.add_option("--jobs", flags.jobs, "Concurrent repositories in batch commands")
        ->check(CLI::PositiveNumber);

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Harvest repository metadata and commits");
    std::vector<std::string> fetch_repos;
    std::string fetch_repos_file;
    fetch->add_option("refs", fetch_repos, "Repositories as owner/name");
    fetch->add_option("--repos", fetch_repos_file, "File with one owner/name per line");

    // build
    auto* build = app.add_subcommand("build", "Build a dataset from the cache");
    std::string build_in, build_out, build_labels;
    bool build_merge = false, build_drop_deprecated = false;
    build->add_option("--in", build_in, "Cache directory")->required();
    build->add_option("--out", build_out, "Output dataset (JSONL)")->required();
    build->add_option("--labels", build_labels, "CSV 'owner/name,label' with known labels");
    build->add_flag("--merge", build_merge, "Apply the 5-class merged scheme");
    build->add_flag("--drop-deprecated", build_drop_deprecated,
                    "Drop deprecation-flagged records instead of keeping them");

    // train
    auto* train_cmd = app.add_subcommand("train", "Tune and train the classifier");
    TrainFlags tf;
    train_cmd->add_option("--data", tf.data_path, "Labelled dataset (JSONL)")->required();
    train_cmd->add_option("--out", tf.out_path, "Output model bundle")->required();
    train_cmd->add_option("--budget", tf.budget, "Search wall budget, e.g. 1000s");
    train_cmd->add_option("--trials", tf.trials, "Maximum search trials")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--folds", tf.folds, "Cross-validation folds");
    train_cmd->add_option("--objective", tf.objective, "macro_f1 or roc_auc_ovr");
    train_cmd->add_flag("--merge", tf.merge, "Merge to the 5-class scheme before training");
    train_cmd->add_flag("--no-smote", tf.no_smote, "Disable SMOTE oversampling");
    train_cmd->add_flag("--no-select", tf.no_select, "Disable categorical feature selection");
    train_cmd->add_flag("--no-search", tf.no_search,
                        "Skip hyperparameter search; use the explicit settings below");
    train_cmd->add_option("--text-mode", tf.text_mode, "tfidf or embedding");
    train_cmd->add_option("--embeddings", tf.embeddings_path,
                          "Precomputed embedding file (embedding mode)");
    train_cmd->add_option("--rounds", tf.rounds, "Boosting rounds (--no-search)");
    train_cmd->add_option("--learning-rate", tf.learning_rate, "Learning rate (--no-search)");
    train_cmd->add_option("--max-leaves", tf.max_leaves, "Leaves per tree (--no-search)");
    train_cmd->add_option("--min-samples-leaf", tf.min_samples_leaf,
                          "Minimum samples per leaf (--no-search)");
    train_cmd->add_option("--l2", tf.l2, "L2 leaf penalty (--no-search)");
    train_cmd->add_option("--feature-subsample", tf.feature_subsample,
                          "Feature subsample fraction (--no-search)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labelled dataset");
    std::string eval_model, eval_data, eval_out, eval_embeddings;
    eval_cmd->add_option("--model", eval_model, "Model bundle")->required();
    eval_cmd->add_option("--data", eval_data, "Labelled dataset (JSONL)")->required();
    eval_cmd->add_option("--out", eval_out, "Directory for confusion.csv and metrics.csv");
    eval_cmd->add_option("--embeddings", eval_embeddings, "Embedding file (embedding mode)");

    // classify
    auto* classify = app.add_subcommand("classify", "Classify one repository");
    std::string classify_model, classify_repo, classify_out, classify_embeddings;
    classify->add_option("--model", classify_model, "Model bundle")->required();
    classify->add_option("--repo", classify_repo, "Repository as owner/name")->required();
    classify->add_option("--out", classify_out, "Optional JSON result path");
    classify->add_option("--embeddings", classify_embeddings, "Embedding file (embedding mode)");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Compare the five data-source configurations");
    std::string ablate_data, ablate_out, ablate_budget = "60s";
    int ablate_trials = 2, ablate_folds = 3;
    bool ablate_merge = false;
    ablate->add_option("--data", ablate_data, "Labelled dataset (JSONL)")->required();
    ablate->add_option("--out", ablate_out, "Directory for ablation.csv");
    ablate->add_option("--budget", ablate_budget, "Search budget per configuration");
    ablate->add_option("--trials", ablate_trials, "Search trials per configuration");
    ablate->add_option("--folds", ablate_folds, "Cross-validation folds");
    ablate->add_flag("--merge", ablate_merge, "Merge to the 5-class scheme first");

    // practices
    auto* practices = app.add_subcommand("practices",
                                         "Classify repositories and mine practice features");
    std::string practices_model, practices_repos, practices_out, practices_embeddings;
    std::int64_t practices_max_commits = 200000;
    practices->add_option("--model", practices_model, "Model bundle")->required();
    practices->add_option("--repos", practices_repos, "File with one owner/name per line")
        ->required();
    practices->add_option("--out", practices_out, "Output profiles.csv")->required();
    practices->add_option("--max-commits", practices_max_commits,
                          "Exclude repositories with more commits than this");
    practices->add_option("--embeddings", practices_embeddings, "Embedding file");

    // report
    auto* report = app.add_subcommand("report", "Domain comparison report from profiles");
    std::string report_profiles, report_out;
    report->add_option("--profiles", report_profiles, "profiles.csv from `practices`")
        ->required();
    report->add_option("--out", report_out, "Directory for the CSV reports");

    // tsne
    auto* tsne = app.add_subcommand("tsne", "2-D t-SNE projection of practice profiles");
    std::string tsne_profiles, tsne_out;
    double tsne_perplexity = 30.0;
    int tsne_iterations = 1000;
    tsne->add_option("--profiles", tsne_profiles, "profiles.csv from `practices`")->required();
    tsne->add_option("--out", tsne_out, "Output tsne.csv")->required();
    tsne->add_option("--perplexity", tsne_perplexity, "Perplexity (capped at (N-1)/3)");
    tsne->add_option("--iterations", tsne_iterations, "Gradient-descent iterations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    try {
        if (fetch->parsed()) {
            return cmd_fetch(flags, fetch_repos, fetch_repos_file, command_line);
        }
        if (build->parsed()) {
            return cmd_build(flags, build_in, build_out, build_labels, build_merge,
                             build_drop_deprecated, command_line);
        }
        if (train_cmd->parsed()) return cmd_train(flags, tf, command_line);
        if (eval_cmd->parsed()) {
            return cmd_eval(flags, eval_model, eval_data, eval_out, eval_embeddings, command_line);
        }
        if (classify->parsed()) {
            return cmd_classify(flags, classify_model, classify_repo, classify_out,
                                classify_embeddings, command_line);
        }
        if (ablate->parsed()) {
            return cmd_ablate(flags, ablate_data, ablate_out, ablate_budget, ablate_trials,
                              ablate_folds, ablate_merge, command_line);
        }
        if (practices->parsed()) {
            return cmd_practices(flags, practices_model, practices_repos, practices_out,
                                 practices_max_commits, practices_embeddings, command_line);
        }
        if (report->parsed()) return cmd_report(flags, report_profiles, report_out, command_line);
        if (tsne->parsed()) {
            return cmd_tsne(flags, tsne_profiles, tsne_out, tsne_perplexity, tsne_iterations,
                            command_line);
        }
        std::cerr << "usage error: no subcommand given\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error [Internal]: " << e.what() << "\n";
        return 1;
    }
}
