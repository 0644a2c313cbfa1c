#include "repodomain/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "repodomain/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace repodomain {

std::string anonymous_author_id(const std::string& name, const std::string& email) {
    std::string normalized = to_lower(trim(name)) + "\n" + to_lower(trim(email));
    return "anon:" + sha256_hex(normalized).substr(0, 16);
}

// ---------------------------------------------------------------------------
// Cache store
// ---------------------------------------------------------------------------

CacheStore::CacheStore(std::string root_dir) : root_(std::move(root_dir)) {
    if (root_.empty()) throw IoError("cache root must not be empty");
}

std::string CacheStore::entry_path(const RepoRef& ref, const std::string& resource) const {
    return (fs::path(root_) / ref.cache_key() / (resource + ".json")).string();
}

bool CacheStore::has(const RepoRef& ref, const std::string& resource) const {
    return fs::exists(entry_path(ref, resource));
}

std::optional<std::string> CacheStore::load(const RepoRef& ref, const std::string& resource) const {
    const std::string path = entry_path(ref, resource);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();

    std::ifstream sidecar(path + ".sha256");
    std::string recorded;
    if (sidecar) sidecar >> recorded;
    if (recorded.empty() || sha256_hex(content) != recorded) {
        evict(ref, resource);
        throw CorruptCacheError("cache entry " + ref.cache_key() + "/" + resource +
                                " failed its checksum; evicted");
    }
    return content;
}

void CacheStore::store(const RepoRef& ref, const std::string& resource,
                       const std::string& json_text) const {
    const std::string path = entry_path(ref, resource);
    std::error_code ec;
    fs::create_directories(fs::path(path).parent_path(), ec);
    if (ec) throw IoError("cannot create cache directory: " + ec.message());
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write cache entry '" + path + "'");
        out << json_text;
        if (!out) throw IoError("failed writing cache entry '" + path + "'");
    }
    std::ofstream sidecar(path + ".sha256");
    if (!sidecar) throw IoError("cannot write checksum sidecar for '" + path + "'");
    sidecar << sha256_hex(json_text) << "\n";
}

void CacheStore::evict(const RepoRef& ref, const std::string& resource) const {
    const std::string path = entry_path(ref, resource);
    std::error_code ec;
    fs::remove(path, ec);
    fs::remove(path + ".sha256", ec);
}

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace {
constexpr int kCacheSchemaVersion = 1;
}

std::string raw_repo_to_json(const RawRepo& repo) {
    json j;
    j["schema_version"] = kCacheSchemaVersion;
    j["ref"] = repo.ref.full_name();
    if (repo.description) j["description"] = *repo.description;
    if (repo.readme) j["readme"] = *repo.readme;
    j["topics"] = repo.topics;
    if (repo.licence_key) j["licence_key"] = *repo.licence_key;
    j["languages"] = repo.languages;
    j["labels"] = repo.labels;
    json contribs = json::array();
    for (const auto& [login, commits] : repo.contributors) contribs.push_back({login, commits});
    j["contributors"] = contribs;
    j["root_entries"] = repo.root_entries;
    j["releases"] = repo.releases;
    j["stars"] = repo.stars;
    j["forks"] = repo.forks;
    j["has_workflow_files"] = repo.has_workflow_files;
    j["fetched_at"] = repo.fetched_at;
    return j.dump();
}

RawRepo raw_repo_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", 0) != kCacheSchemaVersion) {
        throw SchemaMismatchError("unsupported cached repo schema_version");
    }
    RawRepo repo;
    repo.ref = RepoRef::parse(j.at("ref").get<std::string>());
    if (j.contains("description")) repo.description = j["description"].get<std::string>();
    if (j.contains("readme")) repo.readme = j["readme"].get<std::string>();
    repo.topics = j.at("topics").get<std::vector<std::string>>();
    if (j.contains("licence_key")) repo.licence_key = j["licence_key"].get<std::string>();
    repo.languages = j.at("languages").get<std::map<std::string, std::int64_t>>();
    repo.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& entry : j.at("contributors")) {
        repo.contributors.emplace_back(entry.at(0).get<std::string>(),
                                       entry.at(1).get<std::int64_t>());
    }
    repo.root_entries = j.at("root_entries").get<std::vector<std::string>>();
    repo.releases = j.at("releases").get<std::int64_t>();
    repo.stars = j.at("stars").get<std::int64_t>();
    repo.forks = j.at("forks").get<std::int64_t>();
    repo.has_workflow_files = j.at("has_workflow_files").get<bool>();
    repo.fetched_at = j.at("fetched_at").get<std::int64_t>();
    if (repo.releases < 0 || repo.stars < 0 || repo.forks < 0) {
        throw SchemaMismatchError("negative counts in cached repo");
    }
    return repo;
}

std::string commits_to_json(const std::vector<CommitRecord>& commits) {
    json j;
    j["schema_version"] = kCacheSchemaVersion;
    json list = json::array();
    for (const auto& c : commits) {
        list.push_back({{"sha", c.sha},
                        {"author_id", c.author_id},
                        {"message", c.message},
                        {"authored_at", c.authored_at}});
    }
    j["commits"] = list;
    return j.dump();
}

std::vector<CommitRecord> commits_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", 0) != kCacheSchemaVersion) {
        throw SchemaMismatchError("unsupported cached commits schema_version");
    }
    std::vector<CommitRecord> commits;
    for (const auto& entry : j.at("commits")) {
        CommitRecord c;
        c.sha = entry.at("sha").get<std::string>();
        c.author_id = entry.at("author_id").get<std::string>();
        c.message = entry.at("message").get<std::string>();
        c.authored_at = entry.at("authored_at").get<std::int64_t>();
        commits.push_back(std::move(c));
    }
    return commits;
}

void cache_store_repo(const CacheStore& cache, const RawRepo& repo) {
    cache.store(repo.ref, "repo", raw_repo_to_json(repo));
}

std::optional<RawRepo> cache_load_repo(const CacheStore& cache, const RepoRef& ref) {
    auto text = cache.load(ref, "repo");
    if (!text) return std::nullopt;
    return raw_repo_from_json(*text);
}

void cache_store_commits(const CacheStore& cache, const RepoRef& ref,
                         const std::vector<CommitRecord>& commits) {
    cache.store(ref, "commits", commits_to_json(commits));
}

std::optional<std::vector<CommitRecord>> cache_load_commits(const CacheStore& cache,
                                                            const RepoRef& ref) {
    auto text = cache.load(ref, "commits");
    if (!text) return std::nullopt;
    return commits_from_json(*text);
}

// ---------------------------------------------------------------------------
// GitHub client
// ---------------------------------------------------------------------------

namespace {

struct Response {
    int status = 0;
    std::string body;
};

std::int64_t header_int(const httplib::Response& res, const char* name, std::int64_t fallback) {
    if (!res.has_header(name)) return fallback;
    try {
        return std::stoll(res.get_header_value(name));
    } catch (...) {
        return fallback;
    }
}

}  // namespace

struct GithubClient::Impl {
    ClientOptions options;
    std::string token;
    mutable std::mutex budget_mutex;
    RateBudget budget;
    int per_page = 100;

    explicit Impl(ClientOptions opts) : options(std::move(opts)) {
        if (options.auth_token) {
            token = *options.auth_token;
        } else if (const char* env = std::getenv("REPODOMAIN_GITHUB_TOKEN")) {
            token = env;
        }
        budget.max_concurrent = options.max_concurrent;
        per_page = options.per_page;
    }

    std::optional<CacheStore> cache() const {
        if (!options.cache_dir) return std::nullopt;
        return CacheStore(*options.cache_dir);
    }

    httplib::Client make_http_client() const {
        httplib::Client cli(options.base_url);
        cli.set_connection_timeout(10, 0);
        cli.set_read_timeout(30, 0);
        cli.set_follow_location(true);
        httplib::Headers headers = {{"User-Agent", "repodomain/0.1"},
                                    {"X-GitHub-Api-Version", "2022-11-28"}};
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
        cli.set_default_headers(headers);
        return cli;
    }

    void check_budget() {
        std::int64_t wait_until = 0;
        {
            std::lock_guard<std::mutex> lock(budget_mutex);
            if (budget.remaining == 0 && now_utc() < budget.reset_at) {
                wait_until = budget.reset_at;
            }
        }
        if (wait_until == 0) return;
        if (!options.wait_on_rate_limit) {
            throw RateLimitedError("rate limit exhausted until " + format_iso8601(wait_until),
                                   wait_until);
        }
        std::int64_t delay = std::max<std::int64_t>(wait_until - now_utc(), 1);
        std::this_thread::sleep_for(std::chrono::seconds(delay));
        std::lock_guard<std::mutex> lock(budget_mutex);
        budget.remaining = -1;  // unknown again after the window resets
    }

    void update_budget(const httplib::Response& res) {
        std::lock_guard<std::mutex> lock(budget_mutex);
        budget.remaining = header_int(res, "X-RateLimit-Remaining", budget.remaining);
        budget.reset_at = header_int(res, "X-RateLimit-Reset", budget.reset_at);
    }

    // One GET with retry/backoff on transient failures. Statuses 404/409 are
    // returned to the caller; auth and rate-limit problems throw.
    Response request(const std::string& path, const httplib::Headers& extra = {}) {
        if (options.offline) {
            throw TransportError("offline mode: no cached copy of " + path);
        }
        std::string last_error;
        for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    static_cast<std::int64_t>(options.retry_backoff_ms) * (1LL << (attempt - 1))));
            }
            check_budget();
            auto cli = make_http_client();
            auto res = cli.Get(path, extra);
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;  // connection-level failure: retry
            }
            update_budget(*res);
            const int status = res->status;
            if (status == 200 || status == 404 || status == 409 || status == 204) {
                return {status, res->body};
            }
            if (status == 401) {
                throw AuthFailedError("authentication failed for " + path);
            }
            if (status == 403 || status == 429) {
                std::int64_t remaining = header_int(*res, "X-RateLimit-Remaining", -1);
                std::int64_t reset_at = header_int(*res, "X-RateLimit-Reset", now_utc() + 60);
                if (remaining == 0 || status == 429) {
                    if (options.wait_on_rate_limit) {
                        std::int64_t delay = std::max<std::int64_t>(reset_at - now_utc(), 1);
                        std::this_thread::sleep_for(std::chrono::seconds(delay));
                        continue;
                    }
                    throw RateLimitedError("rate limited on " + path, reset_at);
                }
                throw AuthFailedError("forbidden (" + std::to_string(status) + ") on " + path);
            }
            if (status >= 500) {
                last_error = "server error " + std::to_string(status);
                continue;
            }
            throw TransportError("unexpected status " + std::to_string(status) + " on " + path);
        }
        throw TransportError("request to " + path + " failed after " +
                             std::to_string(options.max_retries + 1) + " attempts: " + last_error);
    }

    json request_json(const std::string& path) {
        Response res = request(path);
        if (res.status == 404) throw NotFoundError("not found: " + path);
        if (res.status == 204 || res.status == 409) return json::array();
        try {
            return json::parse(res.body);
        } catch (const json::exception& e) {
            throw TransportError("malformed JSON from " + path + ": " + e.what());
        }
    }

    // Optional endpoints where 404 means "absent", not an error.
    std::optional<json> request_json_optional(const std::string& path) {
        Response res = request(path);
        if (res.status == 404) return std::nullopt;
        if (res.status == 204 || res.status == 409) return json::array();
        try {
            return json::parse(res.body);
        } catch (const json::exception& e) {
            throw TransportError("malformed JSON from " + path + ": " + e.what());
        }
    }

    json paginate(const std::string& base_path) {
        json all = json::array();
        for (int page = 1;; ++page) {
            std::string sep = base_path.find('?') == std::string::npos ? "?" : "&";
            json chunk = request_json(base_path + sep + "per_page=" + std::to_string(per_page) +
                                      "&page=" + std::to_string(page));
            if (!chunk.is_array()) {
                throw TransportError("expected a JSON array from " + base_path);
            }
            for (auto& item : chunk) all.push_back(std::move(item));
            if (chunk.size() < static_cast<size_t>(per_page)) break;
            if (page > 100000) throw TransportError("pagination did not terminate");
        }
        return all;
    }

    RawRepo fetch_repo_from_api(const RepoRef& ref) {
        const std::string base = "/repos/" + ref.owner + "/" + ref.name;
        RawRepo repo;
        repo.ref = ref;

        json meta = request_json(base);  // 404 here means the repo is gone
        if (meta.contains("description") && meta["description"].is_string()) {
            repo.description = meta["description"].get<std::string>();
        }
        if (meta.contains("license") && meta["license"].is_object() &&
            meta["license"].contains("key") && meta["license"]["key"].is_string()) {
            repo.licence_key = meta["license"]["key"].get<std::string>();
        }
        repo.stars = std::max<std::int64_t>(0, meta.value("stargazers_count", 0));
        repo.forks = std::max<std::int64_t>(0, meta.value("forks_count", 0));

        // Raw media type: the README arrives as plain markup, not base64.
        Response readme = request(base + "/readme", {{"Accept", "application/vnd.github.raw"}});
        if (readme.status == 200) repo.readme = readme.body;

        if (auto topics = request_json_optional(base + "/topics")) {
            if (topics->contains("names")) {
                repo.topics = (*topics)["names"].get<std::vector<std::string>>();
            }
        }

        if (auto languages = request_json_optional(base + "/languages")) {
            for (auto it = languages->begin(); it != languages->end(); ++it) {
                std::int64_t bytes = it.value().is_number() ? it.value().get<std::int64_t>() : 0;
                repo.languages[it.key()] = std::max<std::int64_t>(0, bytes);
            }
        }

        for (const auto& item : paginate(base + "/labels")) {
            if (item.contains("name")) repo.labels.push_back(item["name"].get<std::string>());
        }

        for (const auto& item : paginate(base + "/contributors?anon=0")) {
            if (!item.contains("login")) continue;
            std::int64_t commits = std::max<std::int64_t>(0, item.value("contributions", 0));
            repo.contributors.emplace_back(item["login"].get<std::string>(), commits);
        }
        std::stable_sort(repo.contributors.begin(), repo.contributors.end(),
                         [](const auto& a, const auto& b) {
                             if (a.second != b.second) return a.second > b.second;
                             return a.first < b.first;
                         });

        if (auto contents = request_json_optional(base + "/contents/")) {
            if (contents->is_array()) {
                for (const auto& item : *contents) {
                    if (item.contains("name")) {
                        repo.root_entries.push_back(item["name"].get<std::string>());
                    }
                }
            }
        }

        if (auto workflows = request_json_optional(base + "/contents/.github/workflows")) {
            if (workflows->is_array()) {
                for (const auto& item : *workflows) {
                    if (item.value("type", "") == "file") {
                        repo.has_workflow_files = true;
                        break;
                    }
                }
            }
        }

        repo.releases = static_cast<std::int64_t>(paginate(base + "/releases").size());
        repo.fetched_at = now_utc();
        return repo;
    }

    std::vector<CommitRecord> fetch_commits_from_api(const RepoRef& ref) {
        const std::string base = "/repos/" + ref.owner + "/" + ref.name + "/commits";
        std::vector<CommitRecord> commits;
        std::set<std::string> seen;
        int page = 1;
        for (;; ++page) {
            json chunk;
            try {
                chunk = request_json(base + "?per_page=" + std::to_string(per_page) +
                                     "&page=" + std::to_string(page));
            } catch (const TransportError& e) {
                if (page > 1) {
                    throw TruncatedHistoryError("commit pagination aborted at page " +
                                                std::to_string(page) + ": " + e.what());
                }
                throw;
            }
            if (!chunk.is_array()) throw TransportError("expected a commit array from " + base);
            for (const auto& item : chunk) {
                CommitRecord c;
                c.sha = item.value("sha", "");
                if (c.sha.empty() || !seen.insert(c.sha).second) continue;  // page overlap
                const json& commit = item.value("commit", json::object());
                c.message = commit.value("message", "");
                if (item.contains("author") && item["author"].is_object() &&
                    item["author"].contains("login")) {
                    c.author_id = item["author"]["login"].get<std::string>();
                } else {
                    const json& author = commit.value("author", json::object());
                    c.author_id = anonymous_author_id(author.value("name", ""),
                                                      author.value("email", ""));
                }
                if (commit.contains("author") && commit["author"].is_object() &&
                    commit["author"].contains("date")) {
                    c.authored_at = parse_iso8601(commit["author"]["date"].get<std::string>());
                }
                commits.push_back(std::move(c));
            }
            if (chunk.size() < static_cast<size_t>(per_page)) break;
            if (page > 100000) throw TruncatedHistoryError("commit pagination did not terminate");
        }
        return commits;
    }
};

GithubClient::GithubClient(ClientOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

GithubClient::~GithubClient() = default;

RawRepo GithubClient::fetch_repo(const RepoRef& ref) {
    auto cache = impl_->cache();
    if (cache && !impl_->options.refresh_cache) {
        try {
            if (auto cached = cache_load_repo(*cache, ref)) return *cached;
        } catch (const CorruptCacheError&) {
            // entry already evicted; fall through to a fresh fetch
        }
    }
    RawRepo repo = impl_->fetch_repo_from_api(ref);
    if (cache) cache_store_repo(*cache, repo);
    return repo;
}

std::vector<CommitRecord> GithubClient::fetch_commits(const RepoRef& ref) {
    auto cache = impl_->cache();
    if (cache && !impl_->options.refresh_cache) {
        try {
            if (auto cached = cache_load_commits(*cache, ref)) return *cached;
        } catch (const CorruptCacheError&) {
        }
    }
    std::vector<CommitRecord> commits = impl_->fetch_commits_from_api(ref);
    if (cache) cache_store_commits(*cache, ref, commits);
    return commits;
}

void GithubClient::for_each_commit(const RepoRef& ref,
                                   const std::function<bool(const CommitRecord&)>& fn) {
    for (const auto& commit : fetch_commits(ref)) {
        if (!fn(commit)) return;
    }
}

RateBudget GithubClient::rate_budget() const {
    std::lock_guard<std::mutex> lock(impl_->budget_mutex);
    return impl_->budget;
}

}  // namespace repodomain
