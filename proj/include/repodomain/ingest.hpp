#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "repodomain/common.hpp"

namespace repodomain {

// Everything the classifier consumes about one repository, as returned by
// the GitHub REST API. Absent README/description/licence stay absent; they
// are never coerced to "".
struct RawRepo {
    RepoRef ref;
    std::optional<std::string> description;
    std::optional<std::string> readme;  // raw markup
    std::vector<std::string> topics;
    std::optional<std::string> licence_key;
    std::map<std::string, std::int64_t> languages;  // language -> byte count
    std::vector<std::string> labels;
    std::vector<std::pair<std::string, std::int64_t>> contributors;  // sorted by commits desc
    std::vector<std::string> root_entries;
    std::int64_t releases = 0;
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    bool has_workflow_files = false;
    std::int64_t fetched_at = 0;  // UTC seconds

    bool operator==(const RawRepo&) const = default;
};

struct CommitRecord {
    std::string sha;        // 40-hex, unique within a repository
    std::string author_id;  // login when known, otherwise hashed name+email
    std::string message;
    std::int64_t authored_at = 0;  // UTC seconds

    bool operator==(const CommitRecord&) const = default;
};

struct RateBudget {
    std::int64_t remaining = -1;  // -1: not yet observed
    std::int64_t reset_at = 0;
    int max_concurrent = 4;
};

// Stable author identity for commits without a GitHub login.
std::string anonymous_author_id(const std::string& name, const std::string& email);

// ---------------------------------------------------------------------------
// On-disk cache: cache/<owner>__<name>/<resource>.json plus a .sha256 sidecar.
// Safe for concurrent readers; one writer per (ref, resource) key.
// ---------------------------------------------------------------------------

class CacheStore {
public:
    explicit CacheStore(std::string root_dir);

    bool has(const RepoRef& ref, const std::string& resource) const;
    // Returns the cached JSON text; throws CorruptCache (and evicts the entry)
    // when the checksum sidecar does not match.
    std::optional<std::string> load(const RepoRef& ref, const std::string& resource) const;
    void store(const RepoRef& ref, const std::string& resource, const std::string& json_text) const;
    void evict(const RepoRef& ref, const std::string& resource) const;

    const std::string& root() const { return root_; }

private:
    std::string entry_path(const RepoRef& ref, const std::string& resource) const;
    std::string root_;
};

// Typed cache round-trips used both by the client and directly by callers.
void cache_store_repo(const CacheStore& cache, const RawRepo& repo);
std::optional<RawRepo> cache_load_repo(const CacheStore& cache, const RepoRef& ref);
void cache_store_commits(const CacheStore& cache, const RepoRef& ref,
                         const std::vector<CommitRecord>& commits);
std::optional<std::vector<CommitRecord>> cache_load_commits(const CacheStore& cache,
                                                            const RepoRef& ref);

// JSON (de)serialization, shared by the cache and by tests.
std::string raw_repo_to_json(const RawRepo& repo);
RawRepo raw_repo_from_json(const std::string& text);
std::string commits_to_json(const std::vector<CommitRecord>& commits);
std::vector<CommitRecord> commits_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// GitHub REST v3 client
// ---------------------------------------------------------------------------

struct ClientOptions {
    std::string base_url = "https://api.github.com";
    std::optional<std::string> auth_token;  // falls back to $REPODOMAIN_GITHUB_TOKEN
    std::optional<std::string> cache_dir;
    bool refresh_cache = false;   // ignore warm entries, refetch
    bool offline = false;         // cache only, never touch the network
    bool wait_on_rate_limit = false;
    int max_retries = 3;
    int retry_backoff_ms = 500;   // doubled per attempt
    int max_concurrent = 4;
    int per_page = 100;           // API page size
};

class GithubClient {
public:
    explicit GithubClient(ClientOptions options);
    ~GithubClient();

    GithubClient(const GithubClient&) = delete;
    GithubClient& operator=(const GithubClient&) = delete;

    // Assembles a RawRepo from the repo/readme/topics/languages/labels/
    // contributors/contents/releases endpoints. Served from cache when warm.
    RawRepo fetch_repo(const RepoRef& ref);

    // Streams every reachable commit on the default branch, newest first,
    // de-duplicated by sha. The callback returns false to stop early.
    void for_each_commit(const RepoRef& ref, const std::function<bool(const CommitRecord&)>& fn);
    std::vector<CommitRecord> fetch_commits(const RepoRef& ref);

    RateBudget rate_budget() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace repodomain
