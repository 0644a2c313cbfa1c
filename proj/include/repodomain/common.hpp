#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace repodomain {

inline constexpr const char* kToolVersion = "0.1.0";

// Every domain error carries a stable code that the CLI prints verbatim,
// so scripts can match on it.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& m) : Error("NotFound", m) {}
};
struct RateLimitedError : Error {
    RateLimitedError(const std::string& m, std::int64_t reset_at_utc)
        : Error("RateLimited", m), reset_at(reset_at_utc) {}
    std::int64_t reset_at;
};
struct AuthFailedError : Error {
    explicit AuthFailedError(const std::string& m) : Error("AuthFailed", m) {}
};
struct TransportError : Error {
    explicit TransportError(const std::string& m) : Error("Transport", m) {}
};
struct TruncatedHistoryError : Error {
    explicit TruncatedHistoryError(const std::string& m) : Error("TruncatedHistory", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("Io", m) {}
};
struct CorruptCacheError : Error {
    explicit CorruptCacheError(const std::string& m) : Error("CorruptCache", m) {}
};
struct SchemaMismatchError : Error {
    explicit SchemaMismatchError(const std::string& m) : Error("SchemaMismatch", m) {}
};
struct ChecksumMismatchError : Error {
    explicit ChecksumMismatchError(const std::string& m) : Error("ChecksumMismatch", m) {}
};
struct EmptyDatasetError : Error {
    explicit EmptyDatasetError(const std::string& m) : Error("EmptyDataset", m) {}
};
struct DegenerateLabelsError : Error {
    explicit DegenerateLabelsError(const std::string& m) : Error("DegenerateLabels", m) {}
};
struct NonFiniteInputError : Error {
    explicit NonFiniteInputError(const std::string& m) : Error("NonFiniteInput", m) {}
};
struct TooFewSamplesError : Error {
    explicit TooFewSamplesError(const std::string& m) : Error("TooFewSamples", m) {}
};
struct TooFewPointsError : Error {
    explicit TooFewPointsError(const std::string& m) : Error("TooFewPoints", m) {}
};
struct EmptySampleError : Error {
    explicit EmptySampleError(const std::string& m) : Error("EmptySample", m) {}
};
struct DegenerateTableError : Error {
    explicit DegenerateTableError(const std::string& m) : Error("DegenerateTable", m) {}
};
struct MissingEmbeddingError : Error {
    explicit MissingEmbeddingError(const std::string& m) : Error("MissingEmbedding", m) {}
};
struct EmptyVocabularyError : Error {
    explicit EmptyVocabularyError(const std::string& m) : Error("EmptyVocabulary", m) {}
};
struct BudgetTooSmallError : Error {
    explicit BudgetTooSmallError(const std::string& m) : Error("BudgetTooSmall", m) {}
};

// Canonical repository identifier, "owner/name".
struct RepoRef {
    std::string owner;
    std::string name;

    RepoRef() = default;
    RepoRef(std::string owner_, std::string name_);

    static RepoRef parse(const std::string& full_name);

    std::string full_name() const { return owner + "/" + name; }
    // Directory-safe key used by the on-disk cache.
    std::string cache_key() const { return owner + "__" + name; }

    bool operator==(const RepoRef& other) const = default;
    auto operator<=>(const RepoRef& other) const = default;
};

// --- small string helpers shared across modules ---

std::string to_lower(std::string s);
std::string trim(const std::string& s);
std::string collapse_whitespace(const std::string& s);
// Lowercased alphanumeric tokens, split on everything else.
std::vector<std::string> tokenize(const std::string& text);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// --- UTC timestamps (seconds since epoch) ---

std::int64_t now_utc();
std::string format_iso8601(std::int64_t seconds_since_epoch);
// Accepts "YYYY-MM-DDTHH:MM:SSZ"; throws IoError on malformed input.
std::int64_t parse_iso8601(const std::string& text);

}  // namespace repodomain
