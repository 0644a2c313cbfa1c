#include "repodomain/bundle.hpp"

#include <fstream>
#include <sstream>

#include "repodomain/sha256.hpp"

namespace repodomain {

namespace {
constexpr int kBundleSchemaVersion = 1;
constexpr const char* kBundleFormat = "repodomain-bundle";
}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& path) {
    nlohmann::json payload;
    payload["pipeline"] = bundle.pipeline.to_json();
    payload["model"] = bundle.model.to_json();
    payload["provenance"] = bundle.provenance;
    const std::string payload_text = payload.dump();

    nlohmann::json header;
    header["format"] = kBundleFormat;
    header["schema_version"] = kBundleSchemaVersion;
    header["sha256"] = sha256_hex(payload_text);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << header.dump() << "\n" << payload_text;
    if (!out) throw IoError("failed writing bundle to '" + path + "'");
}

ModelBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open bundle '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    auto newline = content.find('\n');
    if (newline == std::string::npos) {
        throw ChecksumMismatchError("bundle '" + path + "' is truncated before its payload");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(content.substr(0, newline));
    } catch (const nlohmann::json::exception&) {
        throw SchemaMismatchError("bundle '" + path + "' has a malformed header");
    }
    if (!header.contains("format") || header["format"] != kBundleFormat) {
        throw SchemaMismatchError("'" + path + "' is not a repodomain bundle");
    }
    if (header.at("schema_version").get<int>() != kBundleSchemaVersion) {
        throw SchemaMismatchError("unsupported bundle schema_version " +
                                  header.at("schema_version").dump() + " (expected " +
                                  std::to_string(kBundleSchemaVersion) + ")");
    }

    const std::string payload_text = content.substr(newline + 1);
    if (sha256_hex(payload_text) != header.at("sha256").get<std::string>()) {
        throw ChecksumMismatchError("bundle payload checksum mismatch for '" + path + "'");
    }

    nlohmann::json payload;
    try {
        payload = nlohmann::json::parse(payload_text);
    } catch (const nlohmann::json::exception&) {
        throw ChecksumMismatchError("bundle payload is not valid JSON despite checksum");
    }
    ModelBundle bundle;
    bundle.pipeline = FeaturePipeline::from_json(payload.at("pipeline"));
    bundle.model = GbdtModel::from_json(payload.at("model"));
    bundle.provenance = payload.value("provenance", nlohmann::json::object());
    return bundle;
}

}  // namespace repodomain
