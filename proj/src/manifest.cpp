#include "repodomain/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "repodomain/common.hpp"

namespace fs = std::filesystem;

namespace repodomain {

void RunManifest::write_next_to(const std::string& output_path) const {
    fs::path dir = fs::path(output_path).parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["tool_version"] = tool_version;
    j["started_at"] = format_iso8601(started_at);
    j["finished_at"] = format_iso8601(finished_at);
    j["failures"] = failures;
    const std::string path = (dir / "run_manifest.json").string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace repodomain
