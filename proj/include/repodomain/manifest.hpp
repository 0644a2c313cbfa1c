#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace repodomain {

// One manifest per run, written next to the run's outputs. Timestamps live
// here and only here, so data outputs stay byte-reproducible.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string tool_version;
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
    std::vector<std::string> failures;  // per-repo failures in batch runs

    // Writes run_manifest.json into the directory containing `output_path`.
    void write_next_to(const std::string& output_path) const;
};

}  // namespace repodomain
