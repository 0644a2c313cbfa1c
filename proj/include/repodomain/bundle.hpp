#pragma once

#include <string>

#include <json.hpp>

#include "repodomain/features.hpp"
#include "repodomain/gbdt.hpp"

namespace repodomain {

// Self-describing single-file artifact: fitted feature pipeline, trained
// model, and config provenance, protected by a sha256 checksum. Contains no
// timestamps so identical inputs produce identical bytes.
struct ModelBundle {
    FeaturePipeline pipeline;
    GbdtModel model;
    nlohmann::json provenance;
};

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace repodomain
