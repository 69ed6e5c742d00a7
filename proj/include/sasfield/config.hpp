// Experiment configuration documents.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sasfield/lattice.hpp"
#include "sasfield/point_process.hpp"

namespace sasfield {

/// Schema:
///   groupSpec        {d: int >= 1, kernelGens: [[int; d], ...]}     required
///   masterSeed       unsigned 64-bit integer                        required
///   kernelModel      see kernel_model_from_json                     optional
///   nList            increasing positive integers                   optional
///   replicates       non-negative integer                           optional
///   truncationIndex  positive integer, default 1000                 optional
///   gSuite           [{a, width, beta}] or [[a, width, beta]]       optional
///   outputDir        string, default "."                            optional
///   diagnostics      {delta > 0, epsilon > 0}                       optional
struct ExperimentConfig {
    GroupSpec group;
    std::uint64_t master_seed = 0;
    std::optional<nlohmann::json> kernel_model;
    std::vector<std::int64_t> radii;
    std::optional<std::size_t> replicates;
    std::size_t truncation_index = 1000;
    std::vector<TestFunction> g_suite;
    std::string output_dir = ".";
    ScalingOptions diagnostics;
    /// The document as given, echoed into reports.
    nlohmann::json document;
};

/// Throws ConfigError on any schema violation.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; unreadable files and malformed JSON throw ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

}  // namespace sasfield
