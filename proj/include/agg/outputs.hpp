#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agg/config.hpp"
#include "agg/selectors.hpp"
#include "agg/simulation.hpp"

namespace agg {

// External estimator indices and ranks are 1-based; internal ones are 0-based.

/// scenario,K,oracle,aggregation,best_projection,best_thresholding,khat with
/// three decimals.
std::string summary_csv(const ExperimentSummary& s);
/// K,rank,count.
std::string ranks_csv(const ExperimentSummary& s);
/// K,estimator_index,count,mean_risk.
std::string selections_csv(const ExperimentSummary& s);

nlohmann::json to_json(const ExperimentSummary& s);
ExperimentSummary summary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Selection& s);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Writes summary.csv, ranks.csv, selections.csv and/or summary.json into dir.
void write_outputs(const ExperimentSummary& s, const std::filesystem::path& dir, OutputFormat fmt);

/// Rows of numbers; a first row that does not parse as numbers is a header.
std::vector<Vector> read_vectors_csv(const std::filesystem::path& path);

}  // namespace agg
