#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "agg/selectors.hpp"
#include "agg/space.hpp"

namespace agg {

enum class Scenario { RandomSpikes, HeadNonzero };

std::string to_string(Scenario s);  // "i" / "ii"
Scenario scenario_from_string(const std::string& s);

inline constexpr std::size_t kCollectionSize = 20;
inline constexpr std::array<std::size_t, 10> kProjectionOrders = {5,   10,  20,  50,  100,
                                                                  200, 300, 500, 700, 800};
/// t_j = n^{a_j}; thresholds are eps1 sqrt(2 ln(n / t_j)).
inline constexpr std::array<double, 10> kThresholdExponents = {
    0.0, 1.0 / 4, 1.0 / 2, 3.0 / 4, 5.0 / 6, 7.0 / 8, 9.0 / 10, 15.0 / 16, 31.0 / 32, 63.0 / 64};

struct ScenarioConfig {
  Scenario scenario = Scenario::RandomSpikes;
  std::size_t n = 1000;
  std::vector<std::size_t> K = {5, 50, 250, 500};
  double spike_value = 2.0;
  double eps1 = 0.5;
  double eps2 = 1.0;
  std::size_t reps = 100;
  std::uint64_t base_seed = 20090101;
  Rule rule = Rule::Tilde;
  double p = 2.0;
  std::optional<double> delta;  // defaults to eps2, clamped into (0, 1)
  std::size_t threads = 0;      // 0: AGG_THREADS or hardware concurrency

  /// Throws ConfigError on invalid fields.
  void validate() const;
};

std::vector<std::size_t> default_sparsities(Scenario s);

/// K coordinates chosen uniformly without replacement set to `value`.
Vector gen_scenario_i(std::size_t n, std::size_t K, double value, std::mt19937_64& rng);

/// First K coordinates iid N(0, 1), the rest zero.
Vector gen_scenario_ii(std::size_t n, std::size_t K, std::mt19937_64& rng);

double threshold_level(double eps1, std::size_t n, std::size_t j);

/// Members 0-9: projections onto the first ord_j coordinates of y1 (ord
/// clamped to n). Members 10-19: hard thresholding of y1. May contain
/// duplicates.
EstimatorFamily build_collection(ConstSpan y1, double eps1, std::size_t n);

/// Distinct members of a family with the lowest original label kept.
struct CollapsedFamily {
  EstimatorFamily unique;
  std::vector<std::size_t> label_of;   // unique index -> lowest original label
  std::vector<std::size_t> unique_of;  // original label -> unique index
};

CollapsedFamily collapse_duplicates(const EstimatorFamily& family);

struct ReplicationRecord {
  std::size_t rep_index = 0;
  std::size_t K = 0;
  std::size_t chosen_index = 0;  // 0-based label in the 20-member collection
  std::size_t chosen_rank = 1;   // 1 = smallest realized risk
  double risk_selected = 0.0;
  double risk_oracle = 0.0;
  double risk_best_projection = 0.0;
  double risk_best_thresholding = 0.0;
  std::size_t nnz_selected = 0;
  std::vector<double> risks;    // realized risk of every label
  double thm7_remainder = 0.0;  // oracle-inequality remainder for this draw
  std::size_t distinct_members = 0;
};

/// One replication for sparsity K; the seed is derived from
/// (base_seed, scenario, K, rep_index).
ReplicationRecord run_replication(const ScenarioConfig& cfg, std::size_t K, std::size_t rep_index);

/// Replication with the truth and both samples supplied by the caller.
ReplicationRecord run_replication_on(const ScenarioConfig& cfg, ConstSpan truth, ConstSpan y1,
                                     ConstSpan y2);

struct RankStatistics {
  std::vector<std::size_t> rank_histogram;    // index r -> count of rank r + 1
  std::vector<std::size_t> selection_counts;  // index = label
  std::vector<double> mean_risk;              // index = label
};

RankStatistics rank_statistics(const std::vector<ReplicationRecord>& records);

struct SummaryRow {
  std::size_t K = 0;
  double oracle = 0.0;
  double aggregation = 0.0;
  double best_projection = 0.0;
  double best_thresholding = 0.0;
  double khat = 0.0;
  double thm7_remainder = 0.0;
  RankStatistics ranks;
};

struct ExperimentSummary {
  Scenario scenario = Scenario::RandomSpikes;
  Rule rule = Rule::Tilde;
  double p = 2.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<SummaryRow> rows;
};

SummaryRow summarize(std::size_t K, const std::vector<ReplicationRecord>& records);

/// All (K, replication) units run in parallel; the summary is independent of
/// scheduling.
ExperimentSummary run_experiment(const ScenarioConfig& cfg);

}  // namespace agg
