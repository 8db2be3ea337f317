#include "agg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "agg/calibration.hpp"
#include "agg/diagnostics.hpp"
#include "agg/errors.hpp"
#include "agg/parallel.hpp"
#include "agg/probes.hpp"
#include "agg/rng.hpp"

namespace agg {

std::string to_string(Scenario s) { return s == Scenario::RandomSpikes ? "i" : "ii"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "i" || s == "1") return Scenario::RandomSpikes;
  if (s == "ii" || s == "2") return Scenario::HeadNonzero;
  throw ConfigError("unknown scenario '" + s + "' (expected i or ii)");
}

std::vector<std::size_t> default_sparsities(Scenario s) {
  if (s == Scenario::RandomSpikes) return {5, 50, 250, 500};
  return {10, 50, 250, 500};
}

void ScenarioConfig::validate() const {
  if (n == 0) throw ConfigError("n must be positive");
  if (K.empty()) throw ConfigError("at least one K required");
  for (std::size_t k : K) {
    if (k > n) throw ConfigError("K = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ConfigError("eps1 and eps2 must be positive");
  if (reps < 1) throw ConfigError("reps must be at least 1");
  if (std::isnan(p) || p < 1.0) throw ConfigError("p must lie in [1, inf]");
  if (delta && !(*delta > 0.0 && *delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

Vector gen_scenario_i(std::size_t n, std::size_t K, double value, std::mt19937_64& rng) {
  if (K > n) throw DomainError("gen_scenario_i: K exceeds n");
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  // Partial Fisher-Yates: the first K slots become a uniform K-subset.
  for (std::size_t k = 0; k < K; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(index[k], index[pick(rng)]);
  }
  Vector mu(n, 0.0);
  for (std::size_t k = 0; k < K; ++k) mu[index[k]] = value;
  return mu;
}

Vector gen_scenario_ii(std::size_t n, std::size_t K, std::mt19937_64& rng) {
  if (K > n) throw DomainError("gen_scenario_ii: K exceeds n");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector mu(n, 0.0);
  for (std::size_t k = 0; k < K; ++k) mu[k] = normal(rng);
  return mu;
}

double threshold_level(double eps1, std::size_t n, std::size_t j) {
  return eps1 * std::sqrt(2.0 * (1.0 - kThresholdExponents.at(j)) * std::log(static_cast<double>(n)));
}

EstimatorFamily build_collection(ConstSpan y1, double eps1, std::size_t n) {
  if (y1.size() != n) throw DimensionError("build_collection: y1 length differs from n");
  std::vector<Vector> members;
  members.reserve(kCollectionSize);
  for (std::size_t ord : kProjectionOrders) {
    Vector m(n, 0.0);
    std::copy_n(y1.begin(), std::min(ord, n), m.begin());
    members.push_back(std::move(m));
  }
  for (std::size_t j = 0; j < kThresholdExponents.size(); ++j) {
    const double thr = threshold_level(eps1, n, j);
    Vector m(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(y1[k]) >= thr) m[k] = y1[k];
    }
    members.push_back(std::move(m));
  }
  return EstimatorFamily(std::move(members));
}

CollapsedFamily collapse_duplicates(const EstimatorFamily& family) {
  CollapsedFamily out;
  std::map<Vector, std::size_t> seen;
  std::vector<Vector> unique;
  out.unique_of.resize(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto [it, inserted] = seen.emplace(family[i], unique.size());
    if (inserted) {
      unique.push_back(family[i]);
      out.label_of.push_back(i);
    }
    out.unique_of[i] = it->second;
  }
  out.unique = EstimatorFamily(std::move(unique), family.bound_L);
  return out;
}

namespace {

std::uint64_t replication_seed(const ScenarioConfig& cfg, std::size_t K, std::size_t rep) {
  std::uint64_t s = derive_seed(cfg.base_seed, cfg.scenario == Scenario::RandomSpikes ? 1 : 2);
  s = derive_seed(s, K);
  return derive_seed(s, rep);
}

}  // namespace

ReplicationRecord run_replication_on(const ScenarioConfig& cfg, ConstSpan truth, ConstSpan y1,
                                     ConstSpan y2) {
  const std::size_t n = cfg.n;
  const SpaceWeights w = SpaceWeights::unit(n);
  EstimatorFamily collection = build_collection(y1, cfg.eps1, n);
  CollapsedFamily collapsed = collapse_duplicates(collection);
  const EstimatorFamily& family = collapsed.unique;

  ReplicationRecord rec;
  rec.distinct_members = family.size();
  rec.risks.resize(collection.size());
  for (std::size_t i = 0; i < collection.size(); ++i) {
    rec.risks[i] = weighted_p_norm(subtract(collection[i], truth), w, cfg.p);
  }

  std::size_t chosen_unique = 0;
  if (family.size() > 1) {
    NoiseSpec noise{cfg.eps2, Covariance::identity(n)};
    const NormSpec norms = NormSpec::from_p(cfg.p);
    const Calibration* calib_ptr = nullptr;
    Calibration calib;
    std::optional<ProbeSet> set;
    if (cfg.rule != Rule::L2Exact) {
      ProbeKind kind = std::isinf(cfg.p) ? ProbeKind::Hat : ProbeKind::Tilde;
      set = build_probe_set(family, w, cfg.p, kind, std::nullopt, &noise.sigma);
      calib = calibrate_analytic(*set, clamp_delta(cfg.delta.value_or(cfg.eps2)));
      calib_ptr = &calib;
    }
    Selection sel;
    switch (cfg.rule) {
      case Rule::Tilde: sel = select_tilde(y2, family, *set, norms, w); break;
      case Rule::Hat: sel = select_hat(y2, family, *set, noise, calib, norms, w); break;
      case Rule::L2Exact: sel = select_l2_exact(y2, family, w); break;
    }
    chosen_unique = sel.chosen;
    if (set) {
      BoundInputs in{&family, truth, &noise, calib_ptr, &*set, norms, &w};
      rec.thm7_remainder = bound_terms(BoundKind::Thm7, in).remainder;
    }
  }

  rec.chosen_index = collapsed.label_of[chosen_unique];
  rec.risk_selected = rec.risks[rec.chosen_index];
  rec.risk_oracle = *std::min_element(rec.risks.begin(), rec.risks.end());
  rec.risk_best_projection = *std::min_element(rec.risks.begin(), rec.risks.begin() + 10);
  rec.risk_best_thresholding = *std::min_element(rec.risks.begin() + 10, rec.risks.end());
  rec.chosen_rank = 1;
  for (std::size_t i = 0; i < rec.risks.size(); ++i) {
    if (rec.risks[i] < rec.risk_selected ||
        (rec.risks[i] == rec.risk_selected && i < rec.chosen_index)) {
      ++rec.chosen_rank;
    }
  }
  const Vector& chosen = collection[rec.chosen_index];
  rec.nnz_selected = static_cast<std::size_t>(
      std::count_if(chosen.begin(), chosen.end(), [](double x) { return x != 0.0; }));
  return rec;
}

ReplicationRecord run_replication(const ScenarioConfig& cfg, std::size_t K, std::size_t rep_index) {
  cfg.validate();
  if (K > cfg.n) throw ConfigError("K exceeds n");
  auto rng = make_rng(replication_seed(cfg, K, rep_index));
  Vector truth = cfg.scenario == Scenario::RandomSpikes
                     ? gen_scenario_i(cfg.n, K, cfg.spike_value, rng)
                     : gen_scenario_ii(cfg.n, K, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y1(truth), y2(truth);
  for (double& x : y1) x += cfg.eps1 * normal(rng);
  for (double& x : y2) x += cfg.eps2 * normal(rng);

  ReplicationRecord rec = run_replication_on(cfg, truth, y1, y2);
  rec.rep_index = rep_index;
  rec.K = K;
  return rec;
}

RankStatistics rank_statistics(const std::vector<ReplicationRecord>& records) {
  if (records.empty()) throw DomainError("rank_statistics: no records");
  RankStatistics st;
  st.rank_histogram.assign(kCollectionSize, 0);
  st.selection_counts.assign(kCollectionSize, 0);
  st.mean_risk.assign(kCollectionSize, 0.0);
  for (const auto& rec : records) {
    ++st.rank_histogram.at(rec.chosen_rank - 1);
    ++st.selection_counts.at(rec.chosen_index);
    for (std::size_t i = 0; i < kCollectionSize; ++i) st.mean_risk[i] += rec.risks.at(i);
  }
  for (double& r : st.mean_risk) r /= static_cast<double>(records.size());
  return st;
}

SummaryRow summarize(std::size_t K, const std::vector<ReplicationRecord>& records) {
  SummaryRow row;
  row.K = K;
  row.ranks = rank_statistics(records);
  const double count = static_cast<double>(records.size());
  for (const auto& rec : records) {
    row.oracle += rec.risk_oracle;
    row.aggregation += rec.risk_selected;
    row.best_projection += rec.risk_best_projection;
    row.best_thresholding += rec.risk_best_thresholding;
    row.khat += static_cast<double>(rec.nnz_selected);
    row.thm7_remainder += rec.thm7_remainder;
  }
  row.oracle /= count;
  row.aggregation /= count;
  row.best_projection /= count;
  row.best_thresholding /= count;
  row.khat /= count;
  row.thm7_remainder /= count;
  return row;
}

ExperimentSummary run_experiment(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t units = cfg.K.size() * cfg.reps;
  std::vector<ReplicationRecord> records(units);
  parallel_for(
      units,
      [&](std::size_t u) {
        records[u] = run_replication(cfg, cfg.K[u / cfg.reps], u % cfg.reps);
      },
      cfg.threads);

  ExperimentSummary summary;
  summary.scenario = cfg.scenario;
  summary.rule = cfg.rule;
  summary.p = cfg.p;
  summary.n = cfg.n;
  summary.reps = cfg.reps;
  summary.base_seed = cfg.base_seed;
  for (std::size_t k = 0; k < cfg.K.size(); ++k) {
    std::vector<ReplicationRecord> batch(records.begin() + k * cfg.reps,
                                         records.begin() + (k + 1) * cfg.reps);
    summary.rows.push_back(summarize(cfg.K[k], batch));
  }
  return summary;
}

}  // namespace agg
