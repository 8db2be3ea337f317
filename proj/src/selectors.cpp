#include "agg/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agg/errors.hpp"

namespace agg {

namespace {

void check_norms(const ProbeSet& set, const NormSpec& norms) {
  if (set.size() == 0) throw ConfigError("selection: empty probe set");
  if (norms.p != set.p) {
    throw ConfigError("selection: norm exponent does not match the probe set target");
  }
}

}  // namespace

std::string to_string(Rule rule) {
  switch (rule) {
    case Rule::Hat: return "hat";
    case Rule::Tilde: return "tilde";
    case Rule::L2Exact: return "l2exact";
  }
  return "unknown";
}

Rule rule_from_string(const std::string& s) {
  if (s == "hat") return Rule::Hat;
  if (s == "tilde") return Rule::Tilde;
  if (s == "l2exact" || s == "l2_exact") return Rule::L2Exact;
  throw ConfigError("unknown rule '" + s + "' (expected hat, tilde or l2exact)");
}

DiscrepancyTable discrepancies(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                               const SpaceWeights& w) {
  if (y.size() != w.size() || family.dim() != w.size()) {
    throw DimensionError("discrepancies: dimension mismatch");
  }
  DiscrepancyTable table(family.size(), set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Vector& psi = set.probes[k].psi;
    const double empirical = weighted_inner(psi, y, w);
    for (std::size_t i = 0; i < family.size(); ++i) {
      table.at(i, k) = empirical - weighted_inner(psi, family[i], w);
    }
  }
  return table;
}

Selection select_min(Rule rule, Vector scores) {
  if (scores.empty()) throw ConfigError("selection: no candidates");
  Selection s;
  s.rule = rule;
  s.scores = std::move(scores);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.scores[i] < best) {
      best = s.scores[i];
      s.chosen = i;
    }
  }
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.scores[i] <= best + kTieTolerance) s.ties.push_back(i);
  }
  // The lowest index within tolerance wins, not the strict first minimum.
  s.chosen = s.ties.front();
  return s;
}

Selection select_hat(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                     const NoiseSpec& noise, const Calibration& calib, const NormSpec& norms,
                     const SpaceWeights& w) {
  check_norms(set, norms);
  DiscrepancyTable table = discrepancies(y, family, set, w);
  const double shift = calib.kappa * noise.eps;
  Vector scores(family.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t k = 0; k < set.size(); ++k) {
      const Probe& probe = set.probes[k];
      double v = (std::abs(table.at(i, k)) - shift * probe.sigma_norm) / probe.norm_q;
      scores[i] = std::max(scores[i], v);
    }
  }
  return select_min(Rule::Hat, std::move(scores));
}

Selection select_tilde(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                       const NormSpec& norms, const SpaceWeights& w) {
  check_norms(set, norms);
  DiscrepancyTable table = discrepancies(y, family, set, w);
  Vector scores(family.size(), 0.0);
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t k = 0; k < set.size(); ++k) {
      scores[i] = std::max(scores[i], std::abs(table.at(i, k)) / set.probes[k].norm_q);
    }
  }
  return select_min(Rule::Tilde, std::move(scores));
}

Selection select_l2_exact(ConstSpan y, const EstimatorFamily& family, const SpaceWeights& w) {
  if (family.size() < 2) throw ConfigError("select_l2_exact: at least two members required");
  ProbeSet set = build_probe_set(family, w, 2.0, ProbeKind::L2Midpoint);
  Vector scores(family.size(), -std::numeric_limits<double>::infinity());
  for (const Probe& probe : set.probes) {
    double v = weighted_inner(probe.psi, *probe.midpoint, w) - weighted_inner(probe.psi, y, w);
    scores[probe.i] = std::max(scores[probe.i], v);
  }
  return select_min(Rule::L2Exact, std::move(scores));
}

}  // namespace agg
