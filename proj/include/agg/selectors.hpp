#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "agg/calibration.hpp"
#include "agg/probes.hpp"
#include "agg/space.hpp"

namespace agg {

enum class Rule { Hat, Tilde, L2Exact };

std::string to_string(Rule rule);
Rule rule_from_string(const std::string& s);

/// Delta_i(psi) = <psi, Y>_w - <psi, mu_i>_w for every member i and probe psi.
class DiscrepancyTable {
 public:
  DiscrepancyTable(std::size_t members, std::size_t probes)
      : members_(members), probes_(probes), data_(members * probes) {}

  std::size_t members() const { return members_; }
  std::size_t probes() const { return probes_; }
  double& at(std::size_t i, std::size_t k) { return data_[i * probes_ + k]; }
  double at(std::size_t i, std::size_t k) const { return data_[i * probes_ + k]; }

 private:
  std::size_t members_;
  std::size_t probes_;
  Vector data_;
};

DiscrepancyTable discrepancies(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                               const SpaceWeights& w);

struct Selection {
  Rule rule = Rule::Tilde;
  Vector scores;
  std::size_t chosen = 0;
  std::vector<std::size_t> ties;
};

/// Absolute tolerance within which scores count as tied at the minimum.
inline constexpr double kTieTolerance = 1e-10;

/// Argmin with the lowest index winning; ties collects every index within
/// kTieTolerance of the minimum.
Selection select_min(Rule rule, Vector scores);

/// M_i = max_psi (|Delta_i(psi)| - kappa eps |psi|_Sigma) / |psi|_q. The probe
/// set's cached sigma norms must correspond to noise.sigma.
Selection select_hat(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                     const NoiseSpec& noise, const Calibration& calib, const NormSpec& norms,
                     const SpaceWeights& w);

/// M_i = max_psi |Delta_i(psi)| / |psi|_q; needs neither eps nor Sigma.
Selection select_tilde(ConstSpan y, const EstimatorFamily& family, const ProbeSet& set,
                       const NormSpec& norms, const SpaceWeights& w);

/// M_i = max_{j != i} <psi_ij, u_ij - Y>_w with psi_ij the unit direction of
/// mu_i - mu_j and u_ij the midpoint.
Selection select_l2_exact(ConstSpan y, const EstimatorFamily& family, const SpaceWeights& w);

}  // namespace agg
