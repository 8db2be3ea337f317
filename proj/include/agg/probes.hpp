#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "agg/space.hpp"

namespace agg {

enum class ProbeKind { Tilde, Hat, Bar, L2Midpoint };

std::string to_string(ProbeKind kind);
ProbeKind probe_kind_from_string(const std::string& s);

/// A probe vector psi for the directed pair (i, j), psi aimed at the
/// difference mu_i - mu_j, with its norms cached.
struct Probe {
  Vector psi;
  std::size_t i = 0;
  std::size_t j = 0;
  double norm_q = 0.0;      // weighted q-norm, q conjugate to the target p
  double norm_2 = 0.0;      // weighted 2-norm
  double sigma_norm = 0.0;  // sqrt(psi^T Sigma psi)
  std::optional<Vector> midpoint;  // (mu_i + mu_j) / 2, L2Midpoint only
};

/// Probe sets are indexed by ordered pairs; probes[k] belongs to pairs()[k]
/// in row-major order (i, j), i != j.
struct ProbeSet {
  ProbeKind kind = ProbeKind::Tilde;
  std::vector<Probe> probes;
  double gamma = 0.0;
  double p = 2.0;
  std::size_t family_size = 0;

  std::size_t size() const { return probes.size(); }
  double q() const { return conjugate_exponent(p); }

  /// Position of the probe for the directed pair (i, j).
  std::size_t index_of(std::size_t i, std::size_t j) const;

  double max_norm_q() const;
  double max_norm_2() const;
  double max_sigma_norm() const;
};

// Single-probe constructors. The Probe returned carries zero pair indices and
// sigma_norm computed against diag(w); build_probe_set fills both properly.

/// psi_k = |g_k|^{p-1} sign(g_k) / ||g||_p^{p-1}; needs p < inf.
Probe build_tilde_probe(ConstSpan g, const SpaceWeights& w, double p);

/// psi = (||g||_p / ||g||_2^2) g; any p in [1, inf].
Probe build_hat_probe(ConstSpan g, const SpaceWeights& w, double p);

/// psi_k = s_k sign(g_k) / sum_m w_m s_m with s_k = [|g_k| - ||g||_inf + gamma]_+.
Probe build_bar_probe(ConstSpan g, const SpaceWeights& w, double gamma);

/// psi = (mu_i - mu_j) / ||mu_i - mu_j||_2, midpoint (mu_i + mu_j) / 2.
Probe build_midpoint_probe(ConstSpan mu_i, ConstSpan mu_j, const SpaceWeights& w);

/// One probe per ordered pair of family members. `sigma` defaults to diag(w),
/// the covariance of the plain normal-means model (w = 1) and of the grid
/// white-noise model (w = 1/n). `gamma` is required for Bar and ignored
/// otherwise.
ProbeSet build_probe_set(const EstimatorFamily& family, const SpaceWeights& w, double p,
                         ProbeKind kind, std::optional<double> gamma = std::nullopt,
                         const Covariance* sigma = nullptr);

/// Recomputes sigma_norm of every probe against a new covariance.
void attach_covariance(ProbeSet& set, const Covariance& sigma);

struct GoodnessReport {
  double max_slack = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  double gamma = 0.0;
  bool pass = false;
};

/// max over pairs of |<psi_ij, mu_i - mu_j>_w - ||mu_i - mu_j||_p|; passes when
/// the slack does not exceed gamma + 1e-9.
GoodnessReport check_goodness(const ProbeSet& set, const EstimatorFamily& family,
                              const SpaceWeights& w, double p);

/// CSV with columns pair_i,pair_j,norm_q,norm_2,sigma_norm (0-based pairs).
std::string probe_set_csv(const ProbeSet& set);

}  // namespace agg
