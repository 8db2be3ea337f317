#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agg/calibration.hpp"
#include "agg/probes.hpp"
#include "agg/selectors.hpp"
#include "agg/space.hpp"

namespace agg {

/// argmin_i ||truth - mu_i||_p, lowest index on ties.
std::size_t oracle_index(const EstimatorFamily& family, ConstSpan truth, const SpaceWeights& w,
                         double p);

/// Norm-ratio quality factors of a family relative to its oracle member; every
/// maximum runs over g = mu_{i*} - mu_i, i != i*.
struct QualityFactors {
  double q1 = 1.0;      // [||g||_{2p-2} / ||g||_p]^{p-1} for 2 < p < inf, 1 for p <= 2
  double q2 = 0.0;      // ||g||_p ||g||_q / ||g||_2^2
  double q3 = 0.0;      // ||g||_p / ||g||_2
  double q4 = 0.0;      // ||S||_2 / ||S||_1, S = [|g| - ||g||_inf + gamma]_+
  double gamma = 0.0;   // the gamma q4 was evaluated at (0 when not requested)
  double q_cor5 = 1.0;  // normal-means factor: 1 for p >= 2, q1 formula for 1 < p < 2,
                        // sqrt(max support difference) at p = 1
  double k_p = 0.0;     // lower-bound factor: q3 (equals q1 on the block family)
};

/// q4 is computed only when gamma is given (gamma > 0). At p = inf, q1 is
/// reported as q3.
QualityFactors q_factors(const EstimatorFamily& family, std::size_t i_star, const SpaceWeights& w,
                         double p, std::optional<double> gamma = std::nullopt);

enum class BoundKind { Thm1, Thm4, Thm6, Thm7, Cor1, Cor2, Cor3, Cor5 };

std::string to_string(BoundKind kind);

/// rhs = leading * min_risk + remainder.
struct BoundValue {
  double leading = 1.0;
  double min_risk = 0.0;
  double remainder = 0.0;
  double total = 0.0;
};

/// Everything needed to evaluate an oracle-inequality right-hand side.
struct BoundInputs {
  const EstimatorFamily* family = nullptr;
  ConstSpan truth;
  const NoiseSpec* noise = nullptr;
  const Calibration* calib = nullptr;
  const ProbeSet* probes = nullptr;  // not needed for Thm4
  NormSpec norms;
  const SpaceWeights* w = nullptr;
};

BoundValue bound_terms(BoundKind kind, const BoundInputs& in);
double bound_rhs(BoundKind kind, const BoundInputs& in);

/// Members equal to L on disjoint blocks of block_size coordinates on a grid
/// with weights 1/n; pairwise p-distances are all (2h)^{1/p} L.
struct AdversarialFamily {
  EstimatorFamily family;
  std::size_t block_size = 0;
  double h = 0.0;       // realized block measure, block_size / n
  double h_star = 0.0;  // (eps^2 / L^2) ((5/6) ln(N - 1) - ln 2)
  double L = 0.0;
  std::size_t n = 0;
};

double adversarial_h_star(std::size_t N, double L, double eps);

AdversarialFamily adversarial_family(std::size_t N, double L, double eps, std::size_t n);

/// (2h)^{1/p - 1/2} / (12 sqrt 3) * eps * sqrt(ln(N - 1)), p in (2, inf].
double lower_bound_value(std::size_t N, double L, double eps, double p, double h);

struct AdversaryReport {
  Vector mean_regret;      // per truth member, mean p-distance of the selection
  double max_mean_regret = 0.0;
  double lower_bound = 0.0;
  double kappa = 0.0;
  AdversarialFamily setup;
};

/// Runs select_hat on the adversarial family with each member as the truth,
/// `reps` grid observations per truth (noise covariance h_cell * I, h_cell = 1/n).
/// Probe kind is Hat (any p) or Bar (p = inf, gamma = eps sqrt(ln N)); delta
/// defaults to eps.
AdversaryReport adversary_experiment(std::size_t N, double L, double eps, std::size_t n,
                                     std::size_t reps, std::uint64_t seed, double p = kInf,
                                     ProbeKind kind = ProbeKind::Hat,
                                     std::optional<double> delta = std::nullopt,
                                     std::size_t threads = 0);

}  // namespace agg
