#pragma once

#include <cstddef>
#include <cstdint>

#include "agg/probes.hpp"
#include "agg/space.hpp"

namespace agg {

enum class KappaMethod { Analytic, MonteCarlo };

/// Threshold kappa for the normalized noise maximum max_psi |Z(psi)| / |psi|_Sigma
/// at confidence level delta.
struct Calibration {
  double delta = 0.05;
  double kappa = 0.0;
  KappaMethod method = KappaMethod::Analytic;
  std::size_t mc_reps = 0;
  std::uint64_t seed = 0;
};

/// Union bound: sqrt(2 ln(card / delta)).
double kappa_analytic(std::size_t card, double delta);

/// Empirical (1 - delta) quantile of max_psi |psi^T w| / |psi|_Sigma over
/// `reps` draws w ~ N(0, Sigma). The quantile is the order statistic of rank
/// ceil((1 - delta) reps). Replications are split into fixed-size chunks with
/// seeds derived from `seed`, so the value does not depend on thread count.
double kappa_monte_carlo(const ProbeSet& set, const Covariance& sigma, double delta,
                         std::size_t reps, std::uint64_t seed, std::size_t threads = 0);

/// Fraction of `reps` fresh draws whose normalized noise maximum reaches kappa.
double exceedance_rate(const ProbeSet& set, const Covariance& sigma, double kappa,
                       std::size_t reps, std::uint64_t seed, std::size_t threads = 0);

/// delta clamped into (1e-12, 1 - 1e-12); used when delta is tied to a noise
/// level that may be >= 1.
double clamp_delta(double delta);

Calibration calibrate_analytic(const ProbeSet& set, double delta);
Calibration calibrate_monte_carlo(const ProbeSet& set, const Covariance& sigma, double delta,
                                  std::size_t reps, std::uint64_t seed);

}  // namespace agg
