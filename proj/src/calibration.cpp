#include "agg/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "agg/errors.hpp"
#include "agg/parallel.hpp"
#include "agg/rng.hpp"

namespace agg {

namespace {

constexpr std::size_t kChunk = 1024;

void require_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError(std::string(what) + ": delta must lie in (0, 1), got " +
                      std::to_string(delta));
  }
}

// Normalized noise maxima for `reps` draws, chunked by derived seed.
std::vector<double> noise_maxima(const ProbeSet& set, const Covariance& sigma, std::size_t reps,
                                 std::uint64_t seed, std::size_t threads) {
  if (set.size() == 0) throw ConfigError("calibration: empty probe set");
  std::vector<double> scale(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    double s = sigma_seminorm(set.probes[k].psi, sigma);
    if (!(s > 0.0)) throw DegenerateError("calibration: probe with zero noise variance");
    scale[k] = 1.0 / s;
  }

  std::vector<double> maxima(reps);
  const std::size_t chunks = (reps + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        auto rng = make_rng(derive_seed(seed, c));
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(reps, lo + kChunk);
        for (std::size_t r = lo; r < hi; ++r) {
          Vector w = sigma.sample(rng);
          double m = 0.0;
          for (std::size_t k = 0; k < set.size(); ++k) {
            const Vector& psi = set.probes[k].psi;
            double z = 0.0;
            for (std::size_t t = 0; t < psi.size(); ++t) z += psi[t] * w[t];
            m = std::max(m, std::abs(z) * scale[k]);
          }
          maxima[r] = m;
        }
      },
      threads);
  return maxima;
}

}  // namespace

double kappa_analytic(std::size_t card, double delta) {
  require_delta(delta, "kappa_analytic");
  if (card == 0) throw DomainError("kappa_analytic: cardinality must be positive");
  return std::sqrt(2.0 * std::log(static_cast<double>(card) / delta));
}

double kappa_monte_carlo(const ProbeSet& set, const Covariance& sigma, double delta,
                         std::size_t reps, std::uint64_t seed, std::size_t threads) {
  require_delta(delta, "kappa_monte_carlo");
  if (reps < 1000) throw DomainError("kappa_monte_carlo: at least 1000 replications required");
  std::vector<double> maxima = noise_maxima(set, sigma, reps, seed, threads);
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(reps)));
  rank = std::clamp<std::size_t>(rank, 1, reps);
  std::nth_element(maxima.begin(), maxima.begin() + (rank - 1), maxima.end());
  return maxima[rank - 1];
}

double exceedance_rate(const ProbeSet& set, const Covariance& sigma, double kappa,
                       std::size_t reps, std::uint64_t seed, std::size_t threads) {
  if (reps == 0) throw DomainError("exceedance_rate: reps must be positive");
  std::vector<double> maxima = noise_maxima(set, sigma, reps, seed, threads);
  auto hits = std::count_if(maxima.begin(), maxima.end(), [&](double m) { return m >= kappa; });
  return static_cast<double>(hits) / static_cast<double>(reps);
}

double clamp_delta(double delta) { return std::clamp(delta, 1e-12, 1.0 - 1e-12); }

Calibration calibrate_analytic(const ProbeSet& set, double delta) {
  Calibration c;
  c.delta = delta;
  c.kappa = kappa_analytic(set.size(), delta);
  c.method = KappaMethod::Analytic;
  return c;
}

Calibration calibrate_monte_carlo(const ProbeSet& set, const Covariance& sigma, double delta,
                                  std::size_t reps, std::uint64_t seed) {
  Calibration c;
  c.delta = delta;
  c.kappa = kappa_monte_carlo(set, sigma, delta, reps, seed);
  c.method = KappaMethod::MonteCarlo;
  c.mc_reps = reps;
  c.seed = seed;
  return c;
}

}  // namespace agg
