#include "agg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agg/errors.hpp"
#include "agg/parallel.hpp"
#include "agg/rng.hpp"

namespace agg {

namespace {

// (sum_k w_k |g_k|^r)^{1/r} for any r > 0; below r = 1 this is only a quasi-norm.
double power_mean(ConstSpan g, const SpaceWeights& w, double r) {
  if (r >= 1.0) return weighted_p_norm(g, w, r);
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] != 0.0) s += w[k] * std::pow(std::abs(g[k]), r);
  }
  return std::pow(s, 1.0 / r);
}

double q1_ratio(ConstSpan g, const SpaceWeights& w, double p) {
  return std::pow(power_mean(g, w, 2.0 * p - 2.0) / weighted_p_norm(g, w, p), p - 1.0);
}

double family_L(const EstimatorFamily& family, ConstSpan truth, const SpaceWeights& w, double p) {
  double L = weighted_p_norm(truth, w, p);
  for (const Vector& m : family.members) L = std::max(L, weighted_p_norm(m, w, p));
  if (family.bound_L) L = std::max(L, *family.bound_L);
  return L;
}

void require_kind(const ProbeSet* set, ProbeKind kind, BoundKind bound) {
  if (!set) throw ConfigError(to_string(bound) + ": probe set required");
  if (set->kind != kind) {
    throw ConfigError(to_string(bound) + " needs " + to_string(kind) + " probes, got " +
                      to_string(set->kind));
  }
}

}  // namespace

std::size_t oracle_index(const EstimatorFamily& family, ConstSpan truth, const SpaceWeights& w,
                         double p) {
  std::size_t best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    double r = weighted_p_norm(subtract(truth, family[i]), w, p);
    if (r < best_risk) {
      best_risk = r;
      best = i;
    }
  }
  return best;
}

QualityFactors q_factors(const EstimatorFamily& family, std::size_t i_star, const SpaceWeights& w,
                         double p, std::optional<double> gamma) {
  if (family.size() < 2) throw DomainError("q_factors: family has no pairs");
  if (i_star >= family.size()) throw DomainError("q_factors: oracle index out of range");
  if (gamma && !(*gamma > 0.0)) throw DomainError("q_factors: gamma must be positive");

  const double q = conjugate_exponent(p);
  QualityFactors f;
  f.q1 = 0.0;
  f.q_cor5 = 0.0;
  f.gamma = gamma.value_or(0.0);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (i == i_star) continue;
    Vector g = subtract(family[i_star], family[i]);
    const double np = weighted_p_norm(g, w, p);
    const double n2 = weighted_p_norm(g, w, 2.0);
    f.q2 = std::max(f.q2, np * weighted_p_norm(g, w, q) / (n2 * n2));
    f.q3 = std::max(f.q3, np / n2);

    if (p > 2.0 && !std::isinf(p)) f.q1 = std::max(f.q1, q1_ratio(g, w, p));

    if (p == 1.0) {
      auto support = std::count_if(g.begin(), g.end(), [](double x) { return x != 0.0; });
      f.q_cor5 = std::max(f.q_cor5, std::sqrt(static_cast<double>(support)));
    } else if (p < 2.0) {
      f.q_cor5 = std::max(f.q_cor5, q1_ratio(g, w, p));
    }

    if (gamma) {
      double sup = weighted_p_norm(g, w, kInf);
      Vector s(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        s[k] = std::max(std::abs(g[k]) - sup + *gamma, 0.0);
      }
      f.q4 = std::max(f.q4, weighted_p_norm(s, w, 2.0) / weighted_p_norm(s, w, 1.0));
    }
  }
  if (p <= 2.0) f.q1 = 1.0;
  if (std::isinf(p)) f.q1 = f.q3;
  if (p >= 2.0) f.q_cor5 = 1.0;
  f.k_p = f.q3;
  return f;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Thm1: return "THM1";
    case BoundKind::Thm4: return "THM4";
    case BoundKind::Thm6: return "THM6";
    case BoundKind::Thm7: return "THM7";
    case BoundKind::Cor1: return "COR1";
    case BoundKind::Cor2: return "COR2";
    case BoundKind::Cor3: return "COR3";
    case BoundKind::Cor5: return "COR5";
  }
  return "unknown";
}

BoundValue bound_terms(BoundKind kind, const BoundInputs& in) {
  if (!in.family || !in.noise || !in.w) throw ConfigError("bound_rhs: missing inputs");
  const EstimatorFamily& family = *in.family;
  const SpaceWeights& w = *in.w;
  const double eps = in.noise->eps;
  const double N = static_cast<double>(family.size());
  BoundValue b;

  if (kind == BoundKind::Thm4) {
    std::size_t i_star = oracle_index(family, in.truth, w, 2.0);
    b.min_risk = weighted_p_norm(subtract(in.truth, family[i_star]), w, 2.0);
    b.leading = 1.0;
    b.remainder = 8.0 * eps * std::sqrt(2.0 * std::log(N));
    b.total = b.min_risk + b.remainder;
    return b;
  }

  const double p = in.norms.p;
  const std::size_t i_star = oracle_index(family, in.truth, w, p);
  b.min_risk = weighted_p_norm(subtract(in.truth, family[i_star]), w, p);
  const double L = family_L(family, in.truth, w, p);
  const double log_term = std::sqrt(2.0 * std::log(N * N / eps));

  switch (kind) {
    case BoundKind::Thm1:
    case BoundKind::Thm6:
    case BoundKind::Thm7: {
      if (!in.probes || !in.calib) throw ConfigError(to_string(kind) + ": probes and kappa needed");
      const ProbeSet& set = *in.probes;
      if (set.family_size != family.size()) {
        throw ConfigError(to_string(kind) + ": probe set built for another family");
      }
      double star_q = 0.0;
      double star_sigma = 0.0;
      for (const Probe& pr : set.probes) {
        if (pr.i != i_star) continue;
        star_q = std::max(star_q, pr.norm_q);
        star_sigma = std::max(star_sigma, pr.sigma_norm);
      }
      const double kappa = in.calib->kappa;
      const double delta = in.calib->delta;
      b.leading = 2.0 * star_q + 1.0;
      if (kind == BoundKind::Thm7) {
        double ratio = 0.0;
        for (const Probe& pr : set.probes) ratio = std::max(ratio, pr.sigma_norm / pr.norm_q);
        b.remainder = 2.0 * kappa * eps * star_q * ratio;
      } else {
        b.remainder = 2.0 * kappa * eps * star_sigma;
      }
      b.remainder += set.gamma;
      if (kind == BoundKind::Thm1) {
        double max_member = 0.0;
        for (const Vector& m : family.members) max_member = std::max(max_member, weighted_p_norm(m, w, p));
        b.remainder += (weighted_p_norm(in.truth, w, p) + max_member) * delta;
      } else {
        b.remainder += 2.0 * L * delta;
      }
      break;
    }
    case BoundKind::Cor1: {
      require_kind(in.probes, ProbeKind::Tilde, kind);
      QualityFactors f = q_factors(family, i_star, w, p);
      b.leading = 3.0;
      b.remainder = 2.0 * f.q1 * eps * log_term + 2.0 * L * eps;
      break;
    }
    case BoundKind::Cor2: {
      require_kind(in.probes, ProbeKind::Hat, kind);
      QualityFactors f = q_factors(family, i_star, w, p);
      b.leading = 2.0 * f.q2 + 1.0;
      b.remainder = 2.0 * f.q3 * eps * log_term + 2.0 * L * eps;
      break;
    }
    case BoundKind::Cor3: {
      require_kind(in.probes, ProbeKind::Bar, kind);
      QualityFactors f = q_factors(family, i_star, w, p, in.probes->gamma);
      b.leading = 3.0;
      b.remainder = 3.0 * f.q4 * eps * log_term + 2.0 * L * eps;
      break;
    }
    case BoundKind::Cor5: {
      require_kind(in.probes, ProbeKind::Tilde, kind);
      QualityFactors f = q_factors(family, i_star, w, p);
      b.leading = 3.0;
      b.remainder = 2.0 * f.q_cor5 * eps * log_term + 2.0 * L * eps;
      break;
    }
    case BoundKind::Thm4:
      break;
  }
  b.total = b.leading * b.min_risk + b.remainder;
  return b;
}

double bound_rhs(BoundKind kind, const BoundInputs& in) { return bound_terms(kind, in).total; }

double adversarial_h_star(std::size_t N, double L, double eps) {
  const double n1 = static_cast<double>(N) - 1.0;
  return (eps * eps) / (L * L) * (5.0 / 6.0 * std::log(n1) - std::log(2.0));
}

AdversarialFamily adversarial_family(std::size_t N, double L, double eps, std::size_t n) {
  if (N <= 3) throw DomainError("adversarial_family: requires N > 3");
  if (!(L > 0.0) || !(eps > 0.0)) throw DomainError("adversarial_family: L and eps must be positive");
  const double Nd = static_cast<double>(N);
  const double eps_max = L / std::sqrt(Nd * std::log(Nd));
  if (eps > eps_max) {
    throw DomainError("adversarial_family: eps <= L (N ln N)^{-1/2} violated (limit " +
                      std::to_string(eps_max) + ")");
  }
  AdversarialFamily adv;
  adv.h_star = adversarial_h_star(N, L, eps);
  if (static_cast<double>(n) * adv.h_star < 1.0) {
    throw DomainError("adversarial_family: n * h_star >= 1 violated (grid too coarse)");
  }
  adv.block_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * adv.h_star)));
  if (N * adv.block_size > n) {
    throw DomainError("adversarial_family: grid too small for " + std::to_string(N) +
                      " blocks of " + std::to_string(adv.block_size));
  }
  adv.h = static_cast<double>(adv.block_size) / static_cast<double>(n);
  adv.L = L;
  adv.n = n;

  // Pairwise KL divergence between the induced observation laws is h L^2 / eps^2.
  std::vector<Vector> members(N, Vector(n, 0.0));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < adv.block_size; ++k) members[i][i * adv.block_size + k] = L;
  }
  adv.family = EstimatorFamily(std::move(members), L);
  return adv;
}

double lower_bound_value(std::size_t N, double /*L*/, double eps, double p, double h) {
  if (!(p > 2.0)) throw DomainError("lower_bound_value: p must lie in (2, inf]");
  if (N < 3) throw DomainError("lower_bound_value: N must exceed 2");
  if (!(h > 0.0 && h <= 1.0 / static_cast<double>(N))) {
    throw DomainError("lower_bound_value: h must lie in (0, 1/N]");
  }
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double k_p = std::pow(2.0 * h, inv_p - 0.5);
  return k_p / (12.0 * std::sqrt(3.0)) * eps * std::sqrt(std::log(static_cast<double>(N) - 1.0));
}

AdversaryReport adversary_experiment(std::size_t N, double L, double eps, std::size_t n,
                                     std::size_t reps, std::uint64_t seed, double p,
                                     ProbeKind kind, std::optional<double> delta,
                                     std::size_t threads) {
  if (reps == 0) throw DomainError("adversary_experiment: reps must be positive");
  AdversaryReport report;
  report.setup = adversarial_family(N, L, eps, n);
  const EstimatorFamily& family = report.setup.family;
  const SpaceWeights w = SpaceWeights::grid(n);
  NoiseSpec noise{eps, Covariance::identity(n, 1.0 / static_cast<double>(n))};

  std::optional<double> gamma;
  if (kind == ProbeKind::Bar) gamma = eps * std::sqrt(std::log(static_cast<double>(N)));
  ProbeSet set = build_probe_set(family, w, p, kind, gamma, &noise.sigma);
  Calibration calib = calibrate_analytic(set, clamp_delta(delta.value_or(eps)));
  report.kappa = calib.kappa;
  const NormSpec norms = NormSpec::from_p(p);

  std::vector<double> regret(N * reps);
  parallel_for(
      N * reps,
      [&](std::size_t idx) {
        const std::size_t truth = idx / reps;
        auto rng = make_rng(derive_seed(seed, idx));
        Vector y = sample_observation(family[truth], noise, w, rng);
        Selection s = select_hat(y, family, set, noise, calib, norms, w);
        regret[idx] = weighted_p_norm(subtract(family[s.chosen], family[truth]), w, p);
      },
      threads);

  report.mean_regret.assign(N, 0.0);
  for (std::size_t t = 0; t < N; ++t) {
    double s = 0.0;
    for (std::size_t r = 0; r < reps; ++r) s += regret[t * reps + r];
    report.mean_regret[t] = s / static_cast<double>(reps);
  }
  report.max_mean_regret = *std::max_element(report.mean_regret.begin(), report.mean_regret.end());
  report.lower_bound = lower_bound_value(N, L, eps, p, report.setup.h);
  return report;
}

}  // namespace agg
