#include "agg/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "agg/errors.hpp"

namespace agg {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

bool is_zero(ConstSpan g) {
  return std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; });
}

void require_nonzero(ConstSpan g, const char* what) {
  if (is_zero(g)) throw DegenerateError(std::string(what) + ": zero difference vector");
}

void fill_norms(Probe& probe, const SpaceWeights& w, double q, const Covariance& sigma) {
  probe.norm_q = weighted_p_norm(probe.psi, w, q);
  probe.norm_2 = weighted_p_norm(probe.psi, w, 2.0);
  probe.sigma_norm = sigma_seminorm(probe.psi, sigma);
}

Covariance default_covariance(const SpaceWeights& w) {
  return Covariance::diagonal(Vector(w.values().begin(), w.values().end()));
}

Probe tilde_probe(ConstSpan g, const SpaceWeights& w, double p) {
  if (std::isinf(p)) {
    throw ConfigError("tilde probe: p = inf unsupported, use the hat or bar family");
  }
  require_nonzero(g, "tilde probe");
  const double norm = weighted_p_norm(g, w, p);
  Probe probe;
  probe.psi.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] == 0.0) {
      probe.psi[k] = 0.0;
    } else if (p == 1.0) {
      probe.psi[k] = sign(g[k]);
    } else if (p == 2.0) {
      probe.psi[k] = g[k] / norm;
    } else {
      // (|g_k| / ||g||_p)^{p-1} stays bounded for large p.
      probe.psi[k] = std::pow(std::abs(g[k]) / norm, p - 1.0) * sign(g[k]);
    }
  }
  return probe;
}

Probe hat_probe(ConstSpan g, const SpaceWeights& w, double p) {
  require_nonzero(g, "hat probe");
  const double np = weighted_p_norm(g, w, p);
  const double n2 = weighted_p_norm(g, w, 2.0);
  Probe probe;
  probe.psi = scaled(g, np / (n2 * n2));
  return probe;
}

Probe bar_probe(ConstSpan g, const SpaceWeights& w, double gamma) {
  require_nonzero(g, "bar probe");
  if (!(gamma > 0.0)) throw DomainError("bar probe: gamma must be positive");
  double sup = 0.0;
  for (double x : g) sup = std::max(sup, std::abs(x));
  Probe probe;
  probe.psi.resize(g.size());
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double s = std::max(std::abs(g[k]) - sup + gamma, 0.0);
    probe.psi[k] = s * sign(g[k]);
    total += w[k] * s;
  }
  for (double& x : probe.psi) x /= total;
  return probe;
}

Probe midpoint_probe(ConstSpan mu_i, ConstSpan mu_j, const SpaceWeights& w) {
  Vector diff = subtract(mu_i, mu_j);
  if (is_zero(diff)) throw DegenerateError("midpoint probe: identical members");
  const double n2 = weighted_p_norm(diff, w, 2.0);
  Probe probe;
  probe.psi = scaled(diff, 1.0 / n2);
  probe.midpoint = scaled(add(mu_i, mu_j), 0.5);
  return probe;
}

}  // namespace

std::string to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::Tilde: return "tilde";
    case ProbeKind::Hat: return "hat";
    case ProbeKind::Bar: return "bar";
    case ProbeKind::L2Midpoint: return "l2_midpoint";
  }
  return "unknown";
}

ProbeKind probe_kind_from_string(const std::string& s) {
  if (s == "tilde") return ProbeKind::Tilde;
  if (s == "hat") return ProbeKind::Hat;
  if (s == "bar") return ProbeKind::Bar;
  if (s == "l2_midpoint" || s == "midpoint") return ProbeKind::L2Midpoint;
  throw ConfigError("unknown probe kind '" + s + "'");
}

std::size_t ProbeSet::index_of(std::size_t i, std::size_t j) const {
  if (i == j || i >= family_size || j >= family_size) {
    throw DomainError("ProbeSet::index_of: invalid pair");
  }
  return i * (family_size - 1) + (j < i ? j : j - 1);
}

double ProbeSet::max_norm_q() const {
  double m = 0.0;
  for (const auto& pr : probes) m = std::max(m, pr.norm_q);
  return m;
}

double ProbeSet::max_norm_2() const {
  double m = 0.0;
  for (const auto& pr : probes) m = std::max(m, pr.norm_2);
  return m;
}

double ProbeSet::max_sigma_norm() const {
  double m = 0.0;
  for (const auto& pr : probes) m = std::max(m, pr.sigma_norm);
  return m;
}

Probe build_tilde_probe(ConstSpan g, const SpaceWeights& w, double p) {
  Probe probe = tilde_probe(g, w, p);
  fill_norms(probe, w, conjugate_exponent(p), default_covariance(w));
  return probe;
}

Probe build_hat_probe(ConstSpan g, const SpaceWeights& w, double p) {
  Probe probe = hat_probe(g, w, p);
  fill_norms(probe, w, conjugate_exponent(p), default_covariance(w));
  return probe;
}

Probe build_bar_probe(ConstSpan g, const SpaceWeights& w, double gamma) {
  Probe probe = bar_probe(g, w, gamma);
  fill_norms(probe, w, 1.0, default_covariance(w));
  return probe;
}

Probe build_midpoint_probe(ConstSpan mu_i, ConstSpan mu_j, const SpaceWeights& w) {
  Probe probe = midpoint_probe(mu_i, mu_j, w);
  fill_norms(probe, w, 2.0, default_covariance(w));
  return probe;
}

ProbeSet build_probe_set(const EstimatorFamily& family, const SpaceWeights& w, double p,
                         ProbeKind kind, std::optional<double> gamma, const Covariance* sigma) {
  if (family.dim() != w.size()) throw DimensionError("build_probe_set: family/weights mismatch");
  conjugate_exponent(p);  // validates p

  ProbeSet set;
  set.kind = kind;
  set.p = p;
  set.family_size = family.size();
  switch (kind) {
    case ProbeKind::Tilde:
      if (std::isinf(p)) throw ConfigError("build_probe_set: tilde probes need p < inf");
      break;
    case ProbeKind::Hat:
      break;
    case ProbeKind::Bar:
      if (!std::isinf(p)) throw ConfigError("build_probe_set: bar probes target p = inf");
      if (!gamma || !(*gamma > 0.0)) {
        throw ConfigError("build_probe_set: bar probes need gamma > 0");
      }
      set.gamma = *gamma;
      break;
    case ProbeKind::L2Midpoint:
      if (p != 2.0) throw ConfigError("build_probe_set: midpoint probes target p = 2");
      break;
  }

  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (family[i] == family[j]) {
        throw DegenerateError("build_probe_set: members " + std::to_string(i) + " and " +
                              std::to_string(j) + " are identical");
      }
    }
  }

  const Covariance fallback = sigma ? Covariance() : default_covariance(w);
  const Covariance& cov = sigma ? *sigma : fallback;
  if (cov.size() != w.size()) throw DimensionError("build_probe_set: covariance dimension");
  const double q = conjugate_exponent(p);

  const std::size_t n_members = family.size();
  set.probes.reserve(n_members * (n_members - 1));
  for (std::size_t i = 0; i < n_members; ++i) {
    for (std::size_t j = 0; j < n_members; ++j) {
      if (i == j) continue;
      Probe probe;
      if (kind == ProbeKind::L2Midpoint) {
        probe = midpoint_probe(family[i], family[j], w);
      } else {
        Vector g = subtract(family[i], family[j]);
        switch (kind) {
          case ProbeKind::Tilde: probe = tilde_probe(g, w, p); break;
          case ProbeKind::Hat: probe = hat_probe(g, w, p); break;
          default: probe = bar_probe(g, w, set.gamma); break;
        }
      }
      probe.i = i;
      probe.j = j;
      fill_norms(probe, w, q, cov);
      set.probes.push_back(std::move(probe));
    }
  }
  return set;
}

void attach_covariance(ProbeSet& set, const Covariance& sigma) {
  for (auto& probe : set.probes) probe.sigma_norm = sigma_seminorm(probe.psi, sigma);
}

GoodnessReport check_goodness(const ProbeSet& set, const EstimatorFamily& family,
                              const SpaceWeights& w, double p) {
  GoodnessReport report;
  report.gamma = set.gamma;
  for (const auto& probe : set.probes) {
    Vector g = subtract(family[probe.i], family[probe.j]);
    double slack = std::abs(weighted_inner(probe.psi, g, w) - weighted_p_norm(g, w, p));
    if (slack > report.max_slack) {
      report.max_slack = slack;
      report.worst_i = probe.i;
      report.worst_j = probe.j;
    }
  }
  report.pass = report.max_slack <= set.gamma + 1e-9;
  return report;
}

std::string probe_set_csv(const ProbeSet& set) {
  std::ostringstream out;
  out << "pair_i,pair_j,norm_q,norm_2,sigma_norm\n";
  char buf[128];
  for (const auto& probe : set.probes) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", probe.i, probe.j, probe.norm_q,
                  probe.norm_2, probe.sigma_norm);
    out << buf;
  }
  return out.str();
}

}  // namespace agg
