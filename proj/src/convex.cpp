#include "agg/convex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "agg/calibration.hpp"
#include "agg/errors.hpp"

namespace agg {

namespace {

std::size_t lattice_units(double step) {
  return static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
}

void enumerate(std::size_t dim, std::size_t remaining, std::vector<std::size_t>& current,
               double step, std::vector<Vector>& out) {
  if (current.size() == dim) {
    Vector point(dim);
    for (std::size_t i = 0; i < dim; ++i) point[i] = static_cast<double>(current[i]) * step;
    out.push_back(std::move(point));
    return;
  }
  for (std::size_t k = 0; k <= remaining; ++k) {
    current.push_back(k);
    enumerate(dim, remaining - k, current, step, out);
    current.pop_back();
  }
}

}  // namespace

double simplex_net_cardinality(std::size_t N, double eta) {
  // C(M + N, N) lattice points with sum of units <= M.
  const double step = eta / static_cast<double>(N);
  const double M = static_cast<double>(lattice_units(step));
  return std::exp(std::lgamma(M + N + 1.0) - std::lgamma(M + 1.0) - std::lgamma(N + 1.0));
}

SimplexNet simplex_eta_net(std::size_t N, double eta, std::size_t cap) {
  if (N == 0) throw DomainError("simplex_eta_net: N must be positive");
  if (!(eta > 0.0 && eta <= 2.0)) throw DomainError("simplex_eta_net: eta must lie in (0, 2]");
  const double card = simplex_net_cardinality(N, eta);
  if (std::round(card) > static_cast<double>(cap)) {
    throw CapacityError("simplex_eta_net: net of " + std::to_string(card) +
                        " points exceeds the cap of " + std::to_string(cap));
  }
  SimplexNet net;
  net.N = N;
  net.eta = eta;
  net.step = eta / static_cast<double>(N);
  std::vector<std::size_t> current;
  enumerate(N, lattice_units(net.step), current, net.step, net.points);
  return net;
}

double net_distance(const SimplexNet& net, ConstSpan lambda) {
  if (lambda.size() != net.N) throw DimensionError("net_distance: dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& point : net.points) {
    double d = 0.0;
    for (std::size_t i = 0; i < net.N; ++i) d += std::abs(point[i] - lambda[i]);
    best = std::min(best, d);
  }
  return best;
}

double lemma1_gamma(double eta, double L, double max_q_norm) {
  return 2.0 * L * eta * (1.0 + max_q_norm);
}

Vector combine(const EstimatorFamily& base, ConstSpan lambda) {
  if (lambda.size() != base.size()) throw DimensionError("combine: weight count mismatch");
  Vector out(base.dim(), 0.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (lambda[i] == 0.0) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += lambda[i] * base[i][k];
  }
  return out;
}

ConvexResult select_convex(ConstSpan y, const EstimatorFamily& base, double eta, ProbeKind kind,
                           const NoiseSpec& noise, double delta, const NormSpec& norms,
                           const SpaceWeights& w, const ConvexOptions& options) {
  if (y.size() != base.dim() || w.size() != base.dim()) {
    throw DimensionError("select_convex: dimension mismatch");
  }
  ConvexResult result;
  result.net = simplex_eta_net(base.size(), eta, options.cap);

  // Collapse net points with identical combinations; map keeps the first
  // (lowest) net index, which is independent of any later processing order.
  std::map<Vector, std::size_t> seen;
  std::vector<Vector> unique;
  for (std::size_t k = 0; k < result.net.points.size(); ++k) {
    Vector f = combine(base, result.net.points[k]);
    auto [it, inserted] = seen.emplace(f, unique.size());
    if (inserted) {
      unique.push_back(std::move(f));
      result.representative.push_back(k);
    } else {
      ++result.collapsed_duplicates;
    }
  }
  if (unique.size() < 2) throw DegenerateError("select_convex: net family has a single member");

  EstimatorFamily net_family(std::move(unique));
  const Covariance& sigma = options.sigma ? *options.sigma : noise.sigma;
  ProbeSet set = build_probe_set(net_family, w, norms.p, kind, std::nullopt, &sigma);
  Calibration calib = calibrate_analytic(set, delta);
  result.kappa = calib.kappa;

  double L = 0.0;
  for (const Vector& f : base.members) L = std::max(L, weighted_p_norm(f, w, norms.p));
  result.gamma = lemma1_gamma(eta, base.bound_L.value_or(L), set.max_norm_q());

  result.selection = select_hat(y, net_family, set, noise, calib, norms, w);
  result.lambda = result.net.points[result.representative[result.selection.chosen]];
  result.aggregate = net_family[result.selection.chosen];
  return result;
}

}  // namespace agg
