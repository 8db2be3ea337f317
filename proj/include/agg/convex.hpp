#pragma once

#include <cstddef>
#include <vector>

#include "agg/probes.hpp"
#include "agg/selectors.hpp"
#include "agg/space.hpp"

namespace agg {

inline constexpr std::size_t kDefaultNetCap = 2'000'000;

/// Lattice eta-net of {lambda : lambda_i >= 0, sum lambda_i <= 1} in l1.
struct SimplexNet {
  std::size_t N = 0;
  double eta = 0.0;
  double step = 0.0;
  std::vector<Vector> points;
};

/// Number of lattice points with step eta/N, without enumerating them.
double simplex_net_cardinality(std::size_t N, double eta);

/// All points whose coordinates are multiples of step = eta / N with sum <= 1.
/// Rounding every coordinate of lambda down to the lattice moves it by at most
/// N * step = eta in l1, so the lattice covers the simplex at radius eta.
SimplexNet simplex_eta_net(std::size_t N, double eta, std::size_t cap = kDefaultNetCap);

/// min_k |lambda - net_k|_1.
double net_distance(const SimplexNet& net, ConstSpan lambda);

/// 2 L eta (1 + max ||psi||_q).
double lemma1_gamma(double eta, double L, double max_q_norm);

/// F_lambda = sum_i lambda_i f_i.
Vector combine(const EstimatorFamily& base, ConstSpan lambda);

struct ConvexOptions {
  std::size_t cap = kDefaultNetCap;
  Covariance const* sigma = nullptr;  // probe sigma norms; defaults to noise.sigma
};

struct ConvexResult {
  Vector lambda;
  Vector aggregate;
  Selection selection;  // scores over the collapsed net family
  SimplexNet net;
  std::vector<std::size_t> representative;  // net point index of each collapsed member
  std::size_t collapsed_duplicates = 0;
  double kappa = 0.0;
  double gamma = 0.0;  // covering slack of the probe set over the full simplex
};

/// Selects a net point by the kappa-corrected score over the net family
/// {F_lambda : lambda in net}. Net points giving identical F_lambda are
/// collapsed onto the lowest net index before probes are built.
ConvexResult select_convex(ConstSpan y, const EstimatorFamily& base, double eta, ProbeKind kind,
                           const NoiseSpec& noise, double delta, const NormSpec& norms,
                           const SpaceWeights& w, const ConvexOptions& options = {});

}  // namespace agg
