#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "agg/calibration.hpp"
#include "agg/errors.hpp"
#include "agg/probes.hpp"
#include "agg/selectors.hpp"

using namespace agg;

namespace {

EstimatorFamily random_family(std::mt19937_64& rng, std::size_t N, std::size_t n) {
  std::normal_distribution<double> nd;
  std::vector<Vector> m(N, Vector(n));
  for (auto& v : m)
    for (double& x : v) x = nd(rng);
  return EstimatorFamily(std::move(m));
}

Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (double& x : v) x = scale * nd(rng);
  return v;
}

// Straight transcription of the exact L2 rule for cross-checking.
std::size_t brute_l2(const Vector& y, const EstimatorFamily& f) {
  std::size_t best = 0;
  double best_score = INFINITY;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double m = -INFINITY;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (i == j) continue;
      double nrm = 0.0, val = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) nrm += (f[i][k] - f[j][k]) * (f[i][k] - f[j][k]);
      nrm = std::sqrt(nrm);
      for (std::size_t k = 0; k < y.size(); ++k)
        val += (f[i][k] - f[j][k]) / nrm * ((f[i][k] + f[j][k]) / 2 - y[k]);
      m = std::max(m, val);
    }
    if (m < best_score - 1e-10) {
      best_score = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("discrepancy table") {
  std::mt19937_64 rng(1);
  auto fam = random_family(rng, 4, 5);
  auto w = SpaceWeights::grid(5);
  ProbeSet set = build_probe_set(fam, w, 3.0, ProbeKind::Tilde);
  auto self = discrepancies(fam[2], fam, set, w);
  for (std::size_t k = 0; k < set.size(); ++k) CHECK(self.at(2, k) == 0.0);

  Vector y = random_vector(rng, 5);
  auto d = discrepancies(y, fam, set, w);
  ProbeSet neg = set;
  for (auto& pr : neg.probes) pr.psi = scaled(pr.psi, -1.0);
  auto dn = discrepancies(y, fam, neg, w);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < set.size(); ++k) {
      CHECK(dn.at(i, k) == doctest::Approx(-d.at(i, k)));
      // Delta_i - Delta_j = <psi, mu_j - mu_i>, recomputed by hand.
      for (std::size_t j = 0; j < 4; ++j) {
        double direct = 0.0;
        for (std::size_t c = 0; c < 5; ++c) direct += w[c] * set.probes[k].psi[c] * (fam[j][c] - fam[i][c]);
        CHECK(d.at(i, k) - d.at(j, k) == doctest::Approx(direct));
      }
    }
  CHECK_THROWS_AS(discrepancies(Vector{1, 2}, fam, set, w), DimensionError);
}

TEST_CASE("tie handling in select_min") {
  Selection s = select_min(Rule::Tilde, {3.0, 1.0, 1.0 + 1e-12, 2.0});
  CHECK(s.chosen == 1);
  CHECK(s.ties == std::vector<std::size_t>{1, 2});
}

TEST_CASE("two-member noise-free examples") {
  auto fam = EstimatorFamily({{0, 0}, {10, 10}});
  auto w = SpaceWeights::unit(2);
  NoiseSpec noise{0.01, Covariance::identity(2)};
  ProbeSet set = build_probe_set(fam, w, 2.0, ProbeKind::Tilde, std::nullopt, &noise.sigma);
  Calibration calib = calibrate_analytic(set, 0.05);
  auto norms = NormSpec::from_p(2.0);

  Selection hat = select_hat(fam[0], fam, set, noise, calib, norms, w);
  CHECK(hat.scores[0] < 0.0);
  CHECK(hat.scores[1] > 0.0);
  CHECK(hat.scores[1] >= std::sqrt(200.0) - 2 * calib.kappa * noise.eps);
  CHECK(hat.chosen == 0);

  Selection tilde = select_tilde(fam[0], fam, set, norms, w);
  CHECK(tilde.chosen == 0);
  CHECK(tilde.scores[0] == 0.0);
  for (double s : tilde.scores) CHECK(s >= 0.0);

  Selection at_mid = select_l2_exact(Vector{5, 5}, fam, w);
  CHECK(at_mid.scores[0] == doctest::Approx(0.0));
  CHECK(at_mid.scores[1] == doctest::Approx(0.0));
  CHECK(at_mid.chosen == 0);

  Selection at_mu1 = select_l2_exact(fam[0], fam, w);
  CHECK(at_mu1.scores[0] == doctest::Approx(-std::sqrt(200.0) / 2));
  CHECK(at_mu1.scores[1] == doctest::Approx(std::sqrt(200.0) / 2));
  CHECK(at_mu1.chosen == 0);
}

TEST_CASE("hat scores scale with the data") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto fam = random_family(rng, 5, 6);
    Vector y = random_vector(rng, 6);
    auto w = SpaceWeights::unit(6);
    const double c = 3.5;
    std::vector<Vector> big;
    for (const auto& m : fam.members) big.push_back(scaled(m, c));
    EstimatorFamily fam_c(big);
    NoiseSpec noise{0.2, Covariance::identity(6)};
    NoiseSpec noise_c{0.2 * c, Covariance::identity(6)};
    for (double p : {1.5, 2.0, kInf}) {
      ProbeKind kind = std::isinf(p) ? ProbeKind::Hat : ProbeKind::Tilde;
      auto set = build_probe_set(fam, w, p, kind);
      auto set_c = build_probe_set(fam_c, w, p, kind);
      Calibration calib{0.05, 2.0};
      auto a = select_hat(y, fam, set, noise, calib, NormSpec::from_p(p), w);
      auto b = select_hat(scaled(y, c), fam_c, set_c, noise_c, calib, NormSpec::from_p(p), w);
      for (std::size_t i = 0; i < 5; ++i) CHECK(b.scores[i] == doctest::Approx(c * a.scores[i]));
      if (a.ties.size() == 1) CHECK(a.chosen == b.chosen);
    }
  }
}

TEST_CASE("selection is permutation equivariant") {
  std::mt19937_64 rng(3);
  auto fam = random_family(rng, 6, 4);
  Vector y = random_vector(rng, 4);
  auto w = SpaceWeights::unit(4);
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<Vector> pm;
  for (std::size_t i : perm) pm.push_back(fam[i]);
  EstimatorFamily fam_p(pm);
  auto set = build_probe_set(fam, w, 3.0, ProbeKind::Tilde);
  auto set_p = build_probe_set(fam_p, w, 3.0, ProbeKind::Tilde);
  auto a = select_tilde(y, fam, set, NormSpec::from_p(3.0), w);
  auto b = select_tilde(y, fam_p, set_p, NormSpec::from_p(3.0), w);
  for (std::size_t k = 0; k < 6; ++k) CHECK(b.scores[k] == doctest::Approx(a.scores[perm[k]]));
  CHECK(perm[b.chosen] == a.chosen);

  auto la = select_l2_exact(y, fam, w);
  auto lb = select_l2_exact(y, fam_p, w);
  CHECK(perm[lb.chosen] == la.chosen);
}

TEST_CASE("tilde scores are translation invariant") {
  std::mt19937_64 rng(4);
  auto fam = random_family(rng, 4, 5);
  Vector y = random_vector(rng, 5), v = random_vector(rng, 5);
  std::vector<Vector> shifted;
  for (const auto& m : fam.members) shifted.push_back(add(m, v));
  auto w = SpaceWeights::unit(5);
  auto set = build_probe_set(fam, w, 2.0, ProbeKind::Tilde);
  EstimatorFamily fam_s(shifted);
  auto set_s = build_probe_set(fam_s, w, 2.0, ProbeKind::Tilde);
  auto a = select_tilde(y, fam, set, NormSpec::from_p(2.0), w);
  auto b = select_tilde(add(y, v), fam_s, set_s, NormSpec::from_p(2.0), w);
  for (std::size_t i = 0; i < 4; ++i) CHECK(b.scores[i] == doctest::Approx(a.scores[i]));
}

TEST_CASE("exact L2 rule against a direct scan") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto fam = random_family(rng, 2 + trial % 7, 1 + trial % 6);
    Vector y = random_vector(rng, fam.dim(), 1.5);
    CHECK(select_l2_exact(y, fam, SpaceWeights::unit(fam.dim())).chosen == brute_l2(y, fam));
  }
  CHECK_THROWS_AS(select_l2_exact(Vector{0, 0}, EstimatorFamily({{1, 1}, {1, 1}}), SpaceWeights::unit(2)),
                  DegenerateError);
}

TEST_CASE("exact L2 and tilde rules can disagree") {
  // Search a fixed stream for an instance where the two rules differ.
  std::mt19937_64 rng(6);
  bool found = false;
  for (int trial = 0; trial < 2000 && !found; ++trial) {
    auto fam = random_family(rng, 3, 2);
    Vector y = random_vector(rng, 2, 1.5);
    auto w = SpaceWeights::unit(2);
    auto set = build_probe_set(fam, w, 2.0, ProbeKind::Tilde);
    auto t = select_tilde(y, fam, set, NormSpec::from_p(2.0), w);
    auto l = select_l2_exact(y, fam, w);
    found = t.chosen != l.chosen && t.ties.size() == 1 && l.ties.size() == 1;
  }
  CHECK(found);
}

TEST_CASE("selector preconditions") {
  auto fam = EstimatorFamily({{1, 0}, {0, 1}});
  auto w = SpaceWeights::unit(2);
  auto set = build_probe_set(fam, w, 2.0, ProbeKind::Tilde);
  CHECK_THROWS_AS(select_tilde(Vector{0, 0}, fam, set, NormSpec::from_p(3.0), w), ConfigError);
  ProbeSet empty = set;
  empty.probes.clear();
  CHECK_THROWS_AS(select_tilde(Vector{0, 0}, fam, empty, NormSpec::from_p(2.0), w), ConfigError);
  CHECK(rule_from_string("l2exact") == Rule::L2Exact);
  CHECK_THROWS_AS(rule_from_string("nope"), ConfigError);
}
