#include <doctest.h>

#include <cmath>
#include <random>

#include "agg/calibration.hpp"
#include "agg/diagnostics.hpp"
#include "agg/errors.hpp"
#include "agg/probes.hpp"

using namespace agg;

TEST_CASE("oracle index") {
  auto fam = EstimatorFamily({{0, 0}, {1, 0}, {3, 3}, {0, 1}});
  auto w = SpaceWeights::unit(2);
  CHECK(oracle_index(fam, fam[2], w, 2.0) == 2);
  CHECK(oracle_index(fam, Vector{0.5, 0.5}, w, 2.0) == 0);  // 0, 1, 3 equidistant
  CHECK(oracle_index(fam, Vector{0.5, 0.5}, w, kInf) == 0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    std::vector<Vector> m(5, Vector(3));
    for (auto& v : m)
      for (double& x : v) x = nd(rng);
    Vector truth{nd(rng), nd(rng), nd(rng)};
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < 5; ++i) {
      double d = std::abs(m[i][0] - truth[0]) + std::abs(m[i][1] - truth[1]) + std::abs(m[i][2] - truth[2]);
      if (d < best_d) best_d = d, best = i;
    }
    CHECK(oracle_index(EstimatorFamily(m), truth, SpaceWeights::unit(3), 1.0) == best);
  }
}

TEST_CASE("quality factors") {
  // Flat difference, n = 16: ||g||_r = 16^{1/r}, so q1 = (16^{1/6} / 16^{1/4})^3 = 16^{-1/4}.
  auto flat = EstimatorFamily({Vector(16, 1.0), Vector(16, 0.0)});
  auto u16 = SpaceWeights::unit(16);
  QualityFactors f = q_factors(flat, 0, u16, 4.0);
  CHECK(f.q1 == doctest::Approx(0.5));
  CHECK(f.q3 == doctest::Approx(std::pow(16.0, 0.25 - 0.5)));
  CHECK(f.q2 == doctest::Approx(std::pow(16.0, 0.25) * std::pow(16.0, 0.75) / 16.0));

  Vector a(10, 0.0), b(10, 0.0);
  for (int k = 0; k < 4; ++k) b[k] = 1.0 + k;
  auto fam = EstimatorFamily({a, b});
  auto u10 = SpaceWeights::unit(10);
  CHECK(q_factors(fam, 0, u10, 1.0).q_cor5 == doctest::Approx(2.0));
  CHECK(q_factors(fam, 0, u10, 2.0).q3 == doctest::Approx(1.0));
  CHECK(q_factors(fam, 0, u10, 2.0).q1 == 1.0);
  CHECK(q_factors(fam, 0, u10, 3.0).q_cor5 == 1.0);

  // q4 of a single active coordinate: S = gamma e_k, ratio 1.
  auto spike = EstimatorFamily({Vector{5, 0, 0}, Vector{0, 0, 0}});
  CHECK(q_factors(spike, 0, SpaceWeights::unit(3), kInf, 0.5).q4 == doctest::Approx(1.0));

  CHECK_THROWS_AS(q_factors(EstimatorFamily({{1, 2}}), 0, SpaceWeights::unit(2), 2.0), DomainError);
}

TEST_CASE("theorem 4 bound") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  const std::size_t n = 10;
  std::vector<Vector> m(20, Vector(n));
  for (auto& v : m)
    for (double& x : v) x = 5 * nd(rng);
  EstimatorFamily fam(m);
  auto w = SpaceWeights::unit(n);
  NoiseSpec noise{1.0, Covariance::identity(n)};
  // Place the truth at distance 6.4 from member 0, far from all others.
  Vector truth = fam[0];
  truth[0] += 6.4;
  for (std::size_t i = 1; i < 20; ++i) REQUIRE(weighted_p_norm(subtract(truth, fam[i]), w, 2.0) > 6.4);
  BoundInputs in{&fam, truth, &noise, nullptr, nullptr, NormSpec::from_p(2.0), &w};
  CHECK(bound_rhs(BoundKind::Thm4, in) == doctest::Approx(6.4 + 8 * std::sqrt(2 * std::log(20.0))));
  CHECK(bound_rhs(BoundKind::Thm4, in) == doctest::Approx(25.982).epsilon(1e-4));
}

TEST_CASE("corollary and theorem bounds") {
  auto fam = EstimatorFamily({{1, 0, 0}, {0, 2, 0}, {0, 0, 1}});
  auto w = SpaceWeights::unit(3);
  Vector truth{0.9, 0.1, 0};
  NoiseSpec noise{0.1, Covariance::identity(3)};

  ProbeSet tilde = build_probe_set(fam, w, 1.5, ProbeKind::Tilde, std::nullopt, &noise.sigma);
  Calibration calib = calibrate_analytic(tilde, 0.1);
  BoundInputs in{&fam, truth, &noise, &calib, &tilde, NormSpec::from_p(1.5), &w};
  BoundValue c1 = bound_terms(BoundKind::Cor1, in);
  CHECK(c1.leading == 3.0);
  CHECK(q_factors(fam, 0, w, 1.5).q1 == 1.0);
  CHECK(c1.total == doctest::Approx(3 * c1.min_risk + c1.remainder));
  CHECK_THROWS_AS(bound_rhs(BoundKind::Cor2, in), ConfigError);
  CHECK_THROWS_AS(bound_rhs(BoundKind::Cor3, in), ConfigError);

  // Theorem 6 with gamma = 0 and vanishing delta and eps: (2 max ||psi||_q + 1) min-risk.
  NoiseSpec quiet{1e-12, Covariance::identity(3)};
  Calibration tiny{1e-12, 1.0};
  BoundInputs q{&fam, truth, &quiet, &tiny, &tilde, NormSpec::from_p(1.5), &w};
  BoundValue t6 = bound_terms(BoundKind::Thm6, q);
  CHECK(t6.remainder == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(t6.leading == doctest::Approx(2 * tilde.max_norm_q() + 1));
  CHECK(t6.total == doctest::Approx(3 * weighted_p_norm(subtract(truth, fam[0]), w, 1.5)));
}

TEST_CASE("adversarial family") {
  const double h_star = 0.01 / 4 * (5.0 / 6 * std::log(4.0) - std::log(2.0));
  CHECK(adversarial_h_star(5, 2.0, 0.1) == doctest::Approx(h_star).epsilon(1e-12));
  CHECK(h_star == doctest::Approx(0.00115524).epsilon(1e-5));

  AdversarialFamily a = adversarial_family(5, 2.0, 0.1, 10000);
  CHECK(a.block_size == 12);
  CHECK(a.h == doctest::Approx(0.0012));
  CHECK(std::pow(2 * a.h, -0.5) == doctest::Approx(20.41).epsilon(1e-3));

  // Disjoint blocks: all pairwise p-distances equal (2h)^{1/p} L.
  auto w = SpaceWeights::grid(10000);
  for (double p : {3.0, kInf}) {
    const double expected = (std::isinf(p) ? 1.0 : std::pow(2 * a.h, 1 / p)) * 2.0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        CHECK(weighted_p_norm(subtract(a.family[i], a.family[j]), w, p) == doctest::Approx(expected));
  }

  CHECK_THROWS_AS(adversarial_family(3, 2.0, 0.1, 10000), DomainError);
  CHECK_THROWS_AS(adversarial_family(5, 2.0, 2.0, 10000), DomainError);
  CHECK_THROWS_AS(adversarial_family(5, 2.0, 0.1, 100), DomainError);
}

TEST_CASE("lower bound value") {
  const double h = 0.0012;
  const double expected = std::pow(2 * h, -0.5) / (12 * std::sqrt(3.0)) * 0.1 * std::sqrt(std::log(4.0));
  CHECK(lower_bound_value(5, 2.0, 0.1, kInf, h) == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(0.1156).epsilon(1e-3));
  // As p -> 2 the block factor vanishes: eps sqrt(ln(N - 1)) / (12 sqrt 3).
  CHECK(lower_bound_value(5, 2.0, 0.1, 2.0 + 1e-9, 0.2) ==
        doctest::Approx(0.1 * std::sqrt(std::log(4.0)) / (12 * std::sqrt(3.0))).epsilon(1e-6));
  CHECK_THROWS_AS(lower_bound_value(5, 2.0, 0.1, 2.0, h), DomainError);
}

TEST_CASE("adversary experiment is deterministic") {
  AdversaryReport a = adversary_experiment(5, 2.0, 0.1, 10000, 20, 3, kInf, ProbeKind::Hat, std::nullopt, 1);
  AdversaryReport b = adversary_experiment(5, 2.0, 0.1, 10000, 20, 3, kInf, ProbeKind::Hat, std::nullopt, 2);
  CHECK(a.mean_regret == b.mean_regret);
  CHECK(a.mean_regret.size() == 5);
  CHECK(a.lower_bound == doctest::Approx(lower_bound_value(5, 2.0, 0.1, kInf, 0.0012)));
  AdversaryReport bar = adversary_experiment(5, 2.0, 0.1, 10000, 5, 3, kInf, ProbeKind::Bar);
  CHECK(bar.max_mean_regret >= 0.0);
}
