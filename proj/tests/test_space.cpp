#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "agg/errors.hpp"
#include "agg/parallel.hpp"
#include "agg/rng.hpp"
#include "agg/space.hpp"

using namespace agg;

TEST_CASE("conjugate exponent") {
  CHECK(std::isinf(conjugate_exponent(1.0)));
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(conjugate_exponent(kInf) == 1.0);
  CHECK_THROWS_AS(conjugate_exponent(0.5), DomainError);
  CHECK_THROWS_AS(conjugate_exponent(std::nan("")), DomainError);
}

TEST_CASE("weighted norms and inner products") {
  auto u2 = SpaceWeights::unit(2);
  CHECK(weighted_p_norm(Vector{3, 4}, u2, 2.0) == doctest::Approx(5.0));
  CHECK(weighted_p_norm(Vector{1, -2, 3}, SpaceWeights::unit(3), kInf) == 3.0);
  CHECK(weighted_p_norm(Vector{1, 1}, SpaceWeights(Vector{0.5, 0.5}), 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(weighted_p_norm(Vector{1, 2, 3}, u2, 2.0), DimensionError);

  CHECK(weighted_inner(Vector{1, 0}, Vector{0, 1}, u2) == 0.0);
  CHECK(weighted_inner(Vector{3, 4}, Vector{3, 4}, u2) == doctest::Approx(25.0));
  CHECK(weighted_inner(Vector{2, 2}, Vector{1, 1}, SpaceWeights(Vector{0.5, 0.5})) ==
        doctest::Approx(2.0));
}

TEST_CASE("norm properties on random vectors") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const double ps[] = {1.0, 1.5, 2.0, 3.0, 4.0, kInf};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 17;
    Vector v(n), u(n), wv(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = nd(rng);
      u[k] = nd(rng);
      wv[k] = 0.1 + std::abs(nd(rng));
    }
    SpaceWeights w(wv);
    for (double p : ps) {
      const double q = conjugate_exponent(p);
      // Hoelder.
      CHECK(std::abs(weighted_inner(v, u, w)) <=
            weighted_p_norm(v, w, p) * weighted_p_norm(u, w, q) * (1 + 1e-12) + 1e-12);
      // Homogeneity and triangle inequality.
      CHECK(weighted_p_norm(scaled(v, -2.5), w, p) ==
            doctest::Approx(2.5 * weighted_p_norm(v, w, p)).epsilon(1e-12));
      CHECK(weighted_p_norm(add(v, u), w, p) <=
            weighted_p_norm(v, w, p) + weighted_p_norm(u, w, p) + 1e-12);
    }
  }
}

TEST_CASE("large exponents do not overflow") {
  Vector v{1e200, 2e200};
  CHECK(weighted_p_norm(v, SpaceWeights::unit(2), 50.0) == doctest::Approx(2e200).epsilon(1e-3));
}

TEST_CASE("grid norms agree with integrals of step functions") {
  // f = 1 on [0, 1/4), -2 on [1/4, 1): ||f||_p^p = 1/4 + (3/4) 2^p.
  for (std::size_t n : {4u, 16u, 64u}) {
    auto w = SpaceWeights::grid(n);
    Vector f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = k < n / 4 ? 1.0 : -2.0;
    for (double p : {1.0, 2.0, 3.0}) {
      CHECK(weighted_p_norm(f, w, p) ==
            doctest::Approx(std::pow(0.25 + 0.75 * std::pow(2.0, p), 1.0 / p)));
    }
    CHECK(weighted_inner(f, f, w) == doctest::Approx(0.25 + 0.75 * 4));
  }
}

TEST_CASE("sigma seminorm") {
  CHECK(sigma_seminorm(Vector{1, 0}, Covariance::identity(2)) == doctest::Approx(1.0));
  CHECK(sigma_seminorm(Vector{1, 1}, Covariance::diagonal({4, 9})) == doctest::Approx(std::sqrt(13.0)));
  CHECK(sigma_seminorm(Vector{0, 0}, Covariance::identity(2)) == 0.0);
  auto dense = Covariance::dense(2, {2, 1, 1, 2});
  CHECK(sigma_seminorm(Vector{1, -1}, dense) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(Covariance::dense(2, {1, 2, 2, 1}), PsdError);
  CHECK_THROWS_AS(Covariance::diagonal({1, -1}), PsdError);
}

TEST_CASE("dense covariance sampling reproduces the matrix") {
  auto sigma = Covariance::dense(3, {2, 0.5, 0.2, 0.5, 1, -0.3, 0.2, -0.3, 1.5});
  std::mt19937_64 rng(3);
  const int reps = 200000;
  double c[3][3] = {};
  for (int r = 0; r < reps; ++r) {
    Vector z = sigma.sample(rng);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) c[a][b] += z[a] * z[b] / reps;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(c[a][b] == doctest::Approx(sigma.at(a, b)).epsilon(0.03));
}

TEST_CASE("observation noise convention") {
  // <psi, Y - truth>_w = eps psi^T z; with Sigma = diag(w) its variance is eps^2 |psi|_Sigma^2.
  const std::size_t n = 8;
  auto w = SpaceWeights::grid(n);
  NoiseSpec noise{0.3, Covariance::diagonal(Vector(n, 1.0 / n))};
  Vector truth(n, 1.0), psi(n);
  for (std::size_t k = 0; k < n; ++k) psi[k] = std::sin(1.0 + k);
  std::mt19937_64 rng(11);
  const int reps = 100000;
  double m2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    Vector y = sample_observation(truth, noise, w, rng);
    double z = weighted_inner(psi, subtract(y, truth), w);
    m2 += z * z / reps;
  }
  const double expected = 0.09 * noise.sigma.quadratic_form(psi);
  CHECK(m2 == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("estimator family validation") {
  auto w = SpaceWeights::unit(2);
  CHECK_THROWS_AS(EstimatorFamily({{1, 2}, {1, 2}}).validate(w, 2.0), DegenerateError);
  CHECK_THROWS_AS(EstimatorFamily({{1, 2}, {1}}), DimensionError);
  CHECK_THROWS_AS(EstimatorFamily({{3, 4}, {0, 0}}, 4.0).validate(w, 2.0), DomainError);
  CHECK_NOTHROW(EstimatorFamily({{3, 4}, {0, 0}}, 5.0).validate(w, 2.0));
}

TEST_CASE("seed derivation and parallel_for") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));

  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
  for (auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw DomainError("x"); }, 3),
                  DomainError);
}
