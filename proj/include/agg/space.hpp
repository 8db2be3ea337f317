#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace agg {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Conjugate exponent q of p, 1/p + 1/q = 1, with the conventions 1 <-> inf.
double conjugate_exponent(double p);

/// A p-norm exponent together with its conjugate.
struct NormSpec {
  double p = 2.0;
  double q = 2.0;

  static NormSpec from_p(double p) { return {p, conjugate_exponent(p)}; }
};

/// Per-coordinate cell measures. All ones gives the plain R^n norms; all 1/n
/// gives a uniform grid on [0, 1] whose sums approximate integrals.
class SpaceWeights {
 public:
  explicit SpaceWeights(Vector w);

  static SpaceWeights unit(std::size_t n);
  static SpaceWeights grid(std::size_t n);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t k) const { return w_[k]; }
  ConstSpan values() const { return w_; }
  bool all_unit() const { return all_unit_; }

 private:
  Vector w_;
  bool all_unit_ = false;
};

/// (sum_k w_k |v_k|^p)^(1/p); max_k |v_k| at p = inf (weights ignored).
double weighted_p_norm(ConstSpan v, const SpaceWeights& w, double p);

/// sum_k w_k v_k u_k.
double weighted_inner(ConstSpan v, ConstSpan u, const SpaceWeights& w);

/// Noise covariance. Stored either as a diagonal or as a dense symmetric
/// row-major matrix.
class Covariance {
 public:
  static Covariance identity(std::size_t n, double scale = 1.0);
  static Covariance diagonal(Vector d);
  static Covariance dense(std::size_t n, Vector rowmajor);

  std::size_t size() const { return n_; }
  bool is_diagonal() const { return dense_.empty(); }
  double at(std::size_t r, std::size_t c) const;

  /// psi^T Sigma psi.
  double quadratic_form(ConstSpan psi) const;

  /// Draws w ~ N(0, Sigma).
  Vector sample(std::mt19937_64& rng) const;

 private:
  std::size_t n_ = 0;
  Vector diag_;
  Vector dense_;
  // Factor A with A A^T = Sigma, row-major, filled for the dense case.
  Vector factor_;
};

/// sqrt(psi^T Sigma psi). Throws PsdError when the form is below -1e-10.
double sigma_seminorm(ConstSpan psi, const Covariance& sigma);

struct NoiseSpec {
  double eps = 1.0;
  Covariance sigma;
};

/// Candidate estimators: N pairwise distinct vectors of a common length.
struct EstimatorFamily {
  std::vector<Vector> members;
  std::optional<double> bound_L;

  EstimatorFamily() = default;
  explicit EstimatorFamily(std::vector<Vector> m, std::optional<double> L = std::nullopt);

  std::size_t size() const { return members.size(); }
  std::size_t dim() const { return members.empty() ? 0 : members.front().size(); }
  const Vector& operator[](std::size_t i) const { return members[i]; }

  /// Throws DegenerateError on duplicates and DomainError when a member's
  /// p-norm exceeds bound_L.
  void validate(const SpaceWeights& w, double p) const;
};

/// Y = truth + eps * W^{-1} z with z ~ N(0, Sigma), W = diag(weights), so that
/// weighted_inner(psi, Y - truth, w) = eps * psi^T z.
Vector sample_observation(ConstSpan truth, const NoiseSpec& noise, const SpaceWeights& w,
                          std::mt19937_64& rng);

Vector subtract(ConstSpan a, ConstSpan b);
Vector add(ConstSpan a, ConstSpan b);
Vector scaled(ConstSpan a, double c);

}  // namespace agg
