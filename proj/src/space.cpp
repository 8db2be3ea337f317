#include "agg/space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "agg/errors.hpp"

namespace agg {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

double conjugate_exponent(double p) {
  if (std::isnan(p) || p < 1.0) {
    throw DomainError("conjugate_exponent: p must lie in [1, inf], got " + std::to_string(p));
  }
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

SpaceWeights::SpaceWeights(Vector w) : w_(std::move(w)) {
  if (w_.empty()) throw DimensionError("SpaceWeights: dimension must be positive");
  all_unit_ = true;
  for (double x : w_) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DomainError("SpaceWeights: weights must be positive and finite");
    }
    if (x != 1.0) all_unit_ = false;
  }
}

SpaceWeights SpaceWeights::unit(std::size_t n) { return SpaceWeights(Vector(n, 1.0)); }

SpaceWeights SpaceWeights::grid(std::size_t n) {
  return SpaceWeights(Vector(n, 1.0 / static_cast<double>(n)));
}

double weighted_p_norm(ConstSpan v, const SpaceWeights& w, double p) {
  require_same_length(v.size(), w.size(), "weighted_p_norm");
  if (std::isnan(p) || p < 1.0) throw DomainError("weighted_p_norm: p must lie in [1, inf]");

  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * v[k] * v[k];
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * std::abs(v[k]);
    return s;
  }
  // Scale by the max magnitude so large p does not overflow.
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * std::pow(std::abs(v[k]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

double weighted_inner(ConstSpan v, ConstSpan u, const SpaceWeights& w) {
  require_same_length(v.size(), u.size(), "weighted_inner");
  require_same_length(v.size(), w.size(), "weighted_inner");
  double s = 0.0;
  if (w.all_unit()) {
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * u[k];
  } else {
    for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * v[k] * u[k];
  }
  return s;
}

Covariance Covariance::identity(std::size_t n, double scale) {
  if (n == 0) throw DimensionError("Covariance: dimension must be positive");
  if (!(scale >= 0.0)) throw PsdError("Covariance: negative identity scale");
  Covariance c;
  c.n_ = n;
  c.diag_.assign(n, scale);
  return c;
}

Covariance Covariance::diagonal(Vector d) {
  if (d.empty()) throw DimensionError("Covariance: dimension must be positive");
  for (double x : d) {
    if (x < 0.0) throw PsdError("Covariance: negative diagonal entry");
  }
  Covariance c;
  c.n_ = d.size();
  c.diag_ = std::move(d);
  return c;
}

Covariance Covariance::dense(std::size_t n, Vector rowmajor) {
  if (n == 0) throw DimensionError("Covariance: dimension must be positive");
  require_same_length(rowmajor.size(), n * n, "Covariance::dense");

  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double a = rowmajor[r * n + c];
      double b = rowmajor[c * n + r];
      if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a))) {
        throw PsdError("Covariance: matrix is not symmetric");
      }
      m(r, c) = a;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const auto& vals = eig.eigenvalues();
  if (vals.minCoeff() < -1e-10 * std::max(1.0, vals.maxCoeff())) {
    throw PsdError("Covariance: matrix is not positive semidefinite");
  }
  Eigen::MatrixXd a = eig.eigenvectors() * vals.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Covariance cov;
  cov.n_ = n;
  cov.dense_ = std::move(rowmajor);
  cov.factor_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) cov.factor_[r * n + c] = a(r, c);
  }
  return cov;
}

double Covariance::at(std::size_t r, std::size_t c) const {
  if (is_diagonal()) return r == c ? diag_[r] : 0.0;
  return dense_[r * n_ + c];
}

double Covariance::quadratic_form(ConstSpan psi) const {
  require_same_length(psi.size(), n_, "Covariance::quadratic_form");
  double s = 0.0;
  if (is_diagonal()) {
    for (std::size_t k = 0; k < n_; ++k) s += diag_[k] * psi[k] * psi[k];
    return s;
  }
  for (std::size_t r = 0; r < n_; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n_; ++c) row += dense_[r * n_ + c] * psi[c];
    s += psi[r] * row;
  }
  return s;
}

Vector Covariance::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n_);
  for (double& x : z) x = normal(rng);
  if (is_diagonal()) {
    for (std::size_t k = 0; k < n_; ++k) z[k] *= std::sqrt(diag_[k]);
    return z;
  }
  Vector out(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n_; ++c) s += factor_[r * n_ + c] * z[c];
    out[r] = s;
  }
  return out;
}

double sigma_seminorm(ConstSpan psi, const Covariance& sigma) {
  double form = sigma.quadratic_form(psi);
  if (form < -1e-10) throw PsdError("sigma_seminorm: negative quadratic form");
  return std::sqrt(std::max(form, 0.0));
}

EstimatorFamily::EstimatorFamily(std::vector<Vector> m, std::optional<double> L)
    : members(std::move(m)), bound_L(L) {
  if (members.empty()) throw DomainError("EstimatorFamily: at least one member required");
  const std::size_t n = members.front().size();
  if (n == 0) throw DimensionError("EstimatorFamily: members must be nonempty vectors");
  for (const auto& v : members) require_same_length(v.size(), n, "EstimatorFamily");
}

void EstimatorFamily::validate(const SpaceWeights& w, double p) const {
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (members[i] == members[j]) {
        throw DegenerateError("EstimatorFamily: members " + std::to_string(i) + " and " +
                              std::to_string(j) + " are identical");
      }
    }
  }
  if (bound_L) {
    for (const auto& v : members) {
      if (weighted_p_norm(v, w, p) > *bound_L * (1.0 + 1e-12)) {
        throw DomainError("EstimatorFamily: member norm exceeds bound L");
      }
    }
  }
}

Vector sample_observation(ConstSpan truth, const NoiseSpec& noise, const SpaceWeights& w,
                          std::mt19937_64& rng) {
  require_same_length(truth.size(), w.size(), "sample_observation");
  require_same_length(truth.size(), noise.sigma.size(), "sample_observation");
  Vector z = noise.sigma.sample(rng);
  Vector y(truth.begin(), truth.end());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += noise.eps * z[k] / w[k];
  return y;
}

Vector subtract(ConstSpan a, ConstSpan b) {
  require_same_length(a.size(), b.size(), "subtract");
  Vector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

Vector add(ConstSpan a, ConstSpan b) {
  require_same_length(a.size(), b.size(), "add");
  Vector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

Vector scaled(ConstSpan a, double c) {
  Vector out(a.begin(), a.end());
  for (double& x : out) x *= c;
  return out;
}

}  // namespace agg
