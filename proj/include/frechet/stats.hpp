#pragma once

#include "frechet/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace frechet {

/// d x k matrix of encoder activations, one sample per column. Requires
/// k >= 2 (the unbiased sample covariance needs k-1 >= 1) and finite
/// entries.
class FeatureMatrix {
public:
  explicit FeatureMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.cols() < 2)
      throw std::invalid_argument("FeatureMatrix: needs at least 2 samples, got k=" +
                                  std::to_string(values_.cols()));
    if (values_.rows() < 1)
      throw std::invalid_argument("FeatureMatrix: feature dimension must be >= 1");
    require_finite(values_, "FeatureMatrix");
  }

  index_t d() const { return values_.rows(); }
  index_t k() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

private:
  Matrix values_;
};

/// Centered, 1/sqrt(k-1)-normalized factor C with Sigma = C C^T. Row sums
/// are zero by construction, so rank(C) <= k-1.
class CenteredFactor {
public:
  index_t d() const { return values_.rows(); }
  index_t k() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

  /// Wraps a matrix that is already centered and normalized (e.g. loaded
  /// from a stats file). Validates the centering invariant:
  /// |sum_j C_ij| <= 1e-9 * sqrt(k) * ||row_i||.
  static CenteredFactor from_matrix(Matrix values) {
    const index_t d = values.rows(), k = values.cols();
    if (k < 1) throw std::invalid_argument("CenteredFactor: empty factor");
    require_finite(values, "CenteredFactor");
    const double sqrt_k = std::sqrt(static_cast<double>(k));
    for (index_t i = 0; i < d; ++i) {
      double sum = 0.0, norm2 = 0.0;
      for (index_t j = 0; j < k; ++j) {
        sum += values(i, j);
        norm2 += values(i, j) * values(i, j);
      }
      if (std::abs(sum) > 1e-9 * sqrt_k * std::sqrt(norm2))
        throw std::invalid_argument("CenteredFactor: row " + std::to_string(i) +
                                    " is not centered (row sum " + std::to_string(sum) + ")");
    }
    return CenteredFactor(std::move(values));
  }

  /// Bypasses the centering check; reserved for construction sites that
  /// guarantee centering analytically (center_factor).
  static CenteredFactor trusted(Matrix values) { return CenteredFactor(std::move(values)); }

private:
  explicit CenteredFactor(Matrix values) : values_(std::move(values)) {}
  Matrix values_;
};

/// Columnwise arithmetic mean of the samples.
inline std::vector<double> sample_mean(const FeatureMatrix& x) {
  const Matrix& v = x.values();
  std::vector<double> mu(static_cast<std::size_t>(v.rows()), 0.0);
  for (index_t j = 0; j < v.cols(); ++j)
    for (index_t i = 0; i < v.rows(); ++i) mu[static_cast<std::size_t>(i)] += v(i, j);
  const double inv_k = 1.0 / static_cast<double>(v.cols());
  for (double& m : mu) m *= inv_k;
  return mu;
}

/// C = (X - mu 1^T) / sqrt(k-1), so that C C^T is the unbiased sample
/// covariance of X's columns.
inline CenteredFactor center_factor(const FeatureMatrix& x) {
  const Matrix& v = x.values();
  const std::vector<double> mu = sample_mean(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.cols() - 1));
  Matrix c(v.rows(), v.cols());
  for (index_t j = 0; j < v.cols(); ++j)
    for (index_t i = 0; i < v.rows(); ++i)
      c(i, j) = (v(i, j) - mu[static_cast<std::size_t>(i)]) * scale;
  return CenteredFactor::trusted(std::move(c));
}

/// tr(C C^T) as the squared Frobenius norm of C, without forming C C^T.
inline double trace_cov(const CenteredFactor& c) {
  const double f = frobenius_norm(c.values());
  return f * f;
}

/// Full d x d covariance tagged as such; kept exactly symmetric.
struct FullCov {
  Matrix sigma;
};

/// Gaussian moments (mu, Sigma) with Sigma held either dense or as a
/// centered factor. The unit of persistence; see io.hpp for the file
/// format.
class GaussianStats {
public:
  GaussianStats(std::vector<double> mu, FullCov cov, std::int64_t sample_count)
      : mu_(std::move(mu)), sigma_(std::move(cov)), sample_count_(sample_count) {
    const Matrix& s = std::get<FullCov>(sigma_).sigma;
    if (s.rows() != s.cols())
      throw std::invalid_argument("GaussianStats: covariance is not square");
    if (static_cast<index_t>(mu_.size()) != s.rows())
      throw std::invalid_argument("GaussianStats: mu dimension " + std::to_string(mu_.size()) +
                                  " does not match covariance dimension " + std::to_string(s.rows()));
    require_finite(s, "GaussianStats covariance");
    if (asymmetry(s) > 1e-12)
      throw std::invalid_argument("GaussianStats: covariance asymmetry exceeds 1e-12 relative");
  }

  GaussianStats(std::vector<double> mu, CenteredFactor factor, std::int64_t sample_count)
      : mu_(std::move(mu)), sigma_(std::move(factor)), sample_count_(sample_count) {
    if (static_cast<index_t>(mu_.size()) != std::get<CenteredFactor>(sigma_).d())
      throw std::invalid_argument("GaussianStats: mu dimension does not match factor dimension");
  }

  index_t dim() const { return static_cast<index_t>(mu_.size()); }
  const std::vector<double>& mu() const { return mu_; }
  std::int64_t sample_count() const { return sample_count_; }

  bool has_factor() const { return std::holds_alternative<CenteredFactor>(sigma_); }
  const CenteredFactor& factor() const { return std::get<CenteredFactor>(sigma_); }
  const Matrix& full_cov() const { return std::get<FullCov>(sigma_).sigma; }

  /// Dense covariance; for factor form computes C C^T (symmetrized).
  Matrix dense_cov() const {
    if (!has_factor()) return full_cov();
    const Matrix& c = factor().values();
    Matrix s = matmul_nt(c, c);
    return symmetrize(s);
  }

  /// tr(Sigma) without densifying.
  double trace() const {
    if (has_factor()) return trace_cov(factor());
    const Matrix& s = full_cov();
    double t = 0.0;
    for (index_t i = 0; i < s.rows(); ++i) t += s(i, i);
    return t;
  }

  /// diag(Sigma); for factor form the rowwise squared norms of C.
  std::vector<double> cov_diagonal() const {
    std::vector<double> diag(static_cast<std::size_t>(dim()), 0.0);
    if (has_factor()) {
      const Matrix& c = factor().values();
      for (index_t j = 0; j < c.cols(); ++j)
        for (index_t i = 0; i < c.rows(); ++i)
          diag[static_cast<std::size_t>(i)] += c(i, j) * c(i, j);
    } else {
      const Matrix& s = full_cov();
      for (index_t i = 0; i < s.rows(); ++i) diag[static_cast<std::size_t>(i)] = s(i, i);
    }
    return diag;
  }

private:
  std::vector<double> mu_;
  std::variant<FullCov, CenteredFactor> sigma_;
  std::int64_t sample_count_ = 0;
};

/// Fits (mu, Sigma) to the samples, keeping Sigma as a factor or densified.
inline GaussianStats stats_from_samples(const FeatureMatrix& x, bool as_factor) {
  std::vector<double> mu = sample_mean(x);
  CenteredFactor c = center_factor(x);
  if (as_factor) return GaussianStats(std::move(mu), std::move(c), x.k());
  const Matrix& cv = c.values();
  Matrix sigma = symmetrize(matmul_nt(cv, cv));
  return GaussianStats(std::move(mu), FullCov{std::move(sigma)}, x.k());
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("squared_distance: dimension mismatch, " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace frechet
