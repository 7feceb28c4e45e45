#pragma once

#include "frechet/eig.hpp"
#include "frechet/fast_trace.hpp"
#include "frechet/fid.hpp"
#include "frechet/rng.hpp"
#include "frechet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace frechet {

/// Eigenvalues at or below ratio * max(lambda_max, 1) contribute zero to
/// the trace-of-sqrt gradient; sqrt is nonsmooth at 0, so the pseudo-
/// inverse direction is dropped there. Separate from (and tighter than)
/// the value-side clamp.
inline constexpr double kGradientClampRatio = 1e-10;

/// Gradient of the full squared Frechet distance with respect to the fake
/// feature matrix X1, plus the value and spectrum at the same point.
struct FidGradient {
  Matrix wrt_features;  // d x m
  FidBreakdown value;
  SpectrumResult spectrum;
  index_t clamped_gradient_count = 0;  // eigen-directions dropped as nonsmooth;
                                       // centered input always yields >= 1
};

/// Right-multiplies by the centering projector P = I - (1/m) 1 1^T, i.e.
/// removes each row's mean across columns.
inline Matrix apply_centering(const Matrix& z) {
  Matrix out = z;
  const index_t m = z.cols();
  if (m == 0) return out;
  for (index_t i = 0; i < z.rows(); ++i) {
    double mean = 0.0;
    for (index_t j = 0; j < m; ++j) mean += z(i, j);
    mean /= static_cast<double>(m);
    for (index_t j = 0; j < m; ++j) out(i, j) -= mean;
  }
  return out;
}

/// The three gradient pieces of the distance as a function of X1:
///   mean_term  = d||mu1-mu2||^2 / dX1 = (2/m)(mu1-mu2) 1^T
///   trace_term = d tr(Sigma1)   / dX1 = 2 C1 P / sqrt(m-1)
///   sqrt_term  = d tr(sqrt(..)) / dX1 = 2 Sigma2 C1 G P / sqrt(m-1)
/// with G = V diag(1/(2 sqrt(lambda_i))) V^T over unclamped eigenvalues
/// of M = C1^T Sigma2 C1. The total gradient is
/// mean_term + trace_term - 2 * sqrt_term.
struct FidGradientTerms {
  Matrix mean_term;
  Matrix trace_term;
  Matrix sqrt_term;
  FidBreakdown value;
  SpectrumResult spectrum;
  index_t clamped_gradient_count = 0;
};

inline FidGradientTerms fid_gradient_terms(const FeatureMatrix& x1, const GaussianStats& target,
                                           double grad_clamp_ratio = kGradientClampRatio) {
  if (x1.d() != target.dim())
    throw std::invalid_argument("fid_gradient: feature dimension d=" + std::to_string(x1.d()) +
                                " does not match target dimension " + std::to_string(target.dim()));
  const index_t d = x1.d(), m = x1.k();
  const double inv_sqrt_m1 = 1.0 / std::sqrt(static_cast<double>(m - 1));

  const std::vector<double> mu1 = sample_mean(x1);
  const CenteredFactor c1 = center_factor(x1);

  // W = Sigma2 C1, through the factor when that is cheaper.
  Matrix w(d, m);
  if (target.has_factor() && target.factor().k() < d) {
    const Matrix& c2 = target.factor().values();
    w = matmul(c2, matmul_tn(c2, c1.values()));
  } else {
    w = matmul(target.dense_cov(), c1.values());
  }

  Matrix small = symmetrize(matmul_tn(c1.values(), w));
  SymEigResult eig = sym_eig(small, /*want_vectors=*/true);

  FidGradientTerms out;
  out.spectrum = spectrum_from_eigenvalues(eig.eigenvalues);

  const double lambda_max = std::max(out.spectrum.eigenvalues.back(), 0.0);
  const double clamp = grad_clamp_ratio * std::max(lambda_max, 1.0);
  Eigen::VectorXd inv_sqrt(m);
  for (index_t i = 0; i < m; ++i) {
    const double lambda = eig.eigenvalues[static_cast<std::size_t>(i)];
    if (lambda <= clamp) {
      inv_sqrt[i] = 0.0;
      ++out.clamped_gradient_count;
    } else {
      inv_sqrt[i] = 0.5 / std::sqrt(lambda);
    }
  }
  Matrix g(m, m);
  g.map().noalias() =
      eig.eigenvectors.map() * inv_sqrt.asDiagonal() * eig.eigenvectors.map().transpose();

  out.value = assemble_fid(mu1, target.mu(), trace_cov(c1), target.trace(), out.spectrum.trace_sqrt);

  out.mean_term = Matrix(d, m);
  const double scale_mean = 2.0 / static_cast<double>(m);
  for (index_t j = 0; j < m; ++j)
    for (index_t i = 0; i < d; ++i)
      out.mean_term(i, j) =
          scale_mean * (mu1[static_cast<std::size_t>(i)] - target.mu()[static_cast<std::size_t>(i)]);

  Matrix trace_term = c1.values();
  trace_term.map() *= 2.0 * inv_sqrt_m1;
  out.trace_term = apply_centering(trace_term);

  Matrix sqrt_term = matmul(w, g);
  sqrt_term.map() *= 2.0 * inv_sqrt_m1;
  out.sqrt_term = apply_centering(sqrt_term);

  return out;
}

inline FidGradient fid_gradient(const FeatureMatrix& x1, const GaussianStats& target,
                                double grad_clamp_ratio = kGradientClampRatio) {
  FidGradientTerms terms = fid_gradient_terms(x1, target, grad_clamp_ratio);
  FidGradient out;
  out.wrt_features = Matrix(x1.d(), x1.k());
  out.wrt_features.map() =
      terms.mean_term.map() + terms.trace_term.map() - 2.0 * terms.sqrt_term.map();
  require_finite(out.wrt_features, "fid_gradient");
  out.value = terms.value;
  out.spectrum = std::move(terms.spectrum);
  out.clamped_gradient_count = terms.clamped_gradient_count;
  return out;
}

/// Unclamped distance value as a function of the raw feature matrix; the
/// finite-difference probe differentiates this.
inline double fid_value_raw(const Matrix& features, const GaussianStats& target) {
  FeatureMatrix x(features);
  const CenteredFactor c1 = center_factor(x);
  SpectrumResult spectrum = trace_sqrt_auto(c1, target);
  return assemble_fid(sample_mean(x), target.mu(), trace_cov(c1), target.trace(),
                      spectrum.trace_sqrt)
      .raw_total;
}

/// Central-difference comparison against the analytic gradient, entry by
/// entry with per-entry step h = step * (1 + |x_ij|) and relative error
/// |a-f| / (|a|+|f|+1e-8). Checks every entry up to 2000, otherwise a
/// seeded random subset of at least 200.
struct FdCheckResult {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  index_t checked_entries = 0;
  index_t clamped_directions = 0;  // eigen-directions the analytic gradient skipped
};

inline FdCheckResult finite_diff_check(const FeatureMatrix& x1, const GaussianStats& target,
                                       double step, std::uint64_t subset_seed = 0x5eedf00d) {
  if (step <= 0.0) throw std::invalid_argument("finite_diff_check: step must be positive");
  const FidGradient analytic = fid_gradient(x1, target);
  const index_t d = x1.d(), m = x1.k();

  std::vector<std::pair<index_t, index_t>> entries;
  if (d * m <= 2000) {
    for (index_t j = 0; j < m; ++j)
      for (index_t i = 0; i < d; ++i) entries.emplace_back(i, j);
  } else {
    Rng rng(subset_seed);
    const index_t want = std::max<index_t>(200, 0);
    while (static_cast<index_t>(entries.size()) < want) {
      const index_t i = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(d));
      const index_t j = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(m));
      entries.emplace_back(i, j);
    }
  }

  FdCheckResult result;
  result.clamped_directions = analytic.clamped_gradient_count;
  double sum_rel = 0.0;
  Matrix probe = x1.values();
  for (const auto& [i, j] : entries) {
    const double x0 = probe(i, j);
    const double h = step * (1.0 + std::abs(x0));
    probe(i, j) = x0 + h;
    const double f_plus = fid_value_raw(probe, target);
    probe(i, j) = x0 - h;
    const double f_minus = fid_value_raw(probe, target);
    probe(i, j) = x0;
    const double fd = (f_plus - f_minus) / (2.0 * h);
    const double an = analytic.wrt_features(i, j);
    const double rel = std::abs(an - fd) / (std::abs(an) + std::abs(fd) + 1e-8);
    result.max_rel_err = std::max(result.max_rel_err, rel);
    sum_rel += rel;
  }
  result.checked_entries = static_cast<index_t>(entries.size());
  result.mean_rel_err = sum_rel / static_cast<double>(entries.size());
  return result;
}

}  // namespace frechet
