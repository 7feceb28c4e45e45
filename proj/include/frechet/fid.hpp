#pragma once

#include "frechet/stats.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace frechet {

/// The four terms of the squared Frechet distance between two Gaussians,
///   ||mu1-mu2||^2 + tr(Sigma1) + tr(Sigma2) - 2 tr(sqrt(Sigma1 Sigma2)),
/// plus their sum. `raw_total` is the untouched sum; `total` is the
/// headline value, clamped at 0 because tiny negative sums (|raw| ~ 1e-6)
/// are rounding noise on a squared metric.
struct FidBreakdown {
  double mean_sq_diff = 0.0;
  double tr_sigma1 = 0.0;
  double tr_sigma2 = 0.0;
  double tr_sqrt = 0.0;
  double raw_total = 0.0;
  double total = 0.0;
};

/// Assembles the distance from precomputed pieces. All trace inputs must
/// be nonnegative.
inline FidBreakdown assemble_fid(const std::vector<double>& mu1, const std::vector<double>& mu2,
                                 double tr1, double tr2, double tr_sqrt) {
  if (tr1 < 0.0 || tr2 < 0.0 || tr_sqrt < 0.0)
    throw std::invalid_argument("assemble_fid: negative trace input (tr1=" + std::to_string(tr1) +
                                " tr2=" + std::to_string(tr2) + " tr_sqrt=" + std::to_string(tr_sqrt) + ")");
  FidBreakdown b;
  b.mean_sq_diff = squared_distance(mu1, mu2);
  b.tr_sigma1 = tr1;
  b.tr_sigma2 = tr2;
  b.tr_sqrt = tr_sqrt;
  b.raw_total = b.mean_sq_diff + b.tr_sigma1 + b.tr_sigma2 - 2.0 * b.tr_sqrt;
  b.total = b.raw_total < 0.0 ? 0.0 : b.raw_total;
  return b;
}

/// ||mu1 - mu2||^2 alone. An approximation: omitting the trace terms can
/// introduce arbitrarily large error.
inline double fid_mean_only(const GaussianStats& s1, const GaussianStats& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("fid_mean_only: dimension mismatch, d1=" + std::to_string(s1.dim()) +
                                " d2=" + std::to_string(s2.dim()));
  return squared_distance(s1.mu(), s2.mu());
}

/// The distance with both covariances replaced by their diagonals; the
/// trace-of-sqrt term becomes sum_i sqrt(Sigma1_ii Sigma2_ii). Also an
/// approximation. A negative diagonal entry signals corrupted stats.
inline double fid_diag_only(const GaussianStats& s1, const GaussianStats& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("fid_diag_only: dimension mismatch, d1=" + std::to_string(s1.dim()) +
                                " d2=" + std::to_string(s2.dim()));
  const std::vector<double> d1 = s1.cov_diagonal();
  const std::vector<double> d2 = s2.cov_diagonal();
  double cov_term = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    if (d1[i] < 0.0 || d2[i] < 0.0)
      throw std::invalid_argument("fid_diag_only: negative covariance diagonal at index " +
                                  std::to_string(i));
    cov_term += d1[i] + d2[i] - 2.0 * std::sqrt(d1[i] * d2[i]);
  }
  return squared_distance(s1.mu(), s2.mu()) + cov_term;
}

}  // namespace frechet
