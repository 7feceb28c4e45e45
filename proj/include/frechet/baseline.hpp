#pragma once

#include "frechet/eig.hpp"
#include "frechet/fast_trace.hpp"
#include "frechet/rng.hpp"
#include "frechet/stats.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace frechet {

/// The unique PSD square root of a PSD matrix, via spectral decomposition
/// V diag(sqrt(max(lambda,0))) V^T. Matches the positive-root convention.
struct PsdSquareRoot {
  Matrix values;
};

inline constexpr double kSqrtPsdAsymmetryTol = 1e-8;

inline PsdSquareRoot sqrt_psd(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("sqrt_psd: matrix is not square");
  if (asymmetry(sigma) > kSqrtPsdAsymmetryTol)
    throw std::invalid_argument("sqrt_psd: input asymmetry exceeds tolerance");
  SymEigResult eig = sym_eig(sigma, /*want_vectors=*/true);
  const index_t d = sigma.rows();
  Eigen::VectorXd sqrt_vals(d);
  for (index_t i = 0; i < d; ++i)
    sqrt_vals[i] = eig.eigenvalues[static_cast<std::size_t>(i)] > 0.0
                       ? std::sqrt(eig.eigenvalues[static_cast<std::size_t>(i)])
                       : 0.0;
  Matrix root(d, d);
  root.map().noalias() =
      eig.eigenvectors.map() * sqrt_vals.asDiagonal() * eig.eigenvectors.map().transpose();
  return PsdSquareRoot{symmetrize(root)};
}

/// O(d^3) reference for tr(sqrt(Sigma1 Sigma2)): eigenvalues of the
/// symmetric sandwich sqrt(Sigma1) Sigma2 sqrt(Sigma1), which is similar
/// to Sigma1 Sigma2 and so shares its spectrum.
inline double trace_sqrt_baseline(const GaussianStats& s1, const GaussianStats& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("trace_sqrt_baseline: dimension mismatch, d1=" +
                                std::to_string(s1.dim()) + " d2=" + std::to_string(s2.dim()));
  Matrix root1 = sqrt_psd(s1.dense_cov()).values;
  Matrix sandwich = matmul(root1, matmul(s2.dense_cov(), root1));
  SymEigResult eig = sym_eig(sandwich, /*want_vectors=*/false);
  double trace = 0.0;
  for (double lambda : eig.eigenvalues)
    if (lambda > 0.0) trace += std::sqrt(lambda);
  return trace;
}

/// Eigenvalues of the sandwich sqrt(Sigma1) Sigma2 sqrt(Sigma1), ascending.
/// Exposed for the spectrum-identity check against the small Gram matrix.
inline std::vector<double> sandwich_eigenvalues(const GaussianStats& s1, const GaussianStats& s2) {
  Matrix root1 = sqrt_psd(s1.dense_cov()).values;
  Matrix sandwich = matmul(root1, matmul(s2.dense_cov(), root1));
  return sym_eig(sandwich, /*want_vectors=*/false).eigenvalues;
}

/// One numerical-error measurement with C1 = C2, where the exact answer
/// tr(C1 C1^T) is a squared Frobenius norm. Compares the full-matrix
/// square-root route against the small-eigenproblem route at the
/// requested storage precision (kernels stay in 64-bit arithmetic; f32
/// round-trips every intermediate matrix through 32-bit storage).
struct NumerrCase {
  double ground_truth = 0.0;
  double err_baseline_fullsqrt = 0.0;
  double err_fast = 0.0;
};

inline NumerrCase numerr_case(Rng& rng, index_t d, index_t m, Precision precision) {
  if (d < 2 || m < 2) throw std::invalid_argument("numerr_case: d and m must be >= 2");

  Matrix x = gaussian_matrix(rng, d, m);
  round_storage(x, precision);
  Matrix c = center_factor(FeatureMatrix(x)).values();
  round_storage(c, precision);

  NumerrCase out;
  const double fnorm = frobenius_norm(c);
  out.ground_truth = fnorm * fnorm;

  // Full-matrix route: tr(sqrt((C C^T)^2)) via spectral decomposition.
  {
    Matrix sigma = symmetrize(matmul_nt(c, c));
    round_storage(sigma, precision);
    Matrix squared = symmetrize(matmul(sigma, sigma));
    round_storage(squared, precision);
    SymEigResult eig = sym_eig(squared, /*want_vectors=*/true);
    round_storage(eig.eigenvalues, precision);
    round_storage(eig.eigenvectors, precision);
    const index_t n = squared.rows();
    Eigen::VectorXd sqrt_vals(n);
    for (index_t i = 0; i < n; ++i)
      sqrt_vals[i] = eig.eigenvalues[static_cast<std::size_t>(i)] > 0.0
                         ? std::sqrt(eig.eigenvalues[static_cast<std::size_t>(i)])
                         : 0.0;
    Matrix root(n, n);
    root.map().noalias() =
        eig.eigenvectors.map() * sqrt_vals.asDiagonal() * eig.eigenvectors.map().transpose();
    round_storage(root, precision);
    double trace = 0.0;
    for (index_t i = 0; i < n; ++i) trace += root(i, i);
    out.err_baseline_fullsqrt = std::abs(out.ground_truth - trace);
  }

  // Small-eigenproblem route: tr over sqrt of eigenvalues of (C^T C)^2.
  {
    Matrix gram = symmetrize(matmul_tn(c, c));
    round_storage(gram, precision);
    Matrix m2 = symmetrize(matmul(gram, gram));
    round_storage(m2, precision);
    SymEigResult eig = sym_eig(m2, /*want_vectors=*/false);
    round_storage(eig.eigenvalues, precision);
    SpectrumResult spectrum = spectrum_from_eigenvalues(std::move(eig.eigenvalues));
    out.err_fast = std::abs(out.ground_truth - spectrum.trace_sqrt);
  }
  return out;
}

}  // namespace frechet
