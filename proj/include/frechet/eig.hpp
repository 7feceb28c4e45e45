#pragma once

#include "frechet/matrix.hpp"

#include <vector>

namespace frechet {

/// Eigendecomposition of a symmetric matrix. Eigenvalues ascending;
/// eigenvectors (columns, orthonormal) only present when requested.
struct SymEigResult {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  bool has_vectors = false;
};

/// Symmetric eigensolve. The input is symmetrized as (A+A^T)/2 first, so
/// callers may pass products that are symmetric only up to rounding.
/// Residual contract: ||A v_i - lambda_i v_i|| <= 1e-10 * ||A||_2 for
/// every returned pair when vectors are requested (d <= 2048).
inline SymEigResult sym_eig(const Matrix& a, bool want_vectors) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("sym_eig: matrix is not square, rows=" +
                                std::to_string(a.rows()) + " cols=" + std::to_string(a.cols()));
  Eigen::MatrixXd sym = 0.5 * (a.map() + a.map().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(sym, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numerical_error("sym_eig: eigensolver failed to converge, n=" + std::to_string(a.rows()));

  SymEigResult result;
  result.eigenvalues.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
  for (double v : result.eigenvalues)
    if (!std::isfinite(v)) throw numerical_error("sym_eig: non-finite eigenvalue");
  if (want_vectors) {
    result.eigenvectors = Matrix::from_eigen(solver.eigenvectors());
    require_finite(result.eigenvectors, "sym_eig eigenvectors");
    result.has_vectors = true;
  }
  return result;
}

}  // namespace frechet
