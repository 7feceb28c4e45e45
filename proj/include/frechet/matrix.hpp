#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace frechet {

using index_t = std::int64_t;

/// Thrown when a computation produces values it cannot stand behind
/// (non-finite results, eigensolver non-convergence). Maps to exit code 2
/// at the CLI boundary; precondition violations use std::invalid_argument
/// and map to exit code 1.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense real matrix, 64-bit floats, column-major. Samples are stored as
/// columns throughout the library.
class Matrix {
public:
  Matrix() = default;

  /// Zero-initialized rows x cols matrix.
  Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
      throw std::invalid_argument("Matrix: negative dimension " +
                                  std::to_string(rows < 0 ? rows : cols));
    data_.assign(static_cast<std::size_t>(rows * cols), 0.0);
  }

  static Matrix identity(index_t n) {
    Matrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(index_t i, index_t j) { return data_[static_cast<std::size_t>(j * rows_ + i)]; }
  double operator()(index_t i, index_t j) const { return data_[static_cast<std::size_t>(j * rows_ + i)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Eigen::Map<Eigen::MatrixXd> map() {
    return Eigen::Map<Eigen::MatrixXd>(data_.data(), rows_, cols_);
  }
  Eigen::Map<const Eigen::MatrixXd> map() const {
    return Eigen::Map<const Eigen::MatrixXd>(data_.data(), rows_, cols_);
  }

  static Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(e.rows(), e.cols());
    m.map() = e;
    return m;
  }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

inline bool all_finite(const Matrix& a) {
  return a.map().allFinite();
}

/// Validates that `a` holds no NaN/Inf; `what` names the value in the error.
inline void require_finite(const Matrix& a, const char* what) {
  if (!all_finite(a))
    throw numerical_error(std::string(what) + ": non-finite entries");
}

/// Matrix product a*b. Dimension mismatch is an error; a non-finite result
/// (overflow, propagated NaN) is reported rather than returned silently.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions differ, a.cols=" +
                                std::to_string(a.cols()) + " b.rows=" + std::to_string(b.rows()));
  Matrix c(a.rows(), b.cols());
  c.map().noalias() = a.map() * b.map();
  require_finite(c, "matmul result");
  return c;
}

/// a^T * b without forming the transpose.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_tn: row counts differ, a.rows=" +
                                std::to_string(a.rows()) + " b.rows=" + std::to_string(b.rows()));
  Matrix c(a.cols(), b.cols());
  c.map().noalias() = a.map().transpose() * b.map();
  require_finite(c, "matmul_tn result");
  return c;
}

/// a * b^T without forming the transpose.
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_nt: column counts differ, a.cols=" +
                                std::to_string(a.cols()) + " b.cols=" + std::to_string(b.cols()));
  Matrix c(a.rows(), b.rows());
  c.map().noalias() = a.map() * b.map().transpose();
  require_finite(c, "matmul_nt result");
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  t.map() = a.map().transpose();
  return t;
}

/// (a + a^T)/2. Floating-point products break exact symmetry at ~1e-16;
/// eigensolver inputs are symmetrized so the solver's preconditions hold.
inline Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("symmetrize: matrix is not square, rows=" +
                                std::to_string(a.rows()) + " cols=" + std::to_string(a.cols()));
  Matrix s(a.rows(), a.cols());
  s.map() = 0.5 * (a.map() + a.map().transpose());
  return s;
}

inline double frobenius_norm(const Matrix& a) { return a.map().norm(); }

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.map().cwiseAbs().maxCoeff();
}

/// Largest relative deviation from symmetry, max|A-A^T| / max(max|A|, tiny).
inline double asymmetry(const Matrix& a) {
  double denom = std::max(max_abs(a), 1e-300);
  return (a.map() - a.map().transpose()).cwiseAbs().maxCoeff() / denom;
}

/// Storage precision for the reduced-precision evaluation mode. Kernels
/// always run in 64-bit arithmetic; f32 mode round-trips values through
/// 32-bit storage between kernel steps to emulate single-precision
/// pipelines.
enum class Precision { f32, f64 };

inline double round_storage(double v, Precision p) {
  return p == Precision::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

inline void round_storage(Matrix& a, Precision p) {
  if (p != Precision::f32) return;
  double* d = a.data();
  for (index_t i = 0, n = a.size(); i < n; ++i) d[i] = static_cast<double>(static_cast<float>(d[i]));
}

inline void round_storage(std::vector<double>& v, Precision p) {
  if (p != Precision::f32) return;
  for (double& x : v) x = static_cast<double>(static_cast<float>(x));
}

}  // namespace frechet
