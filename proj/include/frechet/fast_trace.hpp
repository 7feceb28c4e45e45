#pragma once

#include "frechet/eig.hpp"
#include "frechet/stats.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace frechet {

/// How the small Gram matrix was formed. Both routes produce the same
/// matrix in exact arithmetic, M = C1^T Sigma2 C1, since Sigma2 = C2 C2^T.
enum class GramRoute {
  via_pairs,        // M = (C1^T C2)(C2^T C1), O(mdn + m^2 n)
  via_precomputed,  // M = C1^T Sigma2 C1,     O(d^2 m)
};

/// The m x m symmetric PSD matrix whose nonzero eigenvalues equal those of
/// the d x d product Sigma1 Sigma2.
struct SmallGram {
  Matrix values;
  GramRoute route;

  index_t m() const { return values.rows(); }
};

/// Negative eigenvalues of M are numerical noise (M is PSD in exact
/// arithmetic); anything below -severe_negative_ratio * lambda_max is
/// suspicious enough to surface as a diagnostic.
inline constexpr double kSevereNegativeRatio = 1e-8;

/// Eigenvalues of the small Gram matrix with clamping diagnostics.
/// trace_sqrt = sum_i sqrt(max(lambda_i, 0)); the sum runs over all m
/// eigenvalues, the centering-induced zero contributing nothing.
struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending, pre-clamp
  index_t clamped_count = 0;        // eigenvalues < 0, raised to 0
  index_t severe_negative_count = 0;
  double trace_sqrt = 0.0;
};

inline SpectrumResult spectrum_from_eigenvalues(std::vector<double> eigenvalues) {
  SpectrumResult r;
  r.eigenvalues = std::move(eigenvalues);
  const double lambda_max = r.eigenvalues.empty() ? 0.0 : std::max(r.eigenvalues.back(), 0.0);
  const double severe = -kSevereNegativeRatio * lambda_max;
  for (double lambda : r.eigenvalues) {
    if (lambda < 0.0) {
      ++r.clamped_count;
      if (lambda < severe) ++r.severe_negative_count;
    } else {
      r.trace_sqrt += std::sqrt(lambda);
    }
  }
  return r;
}

/// M = (C1^T C2)(C2^T C1).
inline SmallGram small_gram_via_pairs(const CenteredFactor& c1, const CenteredFactor& c2) {
  if (c1.d() != c2.d())
    throw std::invalid_argument("small_gram: factor dimensions differ, d1=" + std::to_string(c1.d()) +
                                " d2=" + std::to_string(c2.d()));
  Matrix cross = matmul_tn(c1.values(), c2.values());  // m x n
  Matrix m = matmul_nt(cross, cross);
  return SmallGram{symmetrize(m), GramRoute::via_pairs};
}

/// M = C1^T Sigma2 C1 for a dense Sigma2.
inline SmallGram small_gram_via_precomputed(const CenteredFactor& c1, const Matrix& sigma2) {
  if (sigma2.rows() != sigma2.cols())
    throw std::invalid_argument("small_gram: Sigma2 is not square");
  if (c1.d() != sigma2.rows())
    throw std::invalid_argument("small_gram: factor dimension d=" + std::to_string(c1.d()) +
                                " does not match Sigma2 dimension " + std::to_string(sigma2.rows()));
  Matrix m = matmul_tn(c1.values(), matmul(sigma2, c1.values()));
  return SmallGram{symmetrize(m), GramRoute::via_precomputed};
}

/// Route by input form: a factor with fewer samples than features goes
/// through the pair products, otherwise Sigma2 is densified first; a dense
/// covariance always uses the precomputed route.
inline SmallGram small_gram(const CenteredFactor& c1, const GaussianStats& s2) {
  if (c1.d() != s2.dim())
    throw std::invalid_argument("small_gram: factor dimension d=" + std::to_string(c1.d()) +
                                " does not match stats dimension " + std::to_string(s2.dim()));
  if (s2.has_factor() && s2.factor().k() < s2.dim())
    return small_gram_via_pairs(c1, s2.factor());
  return small_gram_via_precomputed(c1, s2.dense_cov());
}

/// tr(sqrt(Sigma1 Sigma2)) = sum_i |sqrt(lambda_i(M))| under the positive
/// root convention, with negative eigenvalues clamped to zero.
inline SpectrumResult trace_sqrt_fast(const SmallGram& g) {
  SymEigResult eig = sym_eig(g.values, /*want_vectors=*/false);
  return spectrum_from_eigenvalues(std::move(eig.eigenvalues));
}

/// Exact operation-count costs of the two routes for given m, n, d.
inline double route_cost_via_pairs(index_t m, index_t n, index_t d) {
  const double md = static_cast<double>(m), nd = static_cast<double>(n), dd = static_cast<double>(d);
  return md * dd * nd + md * md * nd + md * md * md;
}

inline double route_cost_via_precomputed(index_t m, index_t d) {
  const double md = static_cast<double>(m), dd = static_cast<double>(d);
  return dd * dd * md + md * md * md;
}

/// Composition of small_gram + trace_sqrt_fast, picking the cheaper route
/// by comparing the actual operation counts (mdn + m^2 n + m^3 versus
/// d^2 m + m^3). Ties go to the precomputed route.
inline SpectrumResult trace_sqrt_auto(const CenteredFactor& c1, const GaussianStats& s2) {
  if (c1.d() != s2.dim())
    throw std::invalid_argument("trace_sqrt_auto: factor dimension d=" + std::to_string(c1.d()) +
                                " does not match stats dimension " + std::to_string(s2.dim()));
  if (s2.has_factor()) {
    const index_t m = c1.k(), n = s2.factor().k(), d = c1.d();
    if (route_cost_via_pairs(m, n, d) < route_cost_via_precomputed(m, d))
      return trace_sqrt_fast(small_gram_via_pairs(c1, s2.factor()));
  }
  return trace_sqrt_fast(small_gram_via_precomputed(c1, s2.dense_cov()));
}

}  // namespace frechet
