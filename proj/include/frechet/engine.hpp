#pragma once

#include "frechet/baseline.hpp"
#include "frechet/fast_trace.hpp"
#include "frechet/fid.hpp"
#include "frechet/stats.hpp"

#include <string>

namespace frechet {

/// Which computation backs the trace-of-sqrt term. `fast` and `baseline`
/// compute the exact distance; `mean_only` and `diag_only` are the cheap
/// approximations and are labeled as such in every output.
enum class Engine { fast, baseline, mean_only, diag_only };

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::fast: return "fast";
    case Engine::baseline: return "baseline";
    case Engine::mean_only: return "mean-only";
    case Engine::diag_only: return "diag-only";
  }
  return "?";
}

inline bool engine_is_approximation(Engine e) {
  return e == Engine::mean_only || e == Engine::diag_only;
}

/// Full distance between the sample batch and the reference stats through
/// the chosen exact engine.
inline FidBreakdown compute_fid(const FeatureMatrix& fake, const GaussianStats& real, Engine engine) {
  if (fake.d() != real.dim())
    throw std::invalid_argument("compute_fid: fake dimension d=" + std::to_string(fake.d()) +
                                " does not match stats dimension " + std::to_string(real.dim()));
  const std::vector<double> mu1 = sample_mean(fake);
  const CenteredFactor c1 = center_factor(fake);
  const double tr1 = trace_cov(c1);
  const double tr2 = real.trace();

  double tr_sqrt = 0.0;
  switch (engine) {
    case Engine::fast:
      tr_sqrt = trace_sqrt_auto(c1, real).trace_sqrt;
      break;
    case Engine::baseline:
      tr_sqrt = trace_sqrt_baseline(GaussianStats(mu1, c1, fake.k()), real);
      break;
    default:
      throw std::invalid_argument("compute_fid: approximation engines have scalar results; "
                                  "use fid_mean_only / fid_diag_only");
  }
  return assemble_fid(mu1, real.mu(), tr1, tr2, tr_sqrt);
}

}  // namespace frechet
