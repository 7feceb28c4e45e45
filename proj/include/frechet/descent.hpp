#pragma once

#include "frechet/engine.hpp"
#include "frechet/gradient.hpp"
#include "frechet/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace frechet {

/// Stand-in for the pretrained encoder network: identity, or a fixed
/// seed-deterministic linear map with i.i.d. N(0, 1/p) weights. Linear
/// encoders have constant Jacobian, so gradients chain through W^T.
class Encoder {
public:
  enum class Kind { identity, fixed_linear };

  static Encoder identity(index_t dim) {
    Encoder e;
    e.kind_ = Kind::identity;
    e.input_dim_ = e.output_dim_ = dim;
    return e;
  }

  static Encoder fixed_linear(index_t input_dim, index_t output_dim, std::uint64_t seed) {
    Encoder e;
    e.kind_ = Kind::fixed_linear;
    e.input_dim_ = input_dim;
    e.output_dim_ = output_dim;
    Rng rng(seed);
    e.weight_ = gaussian_matrix(rng, output_dim, input_dim);
    e.weight_.map() *= 1.0 / std::sqrt(static_cast<double>(input_dim));
    return e;
  }

  Kind kind() const { return kind_; }
  index_t input_dim() const { return input_dim_; }
  index_t output_dim() const { return output_dim_; }
  const Matrix& weight() const { return weight_; }

private:
  Kind kind_ = Kind::identity;
  index_t input_dim_ = 0;
  index_t output_dim_ = 0;
  Matrix weight_;
};

inline FeatureMatrix encode(const Encoder& e, const Matrix& samples) {
  if (samples.rows() != e.input_dim())
    throw std::invalid_argument("encode: sample dimension p=" + std::to_string(samples.rows()) +
                                " does not match encoder input dimension " +
                                std::to_string(e.input_dim()));
  if (e.kind() == Encoder::Kind::identity) return FeatureMatrix(samples);
  return FeatureMatrix(matmul(e.weight(), samples));
}

/// Pulls a feature-space gradient back to sample space.
inline Matrix encoder_backward(const Encoder& e, const Matrix& feature_grad) {
  if (e.kind() == Encoder::Kind::identity) return feature_grad;
  return matmul_tn(e.weight(), feature_grad);
}

/// Keeps optimized samples in a valid range: sigmoid squashing for noise
/// parameters, clipping to [0,1] for real-valued starts, or nothing.
enum class Squash { sigmoid, clip_unit, none };

inline Matrix squash_apply(Squash s, const Matrix& z) {
  Matrix out = z;
  switch (s) {
    case Squash::sigmoid:
      out.map() = out.map().unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      break;
    case Squash::clip_unit:
      out.map() = out.map().cwiseMax(0.0).cwiseMin(1.0);
      break;
    case Squash::none:
      break;
  }
  return out;
}

/// Chain rule through the squash at pre-squash point z. clip_unit passes
/// the gradient only where z lies inside [0,1].
inline Matrix squash_backward(Squash s, const Matrix& z, const Matrix& grad) {
  Matrix out = grad;
  switch (s) {
    case Squash::sigmoid:
      for (index_t i = 0; i < z.size(); ++i) {
        const double sig = 1.0 / (1.0 + std::exp(-z.data()[i]));
        out.data()[i] *= sig * (1.0 - sig);
      }
      break;
    case Squash::clip_unit:
      for (index_t i = 0; i < z.size(); ++i)
        if (z.data()[i] < 0.0 || z.data()[i] > 1.0) out.data()[i] = 0.0;
      break;
    case Squash::none:
      break;
  }
  return out;
}

enum class AttackMode { minimize_from_noise, maximize_from_real };

struct AttackConfig {
  AttackMode mode = AttackMode::minimize_from_noise;
  index_t steps = 500;
  double learning_rate = 1.0;
  index_t batch = 64;
  Squash squash = Squash::sigmoid;
  std::uint64_t seed = 0;
  index_t eval_every = 10;
  bool scale_loss = false;
};

struct AttackRecord {
  index_t step;
  double train_fid;
  double val_fid;
};

struct AttackTrace {
  std::vector<AttackRecord> records;
};

namespace detail {

/// Densifies factor stats once when the factor is at least as wide as the
/// dimension, so per-step evaluations skip the repeated densification.
inline GaussianStats cache_for_repeated_eval(const GaussianStats& s) {
  if (s.has_factor() && s.factor().k() >= s.dim())
    return GaussianStats(s.mu(), FullCov{s.dense_cov()}, s.sample_count());
  return s;
}

inline double eval_fid_total(const Matrix& features, const GaussianStats& stats) {
  FeatureMatrix x(features);
  const CenteredFactor c1 = center_factor(x);
  SpectrumResult spectrum = trace_sqrt_auto(c1, stats);
  return assemble_fid(sample_mean(x), stats.mu(), trace_cov(c1), stats.trace(),
                      spectrum.trace_sqrt)
      .total;
}

inline void check_squash_range(Squash s, const Matrix& x, index_t step) {
  if (s == Squash::none) return;
  for (index_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    const bool ok = s == Squash::sigmoid ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok)
      throw numerical_error("run_attack: squashed value " + std::to_string(v) +
                            " out of range at step " + std::to_string(step));
  }
}

}  // namespace detail

/// Plain gradient descent (or ascent) on the pre-squash parameters,
/// recording train and validation FID of the squashed, encoded batch at
/// step 0, every eval_every steps, and at the final step. Deterministic:
/// identical config and inputs give a bit-identical trace.
inline AttackTrace run_attack(const AttackConfig& cfg, const Encoder& encoder,
                              const GaussianStats& train_stats, const GaussianStats& val_stats,
                              const Matrix& init) {
  if (cfg.steps < 0) throw std::invalid_argument("run_attack: steps must be >= 0");
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("run_attack: learning rate must be > 0");
  if (cfg.eval_every < 1) throw std::invalid_argument("run_attack: eval_every must be >= 1");
  if (init.rows() != encoder.input_dim())
    throw std::invalid_argument("run_attack: init dimension p=" + std::to_string(init.rows()) +
                                " does not match encoder input dimension " +
                                std::to_string(encoder.input_dim()));
  if (init.cols() != cfg.batch)
    throw std::invalid_argument("run_attack: init has " + std::to_string(init.cols()) +
                                " columns, batch is " + std::to_string(cfg.batch));
  if (train_stats.dim() != encoder.output_dim() || val_stats.dim() != encoder.output_dim())
    throw std::invalid_argument("run_attack: stats dimension does not match encoder output dimension " +
                                std::to_string(encoder.output_dim()));

  const GaussianStats train = detail::cache_for_repeated_eval(train_stats);
  const GaussianStats val = detail::cache_for_repeated_eval(val_stats);
  const double direction = cfg.mode == AttackMode::minimize_from_noise ? -1.0 : 1.0;

  AttackTrace trace;
  Matrix z = init;

  auto record = [&](index_t step) {
    const Matrix x = squash_apply(cfg.squash, z);
    detail::check_squash_range(cfg.squash, x, step);
    const FeatureMatrix features = encode(encoder, x);
    const double train_fid = detail::eval_fid_total(features.values(), train);
    const double val_fid = detail::eval_fid_total(features.values(), val);
    if (!std::isfinite(train_fid) || !std::isfinite(val_fid))
      throw numerical_error("run_attack: non-finite FID at step " + std::to_string(step));
    trace.records.push_back(AttackRecord{step, train_fid, val_fid});
  };

  record(0);
  for (index_t step = 1; step <= cfg.steps; ++step) {
    const Matrix x = squash_apply(cfg.squash, z);
    const FeatureMatrix features = encode(encoder, x);
    const FidGradient g = fid_gradient(features, train);
    if (!std::isfinite(g.value.total))
      throw numerical_error("run_attack: non-finite FID at step " + std::to_string(step));
    Matrix gz = squash_backward(cfg.squash, z, encoder_backward(encoder, g.wrt_features));
    double scale = cfg.learning_rate;
    if (cfg.scale_loss) scale /= std::max(g.value.total, 1e-12);
    z.map() += direction * scale * gz.map();
    if (step % cfg.eval_every == 0 || step == cfg.steps) record(step);
  }
  return trace;
}

/// Draws m samples from N(mu, Sigma): mu + C g with Sigma = C C^T, the
/// factor coming either from the stats themselves or from sqrt_psd.
inline Matrix sample_from_stats(const GaussianStats& stats, index_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_from_stats: m must be >= 1");
  const index_t d = stats.dim();
  Matrix result(d, m);
  if (stats.has_factor()) {
    const Matrix& c = stats.factor().values();
    Matrix g = gaussian_matrix(rng, c.cols(), m);
    result.map().noalias() = c.map() * g.map();
  } else {
    Matrix root = sqrt_psd(stats.full_cov()).values;
    Matrix g = gaussian_matrix(rng, d, m);
    result.map().noalias() = root.map() * g.map();
  }
  for (index_t j = 0; j < m; ++j)
    for (index_t i = 0; i < d; ++i) result(i, j) += stats.mu()[static_cast<std::size_t>(i)];
  return result;
}

}  // namespace frechet
