#pragma once

#include "frechet/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace frechet {

/// Deterministic 64-bit generator (splitmix64). Same seed, same stream,
/// bit for bit, on every platform. The normal transform is spelled out
/// below instead of delegating to std::normal_distribution, whose output
/// sequence is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0, 1]; never 0, so log() below is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// One pair of independent N(0,1) variates via Box-Muller. Consumes
  /// exactly two uniforms.
  void next_normal_pair(double& z0, double& z1) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(t);
    z1 = r * std::sin(t);
  }

  double next_normal() {
    double z0, z1;
    next_normal_pair(z0, z1);
    return z0;
  }

private:
  std::uint64_t state_;
  std::uint64_t seed_;
};

/// rows x cols matrix of i.i.d. N(0,1) entries, filled column-major from
/// the generator stream.
inline Matrix gaussian_matrix(Rng& rng, index_t rows, index_t cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("gaussian_matrix: dimensions must be >= 1");
  Matrix m(rows, cols);
  double* d = m.data();
  const index_t n = m.size();
  index_t i = 0;
  for (; i + 1 < n; i += 2) rng.next_normal_pair(d[i], d[i + 1]);
  if (i < n) d[i] = rng.next_normal();
  return m;
}

}  // namespace frechet
