// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/init.hpp"

#include <cmath>

namespace acmv::nn {
namespace {

// 53 random mantissa bits -> [0, 1); independent of the standard library's
// distribution implementations
double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = lo + (hi - lo) * unit(rng);
  }
  return m;
}

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, int fan_in, int fan_out,
                      Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform(rows, cols, -limit, limit, rng);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace acmv::nn
