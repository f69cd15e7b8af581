// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "acmv/nn/tape.hpp"

namespace acmv::nn {

using Rng = std::mt19937_64;

/// uniform(-sqrt(6 / (fan_in + fan_out)), +sqrt(...)).
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, int fan_in, int fan_out,
                      Rng& rng);
Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, Rng& rng);

/// Stateless 64-bit mixer for deriving independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace acmv::nn
