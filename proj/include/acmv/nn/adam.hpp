// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "acmv/nn/tape.hpp"

namespace acmv::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Zeroes the gradients after every step.
class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig config = {});

  void step();
  std::int64_t step_count() const noexcept { return steps_; }
  const AdamConfig& config() const noexcept { return config_; }
  void set_lr(double lr) noexcept { config_.lr = lr; }

 private:
  std::vector<Param*> params_;
  AdamConfig config_;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  std::int64_t steps_ = 0;
};

void zero_grads(const std::vector<Param*>& params);

/// L2 norm over every gradient entry.
double global_grad_norm(const std::vector<Param*>& params);

/// Rescales gradients so their global norm is at most `max_norm`. Returns
/// the norm before clipping.
double clip_grad_norm(const std::vector<Param*>& params, double max_norm);

}  // namespace acmv::nn
