// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "acmv/nn/tape.hpp"

namespace acmv::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

/// Builds the scalar loss on a tape. Called once with a recording tape for
/// the analytic gradient, then repeatedly with non-recording tapes.
using LossFn = std::function<Var(Tape&)>;

/// Compares reverse-mode gradients to central differences
/// (f(x + eps) - f(x - eps)) / 2 eps for every entry of every param.
/// Relative error uses max(|a|, |n|, 1e-8) as denominator.
GradCheckResult grad_check(const LossFn& loss, const std::vector<Param*>& params,
                           double epsilon = 1e-5);

}  // namespace acmv::nn
