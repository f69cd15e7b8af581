// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "acmv/errors.hpp"

namespace acmv::nn {
namespace {

double evaluate(const LossFn& loss) {
  Tape tape(false);
  const Var out = loss(tape);
  if (out.rows() != 1 || out.cols() != 1) throw ShapeError("grad_check loss must be 1x1");
  return out.value()(0, 0);
}

}  // namespace

GradCheckResult grad_check(const LossFn& loss, const std::vector<Param*>& params,
                           double epsilon) {
  std::vector<Matrix> saved_grads;
  for (Param* p : params) {
    saved_grads.push_back(p->grad());
    p->zero_grad();
  }
  {
    Tape tape;
    tape.backward(loss(tape));
  }
  std::vector<Matrix> analytic;
  for (std::size_t i = 0; i < params.size(); ++i) {
    analytic.push_back(params[i]->grad());
    params[i]->grad() = saved_grads[i];
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    for (Eigen::Index k = 0; k < p.value().size(); ++k) {
      double& x = p.value().data()[k];
      const double original = x;
      x = original + epsilon;
      const double up = evaluate(loss);
      x = original - epsilon;
      const double down = evaluate(loss);
      x = original;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[i].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error || result.worst_index < 0) {
        result.max_rel_error = rel;
        result.worst_param = p.name();
        result.worst_index = k;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace acmv::nn
