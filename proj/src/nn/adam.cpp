// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/adam.hpp"

#include <cmath>

namespace acmv::nn {

Adam::Adam(std::vector<Param*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  first_moment_.reserve(params_.size());
  second_moment_.reserve(params_.size());
  for (const Param* p : params_) {
    first_moment_.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
    second_moment_.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
  }
}

void Adam::step() {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    auto m = first_moment_[i].array();
    auto v = second_moment_[i].array();
    const auto g = p.grad().array();
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g * g;
    p.value().array() -= config_.lr * (m / c1) / ((v / c2).sqrt() + config_.epsilon);
    p.zero_grad();
  }
}

void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

double global_grad_norm(const std::vector<Param*>& params) {
  double sq = 0.0;
  for (const Param* p : params) sq += p->grad().squaredNorm();
  return std::sqrt(sq);
}

double clip_grad_norm(const std::vector<Param*>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (Param* p : params) p->grad() *= factor;
  }
  return norm;
}

}  // namespace acmv::nn
