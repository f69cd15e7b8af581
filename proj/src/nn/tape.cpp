// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/tape.hpp"

#include "acmv/errors.hpp"

namespace acmv::nn {

Param::Param(std::string name, Matrix init)
    : name_(std::move(name)), value_(std::move(init)) {
  grad_ = Matrix::Zero(value_.rows(), value_.cols());
}

Var Tape::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::param(Param& p) {
  if (auto it = param_ids_.find(&p); it != param_ids_.end()) return Var(this, it->second);
  Node node;
  node.value = p.value();
  node.requires_grad = record_;
  node.param = &p;
  nodes_.push_back(std::move(node));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_ids_.emplace(&p, id);
  return Var(this, id);
}

Var Tape::push(Matrix value, std::initializer_list<int> parents, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  if (record_) {
    for (int p : parents) node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
    if (node.requires_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::push(Matrix value, const std::vector<int>& parents, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  if (record_) {
    for (int p : parents) node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
    if (node.requires_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::grad(int id) {
  Node& node = nodes_[id];
  if (node.grad.size() == 0) node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

void Tape::backward(const Var& loss) {
  if (!record_) throw StateError("backward() on a tape that was not recording");
  if (&loss.tape() != this) throw StateError("loss belongs to a different tape");
  if (loss.rows() != 1 || loss.cols() != 1) throw ShapeError("backward() needs a 1x1 loss");
  if (!nodes_[loss.id()].requires_grad) return;

  grad(loss.id()).setConstant(1.0);
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.size() == 0) continue;
    if (node.backward) node.backward(*this, id);
  }
  for (Node& node : nodes_) {
    if (node.param != nullptr && node.grad.size() != 0) node.param->grad() += node.grad;
  }
}

}  // namespace acmv::nn
