// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace acmv::nn {

using Matrix = Eigen::MatrixXd;

/// A learnable array with its gradient accumulator.
class Param {
 public:
  Param() = default;
  Param(std::string name, Matrix init);

  const std::string& name() const noexcept { return name_; }
  Matrix& value() noexcept { return value_; }
  const Matrix& value() const noexcept { return value_; }
  Matrix& grad() noexcept { return grad_; }
  const Matrix& grad() const noexcept { return grad_; }
  Eigen::Index size() const noexcept { return value_.size(); }

  void zero_grad() { grad_.setZero(); }

 private:
  std::string name_;
  Matrix value_;
  Matrix grad_;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Tape& tape() const { return *tape_; }
  int id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Records a computation as a list of nodes in creation order; `backward`
/// walks them in reverse and accumulates into the Params that were read.
///
/// A tape built with `record = false` only evaluates: no closures are kept
/// and `backward` is rejected.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  Var constant(Matrix value);
  Var param(Param& p);

  /// Adds an op node. `backward` is dropped unless some parent needs a
  /// gradient.
  Var push(Matrix value, std::initializer_list<int> parents, BackwardFn backward);
  Var push(Matrix value, const std::vector<int>& parents, BackwardFn backward);

  const Matrix& value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  /// Gradient buffer for node `id`, zero-allocated on first use.
  Matrix& grad(int id);
  const Matrix& upstream(int id) const { return nodes_[id].grad; }

  /// Seeds d(loss)/d(loss) = 1 for a 1x1 node and propagates.
  void backward(const Var& loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Param* param = nullptr;
    BackwardFn backward;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<const Param*, int> param_ids_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

}  // namespace acmv::nn
