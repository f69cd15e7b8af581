// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "acmv/nn/init.hpp"
#include "acmv/nn/ops.hpp"

namespace acmv {

/// Gated recurrent unit:
///   z = sigmoid(M_z p + O_z h + b_z)
///   r = sigmoid(M_r p + O_r h + b_r)
///   c = tanh(M_h p + r * (O_h h) + b_h)
///   h' = (1 - z) * h + z * c
/// Inputs and states are column vectors; a batch is a matrix of columns.
class GruCell {
 public:
  GruCell(std::string name, int input_dim, int hidden_dim, nn::Rng& rng);

  int input_dim() const noexcept { return input_dim_; }
  int hidden_dim() const noexcept { return hidden_dim_; }

  struct Gate {
    nn::Param input;      // M: hidden x input
    nn::Param recurrent;  // O: hidden x hidden
    nn::Param bias;       // b: hidden x 1
  };

  Gate& update() noexcept { return z_; }
  Gate& reset() noexcept { return r_; }
  Gate& candidate() noexcept { return h_; }

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;

  nn::Var step(const nn::Var& input, const nn::Var& hidden) const;

  /// Folds step() over the sequence from h_0 = 0 and returns the last state.
  nn::Var unroll(std::span<const nn::Var> inputs) const;

 private:
  int input_dim_;
  int hidden_dim_;
  Gate z_;
  Gate r_;
  Gate h_;
};

}  // namespace acmv
