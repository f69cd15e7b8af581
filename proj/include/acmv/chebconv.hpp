// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "acmv/nn/init.hpp"
#include "acmv/nn/ops.hpp"

namespace acmv {

using nn::Activation;

/// T_0(L)H, ..., T_{K-1}(L)H by the three-term recursion, applied to the
/// N x (F * S) signal panel directly. Never forms T_k(L) itself.
///
/// Signals for S samples are packed feature-major: column f * S + s holds
/// feature f of sample s. With S = 1 this is the plain N x F matrix.
std::vector<nn::Var> cheb_basis(const nn::Var& scaled_laplacian, const nn::Var& signal,
                                int order);

/// One Chebyshev graph convolution: f(sum_k T_k(L) H theta_k).
///
/// theta is stored as a single (K * F_in) x F_out parameter whose row block
/// k is theta_k.
class ChebLayer {
 public:
  ChebLayer(std::string name, int order, int in_features, int out_features,
            Activation activation, bool bias, nn::Rng& rng);

  int order() const noexcept { return order_; }
  int in_features() const noexcept { return in_features_; }
  int out_features() const noexcept { return out_features_; }
  Activation activation() const noexcept { return activation_; }

  nn::Param& weights() noexcept { return weights_; }
  const nn::Param& weights() const noexcept { return weights_; }
  /// Row block k of the filter tensor (F_in x F_out).
  Eigen::Block<nn::Matrix> theta(int k);

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;

  /// signal: N x (F_in * samples), packed as in cheb_basis. Returns
  /// N x (F_out * samples) in the same packing.
  nn::Var forward(const nn::Var& scaled_laplacian, const nn::Var& signal,
                  int samples) const;

 private:
  int order_;
  int in_features_;
  int out_features_;
  Activation activation_;
  bool has_bias_;
  nn::Param weights_;
  nn::Param bias_;
};

}  // namespace acmv
