// SPDX-License-Identifier: Apache-2.0
#include "acmv/chebconv.hpp"

#include <string>

#include "acmv/errors.hpp"

namespace acmv {

std::vector<nn::Var> cheb_basis(const nn::Var& scaled_laplacian, const nn::Var& signal,
                                int order) {
  if (order < 1) throw ConfigError("Chebyshev order must be at least 1");
  if (scaled_laplacian.rows() != scaled_laplacian.cols() ||
      scaled_laplacian.cols() != signal.rows()) {
    throw ShapeError("cheb_basis: Laplacian " + std::to_string(scaled_laplacian.rows()) +
                     "x" + std::to_string(scaled_laplacian.cols()) + " vs signal with " +
                     std::to_string(signal.rows()) + " nodes");
  }
  std::vector<nn::Var> terms;
  terms.reserve(static_cast<std::size_t>(order));
  terms.push_back(signal);
  if (order > 1) terms.push_back(nn::matmul(scaled_laplacian, signal));
  for (int k = 2; k < order; ++k) {
    terms.push_back(nn::sub(nn::scale(nn::matmul(scaled_laplacian, terms[k - 1]), 2.0),
                            terms[k - 2]));
  }
  return terms;
}

ChebLayer::ChebLayer(std::string name, int order, int in_features, int out_features,
                     Activation activation, bool bias, nn::Rng& rng)
    : order_(order),
      in_features_(in_features),
      out_features_(out_features),
      activation_(activation),
      has_bias_(bias) {
  if (order < 1) throw ConfigError("Chebyshev order must be at least 1");
  if (in_features < 1 || out_features < 1) throw ConfigError("feature counts must be positive");
  weights_ = nn::Param(name + ".theta",
                       nn::glorot_uniform(order * in_features, out_features,
                                          order * in_features, out_features, rng));
  if (has_bias_) bias_ = nn::Param(name + ".bias", nn::Matrix::Zero(1, out_features));
}

Eigen::Block<nn::Matrix> ChebLayer::theta(int k) {
  if (k < 0 || k >= order_) throw BoundsError("filter index outside [0, K)");
  return weights_.value().middleRows(k * in_features_, in_features_);
}

std::vector<nn::Param*> ChebLayer::parameters() {
  std::vector<nn::Param*> out{&weights_};
  if (has_bias_) out.push_back(&bias_);
  return out;
}

std::vector<const nn::Param*> ChebLayer::parameters() const {
  std::vector<const nn::Param*> out{&weights_};
  if (has_bias_) out.push_back(&bias_);
  return out;
}

nn::Var ChebLayer::forward(const nn::Var& scaled_laplacian, const nn::Var& signal,
                           int samples) const {
  if (samples < 1 || signal.cols() != static_cast<Eigen::Index>(in_features_) * samples) {
    throw ShapeError("ChebLayer expects " + std::to_string(in_features_) + " features x " +
                     std::to_string(samples) + " samples, got " +
                     std::to_string(signal.cols()) + " columns");
  }
  nn::Tape& tape = signal.tape();
  const Eigen::Index nodes = signal.rows();
  const Eigen::Index rows = nodes * samples;
  // N x (F * S) feature-major packing is the same storage as (N * S) x F
  const nn::Var theta = tape.param(const_cast<nn::Param&>(weights_));
  const auto basis = cheb_basis(scaled_laplacian, signal, order_);
  nn::Var out;
  for (int k = 0; k < order_; ++k) {
    const nn::Var panel = nn::reshape(basis[k], rows, in_features_);
    const nn::Var term =
        nn::matmul(panel, nn::slice_rows(theta, static_cast<Eigen::Index>(k) * in_features_,
                                         in_features_));
    out = k == 0 ? term : nn::add(out, term);
  }
  if (has_bias_) {
    const nn::Var ones = tape.constant(nn::Matrix::Ones(rows, 1));
    out = nn::add(out, nn::matmul(ones, tape.param(const_cast<nn::Param&>(bias_))));
  }
  out = nn::activate(out, activation_);
  return nn::reshape(out, nodes, static_cast<Eigen::Index>(out_features_) * samples);
}

}  // namespace acmv
