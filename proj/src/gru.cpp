// SPDX-License-Identifier: Apache-2.0
#include "acmv/gru.hpp"

#include <string>

#include "acmv/errors.hpp"

namespace acmv {
namespace {

GruCell::Gate make_gate(const std::string& name, int input_dim, int hidden_dim,
                        nn::Rng& rng) {
  return GruCell::Gate{
      nn::Param(name + ".input",
                nn::glorot_uniform(hidden_dim, input_dim, input_dim, hidden_dim, rng)),
      nn::Param(name + ".recurrent",
                nn::glorot_uniform(hidden_dim, hidden_dim, hidden_dim, hidden_dim, rng)),
      nn::Param(name + ".bias", nn::Matrix::Zero(hidden_dim, 1))};
}

nn::Var param(nn::Tape& tape, const nn::Param& p) {
  return tape.param(const_cast<nn::Param&>(p));
}

}  // namespace

GruCell::GruCell(std::string name, int input_dim, int hidden_dim, nn::Rng& rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) throw ConfigError("GRU dimensions must be positive");
  z_ = make_gate(name + ".z", input_dim, hidden_dim, rng);
  r_ = make_gate(name + ".r", input_dim, hidden_dim, rng);
  h_ = make_gate(name + ".h", input_dim, hidden_dim, rng);
}

std::vector<nn::Param*> GruCell::parameters() {
  return {&z_.input, &z_.recurrent, &z_.bias, &r_.input, &r_.recurrent,
          &r_.bias,  &h_.input,     &h_.recurrent, &h_.bias};
}

std::vector<const nn::Param*> GruCell::parameters() const {
  return {&z_.input, &z_.recurrent, &z_.bias, &r_.input, &r_.recurrent,
          &r_.bias,  &h_.input,     &h_.recurrent, &h_.bias};
}

nn::Var GruCell::step(const nn::Var& input, const nn::Var& hidden) const {
  if (input.rows() != input_dim_ || hidden.rows() != hidden_dim_ ||
      input.cols() != hidden.cols()) {
    throw ShapeError("GRU step: input " + std::to_string(input.rows()) + "x" +
                     std::to_string(input.cols()) + ", hidden " +
                     std::to_string(hidden.rows()) + "x" + std::to_string(hidden.cols()) +
                     ", cell expects " + std::to_string(input_dim_) + " -> " +
                     std::to_string(hidden_dim_));
  }
  nn::Tape& tape = input.tape();
  auto gate_sum = [&](const Gate& g, const nn::Var& recurrent_term) {
    return nn::add_col(nn::add(nn::matmul(param(tape, g.input), input), recurrent_term),
                       param(tape, g.bias));
  };
  const nn::Var z =
      nn::sigmoid(gate_sum(z_, nn::matmul(param(tape, z_.recurrent), hidden)));
  const nn::Var r =
      nn::sigmoid(gate_sum(r_, nn::matmul(param(tape, r_.recurrent), hidden)));
  const nn::Var candidate = nn::tanh(
      gate_sum(h_, nn::hadamard(r, nn::matmul(param(tape, h_.recurrent), hidden))));
  return nn::add(nn::hadamard(nn::affine(z, -1.0, 1.0), hidden),
                 nn::hadamard(z, candidate));
}

nn::Var GruCell::unroll(std::span<const nn::Var> inputs) const {
  if (inputs.empty()) throw EmptyDatasetError("GRU unroll over an empty sequence");
  nn::Tape& tape = inputs.front().tape();
  nn::Var h = tape.constant(nn::Matrix::Zero(hidden_dim_, inputs.front().cols()));
  for (const nn::Var& p : inputs) h = step(p, h);
  return h;
}

}  // namespace acmv
