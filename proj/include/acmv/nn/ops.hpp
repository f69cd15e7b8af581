// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "acmv/nn/tape.hpp"

namespace acmv::nn {

enum class Activation { relu, tanh, identity };

Var matmul(const Var& a, const Var& b);     // a b
Var matmul_tn(const Var& a, const Var& b);  // a^T b
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
/// a + col broadcast over the columns of a. col is rows(a) x 1.
Var add_col(const Var& a, const Var& col);
Var scale(const Var& a, double factor);
/// alpha * a + beta, elementwise.
Var affine(const Var& a, double alpha, double beta);

Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var activate(const Var& a, Activation f);

Var concat_rows(std::span<const Var> parts);
Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
/// Same column-major storage, new shape.
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);
/// out.col(j) = a.col(index[j]); gradients scatter-add back.
Var gather_cols(const Var& a, std::span<const int> index);

/// y = W^T x + b with W p x q, x p x B, b q x 1.
Var dense(const Var& x, const Var& weight, const Var& bias);

/// Rows `index[j]` of a K x d table, returned as the columns of a d x B
/// matrix. Backward touches only the rows that were read.
Var embedding_lookup(const Var& table, std::span<const int> index);

/// Column-wise softmax with max subtraction.
Var softmax_cols(const Var& a);

Var sum(const Var& a);
/// (1 / size) * sum((pred - target)^2), 1 x 1.
Var mse(const Var& pred, const Var& target);

/// Plain-matrix softmax used outside the tape.
Eigen::VectorXd softmax(const Eigen::VectorXd& z);

}  // namespace acmv::nn
