// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/ops.hpp"

#include <cmath>
#include <string>

#include "acmv/errors.hpp"

namespace acmv::nn {
namespace {

std::string shape_of(const Var& v) {
  return std::to_string(v.rows()) + "x" + std::to_string(v.cols());
}

void same_tape(const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw StateError("operands live on different tapes");
}

void same_shape(const Var& a, const Var& b, const char* op) {
  same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " + shape_of(a) + " and " + shape_of(b));
  }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  same_tape(a, b);
  if (a.cols() != b.rows()) throw ShapeError("matmul: " + shape_of(a) + " * " + shape_of(b));
  const int ia = a.id(), ib = b.id();
  return a.tape().push(a.value() * b.value(), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& g = t.upstream(self);
    if (t.requires_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
    if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
  });
}

Var matmul_tn(const Var& a, const Var& b) {
  same_tape(a, b);
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: " + shape_of(a) + "^T * " + shape_of(b));
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().push(a.value().transpose() * b.value(), {ia, ib},
                       [ia, ib](Tape& t, int self) {
                         const Matrix& g = t.upstream(self);
                         if (t.requires_grad(ia)) t.grad(ia).noalias() += t.value(ib) * g.transpose();
                         if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia) * g;
                       });
}

Var add(const Var& a, const Var& b) {
  same_shape(a, b, "add");
  const int ia = a.id(), ib = b.id();
  return a.tape().push(a.value() + b.value(), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& g = t.upstream(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ib)) t.grad(ib) += g;
  });
}

Var sub(const Var& a, const Var& b) {
  same_shape(a, b, "sub");
  const int ia = a.id(), ib = b.id();
  return a.tape().push(a.value() - b.value(), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& g = t.upstream(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ib)) t.grad(ib) -= g;
  });
}

Var hadamard(const Var& a, const Var& b) {
  same_shape(a, b, "hadamard");
  const int ia = a.id(), ib = b.id();
  return a.tape().push(a.value().cwiseProduct(b.value()), {ia, ib},
                       [ia, ib](Tape& t, int self) {
                         const Matrix& g = t.upstream(self);
                         if (t.requires_grad(ia)) t.grad(ia) += g.cwiseProduct(t.value(ib));
                         if (t.requires_grad(ib)) t.grad(ib) += g.cwiseProduct(t.value(ia));
                       });
}

Var add_col(const Var& a, const Var& col) {
  same_tape(a, col);
  if (col.cols() != 1 || col.rows() != a.rows()) {
    throw ShapeError("add_col: " + shape_of(a) + " + broadcast " + shape_of(col));
  }
  const int ia = a.id(), ic = col.id();
  Matrix out = a.value();
  out.colwise() += col.value().col(0);
  return a.tape().push(std::move(out), {ia, ic}, [ia, ic](Tape& t, int self) {
    const Matrix& g = t.upstream(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ic)) t.grad(ic) += g.rowwise().sum();
  });
}

Var scale(const Var& a, double factor) { return affine(a, factor, 0.0); }

Var affine(const Var& a, double alpha, double beta) {
  const int ia = a.id();
  Matrix out = (alpha * a.value().array() + beta).matrix();
  return a.tape().push(std::move(out), {ia}, [ia, alpha](Tape& t, int self) {
    t.grad(ia) += alpha * t.upstream(self);
  });
}

Var sigmoid(const Var& a) {
  const int ia = a.id();
  Matrix out = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    const auto y = t.value(self).array();
    t.grad(ia).array() += t.upstream(self).array() * y * (1.0 - y);
  });
}

Var tanh(const Var& a) {
  const int ia = a.id();
  Matrix out = a.value().array().tanh().matrix();
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    const auto y = t.value(self).array();
    t.grad(ia).array() += t.upstream(self).array() * (1.0 - y * y);
  });
}

Var relu(const Var& a) {
  const int ia = a.id();
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    t.grad(ia).array() +=
        (t.value(ia).array() > 0.0).select(t.upstream(self).array(), 0.0);
  });
}

Var activate(const Var& a, Activation f) {
  switch (f) {
    case Activation::relu:
      return relu(a);
    case Activation::tanh:
      return tanh(a);
    case Activation::identity:
      return a;
  }
  return a;
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  Tape& tape = parts.front().tape();
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  for (const Var& p : parts) {
    same_tape(parts.front(), p);
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    ids.push_back(p.id());
    offsets.push_back(rows);
    rows += p.rows();
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.middleRows(offsets[i], parts[i].rows()) = parts[i].value();
  }
  return tape.push(std::move(out), ids, [ids, offsets](Tape& t, int self) {
    const Matrix& g = t.upstream(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!t.requires_grad(ids[i])) continue;
      Matrix& gi = t.grad(ids[i]);
      gi += g.middleRows(offsets[i], gi.rows());
    }
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw BoundsError("slice_rows outside " + shape_of(a));
  }
  const int ia = a.id();
  return a.tape().push(a.value().middleRows(start, count), {ia},
                       [ia, start, count](Tape& t, int self) {
                         t.grad(ia).middleRows(start, count) += t.upstream(self);
                       });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw BoundsError("slice_cols outside " + shape_of(a));
  }
  const int ia = a.id();
  return a.tape().push(a.value().middleCols(start, count), {ia},
                       [ia, start, count](Tape& t, int self) {
                         t.grad(ia).middleCols(start, count) += t.upstream(self);
                       });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) {
    throw ShapeError("reshape " + shape_of(a) + " to " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  const int ia = a.id();
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    Matrix& gi = t.grad(ia);
    const Matrix& g = t.upstream(self);
    Eigen::Map<Matrix>(gi.data(), g.rows(), g.cols()) += g;
  });
}

Var gather_cols(const Var& a, std::span<const int> index) {
  const Matrix& src = a.value();
  Matrix out(src.rows(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] < 0 || index[j] >= src.cols()) throw BoundsError("gather_cols index out of range");
    out.col(static_cast<Eigen::Index>(j)) = src.col(index[j]);
  }
  const int ia = a.id();
  return a.tape().push(std::move(out), {ia},
                       [ia, idx = std::vector<int>(index.begin(), index.end())](Tape& t, int self) {
                         Matrix& gi = t.grad(ia);
                         const Matrix& g = t.upstream(self);
                         for (std::size_t j = 0; j < idx.size(); ++j) {
                           gi.col(idx[j]) += g.col(static_cast<Eigen::Index>(j));
                         }
                       });
}

Var dense(const Var& x, const Var& weight, const Var& bias) {
  if (weight.rows() != x.rows() || bias.rows() != weight.cols() || bias.cols() != 1) {
    throw ShapeError("dense: x " + shape_of(x) + ", W " + shape_of(weight) + ", b " +
                     shape_of(bias));
  }
  return add_col(matmul_tn(weight, x), bias);
}

Var embedding_lookup(const Var& table, std::span<const int> index) {
  const Matrix& src = table.value();
  Matrix out(src.cols(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] < 0 || index[j] >= src.rows()) {
      throw BoundsError("embedding index " + std::to_string(index[j]) + " outside [0, " +
                        std::to_string(src.rows()) + ")");
    }
    out.col(static_cast<Eigen::Index>(j)) = src.row(index[j]).transpose();
  }
  const int it = table.id();
  return table.tape().push(
      std::move(out), {it},
      [it, idx = std::vector<int>(index.begin(), index.end())](Tape& t, int self) {
        Matrix& gt = t.grad(it);
        const Matrix& g = t.upstream(self);
        for (std::size_t j = 0; j < idx.size(); ++j) {
          gt.row(idx[j]) += g.col(static_cast<Eigen::Index>(j)).transpose();
        }
      });
}

Var softmax_cols(const Var& a) {
  const Matrix& z = a.value();
  if (!z.allFinite()) throw NumericError("softmax input is not finite");
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    out.col(j) = softmax(z.col(j));
  }
  const int ia = a.id();
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    const Matrix& y = t.value(self);
    const Matrix& g = t.upstream(self);
    // dz = y * (g - <g, y>) per column
    const Eigen::RowVectorXd inner = (g.cwiseProduct(y)).colwise().sum();
    t.grad(ia).array() += y.array() * (g.rowwise() - inner).array();
  });
}

Var sum(const Var& a) {
  const int ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().push(std::move(out), {ia}, [ia](Tape& t, int self) {
    t.grad(ia).array() += t.upstream(self)(0, 0);
  });
}

Var mse(const Var& pred, const Var& target) {
  same_shape(pred, target, "mse");
  const int ip = pred.id(), it = target.id();
  const double n = static_cast<double>(pred.value().size());
  Matrix out(1, 1);
  out(0, 0) = (pred.value() - target.value()).squaredNorm() / n;
  return pred.tape().push(std::move(out), {ip, it}, [ip, it, n](Tape& t, int self) {
    const double g = t.upstream(self)(0, 0);
    const Matrix diff = t.value(ip) - t.value(it);
    if (t.requires_grad(ip)) t.grad(ip) += (2.0 * g / n) * diff;
    if (t.requires_grad(it)) t.grad(it) -= (2.0 * g / n) * diff;
  });
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  if (z.hasNaN()) throw NumericError("softmax input contains NaN");
  const double m = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace acmv::nn
