// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "acmv/chebconv.hpp"
#include "acmv/errors.hpp"
#include "acmv/graph.hpp"
#include "acmv/nn/init.hpp"
#include "support.hpp"

using namespace acmv;
using nn::Matrix;

namespace {

struct Fixture {
  Matrix laplacian;
  double lambda;
  Matrix scaled;
};

Fixture random_graph(int n, nn::Rng& rng) {
  Fixture f;
  f.laplacian = normalized_laplacian(testing::random_adjacency(n, 0.3, rng));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(f.laplacian);
  f.lambda = eig.eigenvalues().maxCoeff();
  f.scaled = scaled_laplacian(f.laplacian, f.lambda);
  return f;
}

}  // namespace

TEST_CASE("recursive basis agrees with the spectral filter") {
  nn::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + trial;
    const Fixture g = random_graph(n, rng);
    const Matrix x = nn::uniform(n, 3, -1, 1, rng);
    nn::Tape tape(false);
    const auto basis = cheb_basis(tape.constant(g.scaled), tape.constant(x), 6);
    REQUIRE(basis.size() == 6);
    for (int k = 0; k < 6; ++k) {
      const Matrix oracle = testing::spectral_chebyshev(g.laplacian, g.lambda, k, x);
      CHECK((basis[k].value() - oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("filters of order K reach exactly K-1 hops") {
  const int n = 9;
  const Matrix lap = normalized_laplacian(testing::path_adjacency(n));
  const Matrix scaled = scaled_laplacian(lap, 2.0);
  nn::Rng rng(3);
  for (int order = 1; order <= 4; ++order) {
    ChebLayer layer("c", order, 1, 1, Activation::identity, false, rng);
    layer.weights().value().setOnes();
    Matrix x = Matrix::Zero(n, 1);
    x(0, 0) = 1.0;
    nn::Tape tape(false);
    const Matrix y = layer.forward(tape.constant(scaled), tape.constant(x), 1).value();
    for (int v = 0; v < n; ++v) {
      INFO("order " << order << " node " << v);
      if (v >= order) CHECK(y(v, 0) == 0.0);
    }
    CHECK(y(order - 1, 0) != 0.0);
  }
}

TEST_CASE("order one is a per-node linear map") {
  nn::Rng rng(4);
  const Fixture g = random_graph(7, rng);
  ChebLayer layer("c", 1, 3, 2, Activation::identity, false, rng);
  const Matrix x = nn::uniform(7, 3, -1, 1, rng);
  nn::Tape tape(false);
  const Matrix y = layer.forward(tape.constant(g.scaled), tape.constant(x), 1).value();
  CHECK(y.isApprox(x * layer.theta(0)));
}

TEST_CASE("layer output equals the explicit sum of filtered panels") {
  nn::Rng rng(5);
  const Fixture g = random_graph(8, rng);
  for (auto act : {Activation::identity, Activation::relu, Activation::tanh}) {
    ChebLayer layer("c", 3, 2, 4, act, true, rng);
    layer.parameters()[1]->value() = nn::uniform(1, 4, -0.5, 0.5, rng);
    const Matrix x = nn::uniform(8, 2, -1, 1, rng);
    Matrix pre = Matrix::Zero(8, 4);
    for (int k = 0; k < 3; ++k) {
      pre += testing::spectral_chebyshev(g.laplacian, g.lambda, k, x) * layer.theta(k);
    }
    pre.rowwise() += layer.parameters()[1]->value().row(0);
    Matrix expected = pre;
    if (act == Activation::relu) expected = pre.cwiseMax(0.0);
    if (act == Activation::tanh) expected = pre.array().tanh().matrix();
    nn::Tape tape(false);
    const Matrix y = layer.forward(tape.constant(g.scaled), tape.constant(x), 1).value();
    CHECK((y - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("batched forward matches per-sample forward") {
  nn::Rng rng(6);
  const Fixture g = random_graph(6, rng);
  const int f_in = 3, f_out = 2, samples = 4;
  ChebLayer layer("c", 3, f_in, f_out, Activation::relu, true, rng);
  std::vector<Matrix> xs;
  Matrix packed(6, f_in * samples);
  for (int s = 0; s < samples; ++s) {
    xs.push_back(nn::uniform(6, f_in, -1, 1, rng));
    for (int f = 0; f < f_in; ++f) packed.col(f * samples + s) = xs.back().col(f);
  }
  nn::Tape tape(false);
  const nn::Var lap = tape.constant(g.scaled);
  const Matrix batched = layer.forward(lap, tape.constant(packed), samples).value();
  REQUIRE(batched.cols() == f_out * samples);
  for (int s = 0; s < samples; ++s) {
    const Matrix single = layer.forward(lap, tape.constant(xs[s]), 1).value();
    for (int f = 0; f < f_out; ++f) {
      CHECK((batched.col(f * samples + s) - single.col(f)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("construction and shape errors") {
  nn::Rng rng(7);
  CHECK_THROWS_AS(ChebLayer("c", 0, 1, 1, Activation::relu, false, rng), ConfigError);
  CHECK_THROWS_AS(ChebLayer("c", 2, 0, 1, Activation::relu, false, rng), ConfigError);
  ChebLayer layer("c", 2, 2, 3, Activation::relu, true, rng);
  CHECK(layer.weights().value().rows() == 4);
  CHECK(layer.weights().value().cols() == 3);
  CHECK(layer.parameters().size() == 2);
  CHECK_THROWS_AS(layer.theta(2), BoundsError);
  nn::Tape tape(false);
  const nn::Var lap = tape.constant(Matrix::Identity(4, 4));
  CHECK_THROWS_AS(layer.forward(lap, tape.constant(Matrix::Zero(4, 3)), 1), ShapeError);
  CHECK_THROWS_AS(layer.forward(tape.constant(Matrix::Identity(5, 5)),
                                tape.constant(Matrix::Zero(4, 2)), 1),
                  ShapeError);
  CHECK_THROWS_AS(cheb_basis(lap, tape.constant(Matrix::Zero(4, 1)), 0), ConfigError);
}
