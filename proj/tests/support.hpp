// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and reference implementations for the test suites.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "acmv/data.hpp"
#include "acmv/graph.hpp"

namespace acmv::testing {

inline Eigen::MatrixXd random_adjacency(int n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < density) a(i, j) = a(j, i) = 0.1 + u(rng);
    }
  }
  return a;
}

inline Eigen::MatrixXd path_adjacency(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
  return a;
}

/// I - D^-1/2 A D^-1/2 written out entry by entry.
inline Eigen::MatrixXd laplacian_oracle(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double di = a.row(i).sum();
      const double dj = a.row(j).sum();
      if (di > 0.0 && dj > 0.0) l(i, j) -= a(i, j) / std::sqrt(di * dj);
    }
  }
  return l;
}

/// Dense spectral filter U diag(T_k(lambda~)) U^T x with T_k via the cosine
/// form (valid because the scaled spectrum lies in [-1, 1]).
inline Eigen::MatrixXd spectral_chebyshev(const Eigen::MatrixXd& laplacian, double lambda_max,
                                          int k, const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
  Eigen::VectorXd g(laplacian.rows());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double s = std::clamp(2.0 * eig.eigenvalues()[i] / lambda_max - 1.0, -1.0, 1.0);
    g[i] = std::cos(k * std::acos(s));
  }
  return eig.eigenvectors() * g.asDiagonal() * eig.eigenvectors().transpose() * x;
}

/// Small scenario that trains in well under a second per epoch.
inline GeneratorConfig tiny_generator() {
  GeneratorConfig g;
  g.rows = 3;
  g.cols = 4;
  g.poi_categories = 4;
  g.transport_lines = 2;
  g.days = 6;
  g.hubs = 2;
  return g;
}

}  // namespace acmv::testing
