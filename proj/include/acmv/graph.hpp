// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "acmv/grid.hpp"

namespace acmv {

enum class ViewKind : int { dist = 0, poi = 1, transport = 2 };

inline constexpr std::array<ViewKind, 3> kAllViews{ViewKind::dist, ViewKind::poi,
                                                   ViewKind::transport};

std::string_view to_string(ViewKind kind);
ViewKind parse_view(std::string_view text);

struct PoiProfile {
  Eigen::VectorXd tfidf;
  std::vector<int> raw_counts;
};

struct TransportProfile {
  std::vector<int> lines;  // 0/1 per line
};

struct ViewGraph {
  ViewKind kind = ViewKind::dist;
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd scaled_laplacian;
  double lambda_max = 2.0;
  bool lambda_converged = true;

  int node_count() const noexcept { return static_cast<int>(adjacency.rows()); }
};

struct GraphParams {
  double theta = 1000.0;  // Gaussian kernel bandwidth, meters
  double kappa = 2000.0;  // distance cutoff, meters
  double gamma = 0.5;     // POI cosine threshold
};

/// Thresholded Gaussian kernel on centroid distance. Zero diagonal.
Eigen::MatrixXd distance_adjacency(const GridSpec& grid, double theta, double kappa);
ViewGraph build_distance_graph(const GridSpec& grid, double theta, double kappa);

/// Term frequency times log(|V| / document frequency), natural log. Regions
/// without any POI get the zero vector.
std::vector<PoiProfile> compute_tfidf(const std::vector<std::vector<int>>& counts);

/// N x |C| matrix of the tfidf vectors, one row per region.
Eigen::MatrixXd tfidf_matrix(std::span<const PoiProfile> profiles);

/// Cosine similarity, defined as 0 when either vector is zero.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

Eigen::MatrixXd poi_adjacency(std::span<const PoiProfile> profiles, double gamma);
ViewGraph build_poi_graph(std::span<const PoiProfile> profiles, double gamma);

Eigen::MatrixXd transport_adjacency(std::span<const TransportProfile> profiles);
ViewGraph build_transport_graph(std::span<const TransportProfile> profiles);

/// L = I - D^-1/2 A D^-1/2. Zero-degree nodes keep an identity row.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency);

struct LambdaEstimate {
  double value = 2.0;
  bool converged = false;
  int iterations = 0;
};

/// Largest eigenvalue of a symmetric L by power iteration on L + I. Falls
/// back to 2 (the normalized-Laplacian bound) when it does not converge.
LambdaEstimate estimate_lambda_max(const Eigen::MatrixXd& laplacian,
                                   double rel_tol = 1e-8, int max_iterations = 10000);

/// 2 L / lambda_max - I.
Eigen::MatrixXd scaled_laplacian(const Eigen::MatrixXd& laplacian, double lambda_max);

/// Wraps an adjacency with its Laplacian, lambda_max and scaled Laplacian.
ViewGraph make_view_graph(ViewKind kind, Eigen::MatrixXd adjacency);

/// `kind,n,m,weight` rows for every nonzero entry (upper and lower).
void write_graph_csv(std::ostream& out, std::span<const ViewGraph> graphs,
                     bool header = true);

}  // namespace acmv
