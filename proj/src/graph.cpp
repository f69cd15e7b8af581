// SPDX-License-Identifier: Apache-2.0
#include "acmv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>

#include "acmv/errors.hpp"

namespace acmv {

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::dist:
      return "dist";
    case ViewKind::poi:
      return "poi";
    case ViewKind::transport:
      return "transport";
  }
  throw BoundsError("invalid view kind");
}

ViewKind parse_view(std::string_view text) {
  if (text == "dist" || text == "distance") return ViewKind::dist;
  if (text == "poi") return ViewKind::poi;
  if (text == "transport" || text == "transportation") return ViewKind::transport;
  throw ParseError("unknown view '" + std::string(text) +
                   "' (expected dist, poi or transport)");
}

Eigen::MatrixXd distance_adjacency(const GridSpec& grid, double theta, double kappa) {
  if (!(theta > 0.0) || !(kappa > 0.0)) {
    throw ConfigError("distance kernel needs theta > 0 and kappa > 0");
  }
  const int n = grid.node_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    const Point pu = region_centroid(RegionId{u}, grid);
    for (int v = u + 1; v < n; ++v) {
      const Point pv = region_centroid(RegionId{v}, grid);
      const double d = std::hypot(pu.x - pv.x, pu.y - pv.y);
      if (d <= kappa) {
        const double w = std::exp(-(d * d) / (2.0 * theta * theta));
        a(u, v) = w;
        a(v, u) = w;
      }
    }
  }
  return a;
}

ViewGraph build_distance_graph(const GridSpec& grid, double theta, double kappa) {
  return make_view_graph(ViewKind::dist, distance_adjacency(grid, theta, kappa));
}

std::vector<PoiProfile> compute_tfidf(const std::vector<std::vector<int>>& counts) {
  const auto regions = counts.size();
  if (regions == 0) return {};
  const auto categories = counts.front().size();
  std::vector<int> document_freq(categories, 0);
  for (const auto& row : counts) {
    if (row.size() != categories) {
      throw ShapeError("POI count rows disagree on the category count");
    }
    for (std::size_t c = 0; c < categories; ++c) {
      if (row[c] < 0) throw ConfigError("POI counts must be nonnegative");
      if (row[c] != 0) ++document_freq[c];
    }
  }

  std::vector<PoiProfile> profiles(regions);
  for (std::size_t n = 0; n < regions; ++n) {
    auto& p = profiles[n];
    p.raw_counts = counts[n];
    p.tfidf = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(categories));
    long total = 0;
    for (int c : counts[n]) total += c;
    if (total == 0) continue;
    for (std::size_t c = 0; c < categories; ++c) {
      if (counts[n][c] == 0) continue;
      const double tf = static_cast<double>(counts[n][c]) / static_cast<double>(total);
      const double idf =
          std::log(static_cast<double>(regions) / static_cast<double>(document_freq[c]));
      p.tfidf[static_cast<Eigen::Index>(c)] = tf * idf;
    }
  }
  return profiles;
}

Eigen::MatrixXd tfidf_matrix(std::span<const PoiProfile> profiles) {
  if (profiles.empty()) return {};
  const auto cats = profiles.front().tfidf.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(profiles.size()), cats);
  for (std::size_t n = 0; n < profiles.size(); ++n) {
    if (profiles[n].tfidf.size() != cats) throw ShapeError("POI profiles disagree in length");
    m.row(static_cast<Eigen::Index>(n)) = profiles[n].tfidf.transpose();
  }
  return m;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ShapeError("cosine similarity of unequal lengths");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Eigen::MatrixXd poi_adjacency(std::span<const PoiProfile> profiles, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("POI similarity threshold gamma must lie in [0, 1]");
  }
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double c = cosine_similarity(profiles[u].tfidf, profiles[v].tfidf);
      if (c >= gamma && c != 0.0) {
        a(u, v) = c;
        a(v, u) = c;
      }
    }
  }
  return a;
}

ViewGraph build_poi_graph(std::span<const PoiProfile> profiles, double gamma) {
  return make_view_graph(ViewKind::poi, poi_adjacency(profiles, gamma));
}

Eigen::MatrixXd transport_adjacency(std::span<const TransportProfile> profiles) {
  const auto n = static_cast<Eigen::Index>(profiles.size());
  if (n == 0) return {};
  const auto lines = profiles.front().lines.size();
  for (const auto& p : profiles) {
    if (p.lines.size() != lines) {
      throw ShapeError("transport profiles disagree on the line count");
    }
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      int shared = 0;
      for (std::size_t m = 0; m < lines; ++m) shared += profiles[u].lines[m] * profiles[v].lines[m];
      a(u, v) = shared;
      a(v, u) = shared;
    }
  }
  return a;
}

ViewGraph build_transport_graph(std::span<const TransportProfile> profiles) {
  return make_view_graph(ViewKind::transport, transport_adjacency(profiles));
}

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("adjacency must be square");
  const double scale = std::max(1.0, adjacency.cwiseAbs().maxCoeff());
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigError("adjacency matrix is not symmetric");
  }
  if ((adjacency.array() < 0.0).any()) throw ConfigError("adjacency has negative weights");

  const Eigen::Index n = adjacency.rows();
  Eigen::VectorXd inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = adjacency.row(i).sum();
    inv_sqrt_deg[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Eigen::MatrixXd l = -(inv_sqrt_deg.asDiagonal() * adjacency * inv_sqrt_deg.asDiagonal());
  l.diagonal().array() += 1.0;
  return l;
}

LambdaEstimate estimate_lambda_max(const Eigen::MatrixXd& laplacian, double rel_tol,
                                   int max_iterations) {
  const Eigen::Index n = laplacian.rows();
  if (n == 0 || laplacian.cols() != n) throw ShapeError("Laplacian must be square");
  constexpr double kShift = 1.0;

  // fixed start vector with no special alignment to any eigenvector
  Eigen::VectorXd x(n);
  std::uint64_t s = 0x9E3779B97F4A7C15ULL;
  for (Eigen::Index i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    x[i] = 0.5 + static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  x.normalize();

  LambdaEstimate est;
  double rho_prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd y = laplacian * x + kShift * x;
    const double rho = x.dot(y);
    const double norm = y.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    x = y / norm;
    est.iterations = it;
    if (it > 1 && std::abs(rho - rho_prev) <= rel_tol * std::abs(rho)) {
      est.value = rho - kShift;
      est.converged = true;
      return est;
    }
    rho_prev = rho;
  }
  est.value = 2.0;
  est.converged = false;
  return est;
}

Eigen::MatrixXd scaled_laplacian(const Eigen::MatrixXd& laplacian, double lambda_max) {
  if (!(lambda_max > 0.0)) throw ConfigError("lambda_max must be positive");
  Eigen::MatrixXd out = (2.0 / lambda_max) * laplacian;
  out.diagonal().array() -= 1.0;
  return out;
}

ViewGraph make_view_graph(ViewKind kind, Eigen::MatrixXd adjacency) {
  ViewGraph g;
  g.kind = kind;
  g.laplacian = normalized_laplacian(adjacency);
  g.adjacency = std::move(adjacency);
  const LambdaEstimate est = estimate_lambda_max(g.laplacian);
  g.lambda_max = est.value;
  g.lambda_converged = est.converged;
  g.scaled_laplacian = scaled_laplacian(g.laplacian, g.lambda_max);
  return g;
}

void write_graph_csv(std::ostream& out, std::span<const ViewGraph> graphs, bool header) {
  if (header) out << "kind,n,m,weight\n";
  const auto old_precision = out.precision(17);
  for (const auto& g : graphs) {
    const auto& a = g.adjacency;
    for (Eigen::Index n = 0; n < a.rows(); ++n) {
      for (Eigen::Index m = 0; m < a.cols(); ++m) {
        if (a(n, m) != 0.0) out << to_string(g.kind) << ',' << n << ',' << m << ',' << a(n, m) << '\n';
      }
    }
  }
  out.precision(old_precision);
}

}  // namespace acmv
