// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "acmv/context.hpp"
#include "acmv/graph.hpp"
#include "acmv/nn/init.hpp"
#include "acmv/nn/ops.hpp"

namespace acmv {

struct EmbeddingDims {
  int hour = 8;
  int weather = 4;
  int holiday = 2;

  int total() const noexcept { return hour + weather + holiday; }
};

/// Learned tables for hour, weather and holiday; a record embeds to the
/// concatenation of its three rows, in that order.
class ContextEmbedding {
 public:
  ContextEmbedding(EmbeddingDims dims, nn::Rng& rng);

  const EmbeddingDims& dims() const noexcept { return dims_; }
  int output_dim() const noexcept { return dims_.total(); }

  nn::Param& hour_table() noexcept { return hour_; }
  nn::Param& weather_table() noexcept { return weather_; }
  nn::Param& holiday_table() noexcept { return holiday_; }

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;

  /// One column per record: m x B.
  nn::Var embed(nn::Tape& tape, std::span<const ContextRecord> records) const;
  Eigen::VectorXd embed(const ContextRecord& record) const;

 private:
  EmbeddingDims dims_;
  nn::Param hour_;
  nn::Param weather_;
  nn::Param holiday_;
};

/// Per-region weights over the active views, one row per region, columns in
/// dist, poi, transport order. Inactive views carry weight 0.
struct AttentionWeights {
  Eigen::MatrixXd w;  // N x 3
};

/// One affine layer over [q_views, e_next, t_n] followed by a softmax over
/// the views, evaluated independently for every region.
class AttentionHead {
 public:
  /// poi_profiles: N x |C| tfidf matrix, held constant.
  AttentionHead(int views, int context_dim, Eigen::MatrixXd poi_profiles, nn::Rng& rng);

  int views() const noexcept { return views_; }
  int input_dim() const noexcept { return views_ + context_dim_ + categories(); }
  int categories() const noexcept { return static_cast<int>(poi_.cols()); }
  int regions() const noexcept { return static_cast<int>(poi_.rows()); }
  const Eigen::MatrixXd& poi_profiles() const noexcept { return poi_; }

  nn::Param& weight() noexcept { return weight_; }  // input_dim x views
  nn::Param& bias() noexcept { return bias_; }      // views x 1

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;

  /// q: one N x B matrix per view; e_next: m x B. Returns views x (N * B);
  /// column n + N * b is the weight vector of region n in sample b.
  nn::Var weights(std::span<const nn::Var> q, const nn::Var& e_next) const;

  /// Single-sample form: q is N x views, e_next has length m.
  Eigen::MatrixXd weights(const Eigen::MatrixXd& q, const Eigen::VectorXd& e_next) const;

 private:
  int views_;
  int context_dim_;
  Eigen::MatrixXd poi_;
  nn::Param weight_;
  nn::Param bias_;
};

/// x_n = sum_a q_{n,a} w_{n,a}. Rows of w must lie on the simplex within
/// 1e-6, otherwise InvariantError.
Eigen::VectorXd fuse(const Eigen::MatrixXd& q, const Eigen::MatrixXd& w);

/// Uniform weights 1/3 (or 1/views).
Eigen::VectorXd average_fuse(const Eigen::MatrixXd& q);

/// `t,n,w_dist,w_poi,w_transport` rows.
void write_attention_csv(std::ostream& out, std::span<const int> times,
                         std::span<const AttentionWeights> weights, bool header = true);

/// FeatureCollection with one square cell per (interval, region), in planar
/// meters, carrying t, n, w_dist, w_poi, w_transport properties.
void write_attention_geojson(std::ostream& out, const GridSpec& grid,
                             std::span<const int> times,
                             std::span<const AttentionWeights> weights);

}  // namespace acmv
