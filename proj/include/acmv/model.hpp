// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acmv/attention.hpp"
#include "acmv/chebconv.hpp"
#include "acmv/data.hpp"
#include "acmv/graph.hpp"
#include "acmv/gru.hpp"

namespace acmv {

enum class FusionMode { attention, average };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion(std::string_view text);
std::string_view to_string(Activation f);
Activation parse_activation(std::string_view text);

struct ModelConfig {
  int cheb_order = 3;                 // K
  std::vector<int> gcn_features{8, 2};  // F_1 .. F_V (F_0 = 1)
  int gru_hidden = 64;
  EmbeddingDims embedding{};
  int window = 8;                     // L input frames
  Activation activation = Activation::relu;
  bool gcn_bias = false;

  int gcn_layers() const noexcept { return static_cast<int>(gcn_features.size()); }
  void validate() const;
};

/// The three view graphs plus the per-region POI profiles the attention
/// head reads.
struct GraphSet {
  std::array<ViewGraph, 3> graphs;  // indexed by ViewKind
  Eigen::MatrixXd poi_profiles;     // N x |C|

  const ViewGraph& operator[](ViewKind kind) const {
    return graphs[static_cast<int>(kind)];
  }
  int regions() const noexcept { return graphs[0].node_count(); }
};

GraphSet build_graph_set(const CityScenario& scenario, const GraphParams& params);

struct ForwardResult {
  Eigen::VectorXd prediction;        // N, scaled space
  Eigen::MatrixXd view_predictions;  // N x 3, zero for inactive views
  AttentionWeights weights;          // N x 3
};

/// ChebConv stack -> context concat -> GRU -> readout for one view. A block
/// without a graph feeds the raw frame straight to the GRU (temporal-only).
struct ViewBlock {
  std::optional<ViewKind> kind;
  Eigen::MatrixXd scaled_laplacian;
  std::vector<ChebLayer> layers;
  GruCell gru;
  nn::Param readout_weight;  // hidden x N
  nn::Param readout_bias;    // N x 1

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;
};

class AcmvModel {
 public:
  /// graphs: the active views (any subset, each kind at most once).
  AcmvModel(ModelConfig config, std::vector<ViewGraph> graphs,
            Eigen::MatrixXd poi_profiles, FusionMode fusion, std::uint64_t seed);

  /// GRU on raw frames + context, no graph convolution.
  static AcmvModel temporal_only(ModelConfig config, int regions, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  FusionMode fusion() const noexcept { return fusion_; }
  int regions() const noexcept { return regions_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool is_temporal_only() const noexcept { return temporal_only_; }
  std::vector<ViewKind> views() const;

  std::vector<ViewBlock>& blocks() noexcept { return blocks_; }
  const std::vector<ViewBlock>& blocks() const noexcept { return blocks_; }
  ContextEmbedding& embedding() noexcept { return embedding_; }
  AttentionHead* attention() noexcept { return attention_ ? &*attention_ : nullptr; }
  const AttentionHead* attention() const noexcept {
    return attention_ ? &*attention_ : nullptr;
  }

  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;

  struct BatchOutput {
    nn::Var fused;                // N x B
    std::vector<nn::Var> view_q;  // per block, N x B
    nn::Var weights;              // views x (N * B) when attention is used
  };

  /// Batched forward over scaled windows on the given tape.
  BatchOutput forward(nn::Tape& tape, std::span<const SeriesWindow* const> batch) const;

  ForwardResult forward(const SeriesWindow& scaled_window) const;
  std::vector<ForwardResult> forward_all(std::span<const SeriesWindow> scaled_windows,
                                         int batch_size = 64) const;

 private:
  AcmvModel(ModelConfig config, int regions, FusionMode fusion, std::uint64_t seed);
  ViewBlock make_block(std::optional<ViewKind> kind, Eigen::MatrixXd ltilde,
                       nn::Rng& rng) const;
  ForwardResult unpack(const BatchOutput& out, int b, int batch) const;

  ModelConfig config_;
  int regions_;
  FusionMode fusion_;
  std::uint64_t seed_;
  bool temporal_only_ = false;
  std::vector<ViewBlock> blocks_;
  ContextEmbedding embedding_;
  std::optional<AttentionHead> attention_;
};

/// Table-2 style variant: only the selected views. One view skips fusion,
/// several use attention or the plain average depending on `fusion`.
AcmvModel build_variant(const ModelConfig& config, const GraphSet& graphs,
                        std::span<const ViewKind> views, FusionMode fusion,
                        std::uint64_t seed);

/// Mean squared error.
double loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

struct Prediction {
  PopulationFrame frame;             // persons
  AttentionWeights weights;
  Eigen::MatrixXd view_predictions;  // persons, N x 3
};

/// Scales a raw window, runs forward and maps the result back to persons.
Prediction predict(const AcmvModel& model, const SeriesWindow& raw_window,
                   const Scaler& scaler);

}  // namespace acmv
