// SPDX-License-Identifier: Apache-2.0
#include "acmv/model.hpp"

#include <algorithm>
#include <string>

#include "acmv/errors.hpp"

namespace acmv {
namespace {

constexpr std::uint64_t kEmbeddingStream = 100;
constexpr std::uint64_t kAttentionStream = 101;
constexpr std::uint64_t kTemporalStream = 102;

std::string block_prefix(const std::optional<ViewKind>& kind) {
  return kind ? std::string(to_string(*kind)) : std::string("temporal");
}

ContextEmbedding make_embedding(const EmbeddingDims& dims, std::uint64_t seed) {
  nn::Rng rng(nn::mix_seed(seed, kEmbeddingStream));
  return ContextEmbedding(dims, rng);
}

template <typename Block, typename Out>
void append_params(Block& block, Out& out) {
  for (auto& layer : block.layers) {
    for (auto* p : layer.parameters()) out.push_back(p);
  }
  for (auto* p : block.gru.parameters()) out.push_back(p);
  out.push_back(&block.readout_weight);
  out.push_back(&block.readout_bias);
}

}  // namespace

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::attention:
      return "attention";
    case FusionMode::average:
      return "average";
  }
  throw BoundsError("invalid fusion mode");
}

FusionMode parse_fusion(std::string_view text) {
  if (text == "attention") return FusionMode::attention;
  if (text == "average") return FusionMode::average;
  throw ParseError("unknown fusion '" + std::string(text) + "' (expected attention or average)");
}

std::string_view to_string(Activation f) {
  switch (f) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  throw BoundsError("invalid activation");
}

Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "identity") return Activation::identity;
  throw ParseError("unknown activation '" + std::string(text) +
                   "' (expected relu, tanh or identity)");
}

void ModelConfig::validate() const {
  if (cheb_order < 1) throw ConfigError("model.cheb_order must be at least 1");
  if (gcn_features.empty()) throw ConfigError("model.gcn_features needs at least one layer");
  for (int f : gcn_features) {
    if (f < 1) throw ConfigError("model.gcn_features entries must be positive");
  }
  if (gru_hidden < 1) throw ConfigError("model.gru_hidden must be positive");
  if (window < 1) throw ConfigError("model.window must be at least 1");
  if (embedding.hour < 1 || embedding.weather < 1 || embedding.holiday < 1) {
    throw ConfigError("model.embedding dimensions must be positive");
  }
}

GraphSet build_graph_set(const CityScenario& scenario, const GraphParams& params) {
  const int n = scenario.grid.node_count();
  if (static_cast<int>(scenario.poi_counts.size()) != n ||
      static_cast<int>(scenario.transport.size()) != n) {
    throw ShapeError("scenario facilities do not cover every region");
  }
  const auto profiles = compute_tfidf(scenario.poi_counts);
  GraphSet set;
  set.graphs[0] = build_distance_graph(scenario.grid, params.theta, params.kappa);
  set.graphs[1] = build_poi_graph(profiles, params.gamma);
  set.graphs[2] = build_transport_graph(scenario.transport);
  set.poi_profiles = tfidf_matrix(profiles);
  return set;
}

std::vector<nn::Param*> ViewBlock::parameters() {
  std::vector<nn::Param*> out;
  append_params(*this, out);
  return out;
}

std::vector<const nn::Param*> ViewBlock::parameters() const {
  std::vector<const nn::Param*> out;
  append_params(*this, out);
  return out;
}

AcmvModel::AcmvModel(ModelConfig config, int regions, FusionMode fusion, std::uint64_t seed)
    : config_(std::move(config)),
      regions_(regions),
      fusion_(fusion),
      seed_(seed),
      embedding_(make_embedding(config_.embedding, seed)) {
  config_.validate();
  if (regions_ < 1) throw ConfigError("the model needs at least one region");
}

AcmvModel::AcmvModel(ModelConfig config, std::vector<ViewGraph> graphs,
                     Eigen::MatrixXd poi_profiles, FusionMode fusion, std::uint64_t seed)
    : AcmvModel(std::move(config), graphs.empty() ? 1 : graphs.front().node_count(), fusion,
                seed) {
  if (graphs.empty()) throw ConfigError("select at least one view");
  std::sort(graphs.begin(), graphs.end(),
            [](const ViewGraph& a, const ViewGraph& b) { return a.kind < b.kind; });
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (i > 0 && graphs[i].kind == graphs[i - 1].kind) {
      throw ConfigError("view '" + std::string(to_string(graphs[i].kind)) +
                        "' selected twice");
    }
    if (graphs[i].node_count() != regions_) {
      throw ShapeError("view graphs disagree on the region count");
    }
  }
  for (const auto& g : graphs) {
    nn::Rng rng(nn::mix_seed(seed_, 1 + static_cast<std::uint64_t>(g.kind)));
    blocks_.push_back(make_block(g.kind, g.scaled_laplacian, rng));
  }
  if (blocks_.size() > 1 && fusion_ == FusionMode::attention) {
    if (poi_profiles.rows() != regions_) {
      throw ShapeError("POI profiles have " + std::to_string(poi_profiles.rows()) +
                       " rows for " + std::to_string(regions_) + " regions");
    }
    nn::Rng rng(nn::mix_seed(seed_, kAttentionStream));
    attention_.emplace(static_cast<int>(blocks_.size()), embedding_.output_dim(),
                       std::move(poi_profiles), rng);
  }
}

AcmvModel AcmvModel::temporal_only(ModelConfig config, int regions, std::uint64_t seed) {
  AcmvModel model(std::move(config), regions, FusionMode::average, seed);
  model.temporal_only_ = true;
  nn::Rng rng(nn::mix_seed(seed, kTemporalStream));
  model.blocks_.push_back(model.make_block(std::nullopt, Eigen::MatrixXd(), rng));
  return model;
}

ViewBlock AcmvModel::make_block(std::optional<ViewKind> kind, Eigen::MatrixXd ltilde,
                                nn::Rng& rng) const {
  const std::string prefix = block_prefix(kind);
  std::vector<ChebLayer> layers;
  int features = 1;
  if (kind) {
    for (int v = 0; v < config_.gcn_layers(); ++v) {
      const bool last = v + 1 == config_.gcn_layers();
      layers.emplace_back(prefix + ".cheb" + std::to_string(v), config_.cheb_order, features,
                          config_.gcn_features[v],
                          last ? Activation::identity : config_.activation, config_.gcn_bias,
                          rng);
      features = config_.gcn_features[v];
    }
  }
  GruCell gru(prefix + ".gru", regions_ * features + embedding_.output_dim(),
              config_.gru_hidden, rng);
  nn::Param readout_weight(prefix + ".readout.weight",
                           nn::glorot_uniform(config_.gru_hidden, regions_, config_.gru_hidden,
                                              regions_, rng));
  nn::Param readout_bias(prefix + ".readout.bias", nn::Matrix::Zero(regions_, 1));
  return ViewBlock{kind, std::move(ltilde), std::move(layers), std::move(gru),
                   std::move(readout_weight), std::move(readout_bias)};
}

std::vector<ViewKind> AcmvModel::views() const {
  std::vector<ViewKind> out;
  for (const auto& b : blocks_) {
    if (b.kind) out.push_back(*b.kind);
  }
  return out;
}

std::vector<nn::Param*> AcmvModel::parameters() {
  std::vector<nn::Param*> out;
  for (auto& b : blocks_) append_params(b, out);
  for (auto* p : embedding_.parameters()) out.push_back(p);
  if (attention_) {
    for (auto* p : attention_->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const nn::Param*> AcmvModel::parameters() const {
  std::vector<const nn::Param*> out;
  for (const auto& b : blocks_) append_params(b, out);
  for (const auto* p : embedding_.parameters()) out.push_back(p);
  if (attention_) {
    for (const auto* p : attention_->parameters()) out.push_back(p);
  }
  return out;
}

AcmvModel::BatchOutput AcmvModel::forward(nn::Tape& tape,
                                          std::span<const SeriesWindow* const> batch) const {
  if (batch.empty()) throw EmptyDatasetError("forward over an empty batch");
  const int b_count = static_cast<int>(batch.size());
  const int steps = config_.window;
  const int n = regions_;
  const int samples = steps * b_count;

  nn::Matrix x(n, samples);
  for (int b = 0; b < b_count; ++b) {
    const SeriesWindow& w = *batch[b];
    if (w.length() != steps || static_cast<int>(w.contexts.size()) != steps + 1) {
      throw ShapeError("window has " + std::to_string(w.length()) + " frames and " +
                       std::to_string(w.contexts.size()) + " contexts, model expects " +
                       std::to_string(steps) + " and " + std::to_string(steps + 1));
    }
    for (int t = 0; t < steps; ++t) {
      if (w.inputs[t].values.size() != n) {
        throw ShapeError("frame has " + std::to_string(w.inputs[t].values.size()) +
                         " regions, model expects " + std::to_string(n));
      }
      x.col(t * b_count + b) = w.inputs[t].values;
    }
  }
  const nn::Var signal = tape.constant(std::move(x));

  std::vector<nn::Var> context(static_cast<std::size_t>(steps) + 1);
  std::vector<ContextRecord> records(static_cast<std::size_t>(b_count));
  for (int t = 0; t <= steps; ++t) {
    for (int b = 0; b < b_count; ++b) records[b] = batch[b]->contexts[t];
    context[t] = embedding_.embed(tape, records);
  }

  BatchOutput out;
  for (const ViewBlock& block : blocks_) {
    nn::Var h = signal;
    int features = 1;
    if (!block.layers.empty()) {
      const nn::Var ltilde = tape.constant(block.scaled_laplacian);
      for (const auto& layer : block.layers) h = layer.forward(ltilde, h, samples);
      features = block.layers.back().out_features();
    }
    nn::Var panel = h;
    if (features > 1) {
      // column f * S + s -> column f + F * s, so each sample's N * F block is contiguous
      std::vector<int> order(static_cast<std::size_t>(features) * samples);
      for (int s = 0; s < samples; ++s) {
        for (int f = 0; f < features; ++f) order[f + features * s] = f * samples + s;
      }
      panel = nn::reshape(nn::gather_cols(h, order), static_cast<Eigen::Index>(n) * features,
                          samples);
    }
    std::vector<nn::Var> inputs;
    inputs.reserve(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
      const nn::Var parts[] = {nn::slice_cols(panel, static_cast<Eigen::Index>(t) * b_count,
                                              b_count),
                               context[t]};
      inputs.push_back(nn::concat_rows(parts));
    }
    const nn::Var hidden = block.gru.unroll(inputs);
    out.view_q.push_back(nn::dense(hidden,
                                   tape.param(const_cast<nn::Param&>(block.readout_weight)),
                                   tape.param(const_cast<nn::Param&>(block.readout_bias))));
  }

  if (out.view_q.size() == 1) {
    out.fused = out.view_q.front();
  } else if (attention_) {
    out.weights = attention_->weights(out.view_q, context[steps]);
    for (std::size_t a = 0; a < out.view_q.size(); ++a) {
      const nn::Var w = nn::reshape(
          nn::slice_rows(out.weights, static_cast<Eigen::Index>(a), 1), n, b_count);
      const nn::Var term = nn::hadamard(w, out.view_q[a]);
      out.fused = a == 0 ? term : nn::add(out.fused, term);
    }
  } else {
    nn::Var total = out.view_q.front();
    for (std::size_t a = 1; a < out.view_q.size(); ++a) total = nn::add(total, out.view_q[a]);
    out.fused = nn::scale(total, 1.0 / static_cast<double>(out.view_q.size()));
  }
  return out;
}

ForwardResult AcmvModel::unpack(const BatchOutput& out, int b, int batch) const {
  ForwardResult r;
  r.prediction = out.fused.value().col(b);
  r.view_predictions = Eigen::MatrixXd::Zero(regions_, 3);
  r.weights.w = Eigen::MatrixXd::Zero(regions_, 3);
  const double share = 1.0 / static_cast<double>(blocks_.size());
  for (std::size_t a = 0; a < blocks_.size(); ++a) {
    // the temporal-only block reports in the first column
    const int col = blocks_[a].kind ? static_cast<int>(*blocks_[a].kind) : 0;
    r.view_predictions.col(col) = out.view_q[a].value().col(b);
    if (out.weights.valid()) {
      const auto& w = out.weights.value();
      for (int n = 0; n < regions_; ++n) {
        r.weights.w(n, col) = w(static_cast<Eigen::Index>(a),
                                n + static_cast<Eigen::Index>(regions_) * b);
      }
    } else {
      r.weights.w.col(col).setConstant(share);
    }
  }
  (void)batch;
  return r;
}

ForwardResult AcmvModel::forward(const SeriesWindow& scaled_window) const {
  nn::Tape tape(false);
  const SeriesWindow* ptr = &scaled_window;
  const BatchOutput out = forward(tape, std::span<const SeriesWindow* const>(&ptr, 1));
  return unpack(out, 0, 1);
}

std::vector<ForwardResult> AcmvModel::forward_all(std::span<const SeriesWindow> scaled_windows,
                                                  int batch_size) const {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  std::vector<ForwardResult> results;
  results.reserve(scaled_windows.size());
  std::vector<const SeriesWindow*> ptrs;
  for (std::size_t start = 0; start < scaled_windows.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(scaled_windows.size(), start + static_cast<std::size_t>(batch_size));
    ptrs.clear();
    for (std::size_t i = start; i < end; ++i) ptrs.push_back(&scaled_windows[i]);
    nn::Tape tape(false);
    const BatchOutput out = forward(tape, ptrs);
    for (int b = 0; b < static_cast<int>(ptrs.size()); ++b) {
      results.push_back(unpack(out, b, static_cast<int>(ptrs.size())));
    }
  }
  return results;
}

AcmvModel build_variant(const ModelConfig& config, const GraphSet& graphs,
                        std::span<const ViewKind> views, FusionMode fusion,
                        std::uint64_t seed) {
  if (views.empty()) throw ConfigError("select at least one view");
  std::vector<ViewGraph> selected;
  for (ViewKind v : views) selected.push_back(graphs[v]);
  return AcmvModel(config, std::move(selected), graphs.poi_profiles, fusion, seed);
}

double loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw ShapeError("loss: prediction and target differ in length");
  }
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Prediction predict(const AcmvModel& model, const SeriesWindow& raw_window,
                   const Scaler& scaler) {
  if (!scaler.fitted()) throw StateError("predict() needs a fitted scaler");
  const ForwardResult r = model.forward(scale_window(raw_window, scaler));
  Prediction p;
  p.frame.values = scaler.unscale(r.prediction);
  p.frame.time_index = raw_window.target.time_index;
  p.weights = r.weights;
  p.view_predictions = Eigen::MatrixXd::Zero(r.view_predictions.rows(), 3);
  for (const auto& block : model.blocks()) {
    const int col = block.kind ? static_cast<int>(*block.kind) : 0;
    p.view_predictions.col(col) = scaler.unscale(Eigen::VectorXd(r.view_predictions.col(col)));
  }
  return p;
}

}  // namespace acmv
