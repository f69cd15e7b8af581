// SPDX-License-Identifier: Apache-2.0
#include "acmv/attention.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "acmv/errors.hpp"

namespace acmv {
namespace {

constexpr double kEmbeddingInit = 0.05;

nn::Var param(nn::Tape& tape, const nn::Param& p) {
  return tape.param(const_cast<nn::Param&>(p));
}

}  // namespace

ContextEmbedding::ContextEmbedding(EmbeddingDims dims, nn::Rng& rng) : dims_(dims) {
  if (dims.hour < 1 || dims.weather < 1 || dims.holiday < 1) {
    throw ConfigError("embedding dimensions must be positive");
  }
  hour_ = nn::Param("embedding.hour",
                    nn::uniform(kHoursPerDay, dims.hour, -kEmbeddingInit, kEmbeddingInit, rng));
  weather_ = nn::Param("embedding.weather", nn::uniform(kWeatherCategories, dims.weather,
                                                        -kEmbeddingInit, kEmbeddingInit, rng));
  holiday_ = nn::Param("embedding.holiday", nn::uniform(kHolidayCategories, dims.holiday,
                                                        -kEmbeddingInit, kEmbeddingInit, rng));
}

std::vector<nn::Param*> ContextEmbedding::parameters() { return {&hour_, &weather_, &holiday_}; }

std::vector<const nn::Param*> ContextEmbedding::parameters() const {
  return {&hour_, &weather_, &holiday_};
}

nn::Var ContextEmbedding::embed(nn::Tape& tape, std::span<const ContextRecord> records) const {
  if (records.empty()) throw EmptyDatasetError("no context records to embed");
  std::vector<int> hours, weathers, holidays;
  hours.reserve(records.size());
  weathers.reserve(records.size());
  holidays.reserve(records.size());
  for (const auto& r : records) {
    validate(r);
    hours.push_back(r.hour);
    weathers.push_back(static_cast<int>(r.weather));
    holidays.push_back(r.holiday ? 1 : 0);
  }
  const nn::Var parts[] = {nn::embedding_lookup(param(tape, hour_), hours),
                           nn::embedding_lookup(param(tape, weather_), weathers),
                           nn::embedding_lookup(param(tape, holiday_), holidays)};
  return nn::concat_rows(parts);
}

Eigen::VectorXd ContextEmbedding::embed(const ContextRecord& record) const {
  validate(record);
  Eigen::VectorXd e(dims_.total());
  e << hour_.value().row(record.hour).transpose(),
      weather_.value().row(static_cast<int>(record.weather)).transpose(),
      holiday_.value().row(record.holiday ? 1 : 0).transpose();
  return e;
}

AttentionHead::AttentionHead(int views, int context_dim, Eigen::MatrixXd poi_profiles,
                             nn::Rng& rng)
    : views_(views), context_dim_(context_dim), poi_(std::move(poi_profiles)) {
  if (views < 2) throw ConfigError("attention needs at least two views");
  if (context_dim < 0) throw ConfigError("context dimension must be nonnegative");
  if (poi_.rows() == 0) throw ConfigError("attention needs POI profiles for every region");
  weight_ = nn::Param("attention.weight",
                      nn::glorot_uniform(input_dim(), views, input_dim(), views, rng));
  bias_ = nn::Param("attention.bias", nn::Matrix::Zero(views, 1));
}

std::vector<nn::Param*> AttentionHead::parameters() { return {&weight_, &bias_}; }

std::vector<const nn::Param*> AttentionHead::parameters() const { return {&weight_, &bias_}; }

nn::Var AttentionHead::weights(std::span<const nn::Var> q, const nn::Var& e_next) const {
  if (static_cast<int>(q.size()) != views_) {
    throw ShapeError("attention expects " + std::to_string(views_) + " view predictions, got " +
                     std::to_string(q.size()));
  }
  const Eigen::Index n = regions();
  const Eigen::Index b = q.front().cols();
  for (const auto& v : q) {
    if (v.rows() != n || v.cols() != b) throw ShapeError("view predictions disagree in shape");
  }
  if (e_next.rows() != context_dim_ || e_next.cols() != b) {
    throw ShapeError("context embedding has the wrong shape for attention");
  }
  nn::Tape& tape = e_next.tape();
  const Eigen::Index cols = n * b;

  std::vector<nn::Var> rows;
  rows.reserve(q.size() + 2);
  for (const auto& v : q) rows.push_back(nn::reshape(v, 1, cols));

  std::vector<int> sample_of(static_cast<std::size_t>(cols));
  for (Eigen::Index s = 0; s < b; ++s) {
    for (Eigen::Index r = 0; r < n; ++r) sample_of[r + n * s] = static_cast<int>(s);
  }
  rows.push_back(nn::gather_cols(e_next, sample_of));

  nn::Matrix poi(poi_.cols(), cols);
  for (Eigen::Index s = 0; s < b; ++s) poi.middleCols(n * s, n) = poi_.transpose();
  rows.push_back(tape.constant(std::move(poi)));

  const nn::Var x = nn::concat_rows(rows);
  return nn::softmax_cols(nn::dense(x, param(tape, weight_), param(tape, bias_)));
}

Eigen::MatrixXd AttentionHead::weights(const Eigen::MatrixXd& q,
                                       const Eigen::VectorXd& e_next) const {
  if (q.rows() != regions() || q.cols() != views_ || e_next.size() != context_dim_) {
    throw ShapeError("attention input has the wrong shape");
  }
  Eigen::MatrixXd w(q.rows(), views_);
  Eigen::VectorXd x(input_dim());
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    x << q.row(r).transpose(), e_next, poi_.row(r).transpose();
    const Eigen::VectorXd logits = weight_.value().transpose() * x + bias_.value();
    w.row(r) = nn::softmax(logits).transpose();
  }
  return w;
}

Eigen::VectorXd fuse(const Eigen::MatrixXd& q, const Eigen::MatrixXd& w) {
  if (q.rows() != w.rows() || q.cols() != w.cols()) {
    throw ShapeError("fuse: predictions and weights differ in shape");
  }
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    const double total = w.row(r).sum();
    if (!(std::abs(total - 1.0) <= 1e-6) || (w.row(r).array() < -1e-6).any()) {
      throw InvariantError("attention weights of region " + std::to_string(r) +
                           " are not a probability vector (sum " + std::to_string(total) + ")");
    }
  }
  return q.cwiseProduct(w).rowwise().sum();
}

Eigen::VectorXd average_fuse(const Eigen::MatrixXd& q) {
  if (q.cols() == 0) throw ShapeError("average_fuse of zero views");
  return q.rowwise().mean();
}

void write_attention_csv(std::ostream& out, std::span<const int> times,
                         std::span<const AttentionWeights> weights, bool header) {
  if (times.size() != weights.size()) throw ShapeError("one time index per weight matrix");
  if (header) out << "t,n,w_dist,w_poi,w_transport\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& w = weights[i].w;
    if (w.cols() != 3) throw ShapeError("attention weights must have three columns");
    for (Eigen::Index n = 0; n < w.rows(); ++n) {
      out << times[i] << ',' << n << ',' << w(n, 0) << ',' << w(n, 1) << ',' << w(n, 2) << '\n';
    }
  }
  out.precision(old_precision);
}

void write_attention_geojson(std::ostream& out, const GridSpec& grid,
                             std::span<const int> times,
                             std::span<const AttentionWeights> weights) {
  if (times.size() != weights.size()) throw ShapeError("one time index per weight matrix");
  const double half = grid.cell_size_m() / 2.0;
  const auto old_precision = out.precision(17);
  out << "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& w = weights[i].w;
    if (w.rows() != grid.node_count() || w.cols() != 3) {
      throw ShapeError("attention weights do not match the grid");
    }
    for (int n = 0; n < grid.node_count(); ++n) {
      const Point c = region_centroid(RegionId{n}, grid);
      const double x0 = c.x - half, x1 = c.x + half, y0 = c.y - half, y1 = c.y + half;
      if (!first) out << ',';
      first = false;
      out << "{\"type\":\"Feature\",\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[["
          << '[' << x0 << ',' << y0 << "],[" << x1 << ',' << y0 << "],[" << x1 << ',' << y1
          << "],[" << x0 << ',' << y1 << "],[" << x0 << ',' << y0 << "]]]},"
          << "\"properties\":{\"t\":" << times[i] << ",\"n\":" << n
          << ",\"w_dist\":" << w(n, 0) << ",\"w_poi\":" << w(n, 1)
          << ",\"w_transport\":" << w(n, 2) << "}}";
    }
  }
  out << "]}\n";
  out.precision(old_precision);
}

}  // namespace acmv
