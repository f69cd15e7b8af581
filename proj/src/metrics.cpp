// SPDX-License-Identifier: Apache-2.0
#include "acmv/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "acmv/errors.hpp"

namespace acmv {

EvalResult evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw ShapeError("evaluate: prediction is " + std::to_string(pred.rows()) + "x" +
                     std::to_string(pred.cols()) + ", truth is " +
                     std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  }
  if (truth.size() == 0) throw EmptyDatasetError("evaluate on an empty set");
  const double mass = truth.cwiseAbs().sum();
  if (!(mass > 0.0)) throw NumericError("WAPE is undefined when every truth value is zero");

  const Eigen::ArrayXXd err = (truth - pred).array();
  const double count = static_cast<double>(truth.size());
  EvalResult r;
  r.mae = err.abs().sum() / count;
  r.rmse = std::sqrt(err.square().sum() / count);
  r.wape = 100.0 * err.abs().sum() / mass;

  const double steps = static_cast<double>(truth.rows());
  r.region_mae = err.abs().colwise().sum().transpose() / steps;
  r.region_rmse = (err.square().colwise().sum().transpose() / steps).sqrt();
  r.region_wape.resize(truth.cols());
  for (Eigen::Index n = 0; n < truth.cols(); ++n) {
    const double m = truth.col(n).cwiseAbs().sum();
    r.region_wape[n] = m > 0.0 ? 100.0 * err.col(n).abs().sum() / m
                               : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

Eigen::MatrixXd stack_frames(std::span<const PopulationFrame> frames) {
  if (frames.empty()) return {};
  const auto n = frames.front().values.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames.size()), n);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].values.size() != n) throw ShapeError("frames differ in region count");
    out.row(static_cast<Eigen::Index>(t)) = frames[t].values.transpose();
  }
  return out;
}

HistoricalAverage HistoricalAverage::fit(std::span<const PopulationFrame> frames,
                                         std::span<const ContextRecord> contexts) {
  if (frames.size() != contexts.size()) {
    throw ShapeError("historical average needs one context per frame");
  }
  if (frames.empty()) throw EmptyDatasetError("historical average over no frames");
  std::map<std::pair<bool, int>, int> counts;
  HistoricalAverage ha;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    validate(contexts[t]);
    const auto key = std::make_pair(contexts[t].holiday, contexts[t].hour);
    auto [it, inserted] = ha.means_.try_emplace(key, frames[t].values);
    if (!inserted) {
      if (it->second.size() != frames[t].values.size()) {
        throw ShapeError("frames differ in region count");
      }
      it->second += frames[t].values;
    }
    ++counts[key];
  }
  for (auto& [key, sum] : ha.means_) sum /= static_cast<double>(counts[key]);
  return ha;
}

PopulationFrame HistoricalAverage::predict(bool holiday, int hour, int time_index) const {
  const auto it = means_.find({holiday, hour});
  if (it == means_.end()) {
    throw BoundsError("historical average has no training frame for " +
                      std::string(holiday ? "holiday" : "business day") + " hour " +
                      std::to_string(hour));
  }
  return PopulationFrame{it->second, time_index};
}

PopulationFrame HistoricalAverage::predict(const ContextRecord& target, int time_index) const {
  return predict(target.holiday, target.hour, time_index);
}

PopulationFrame persistence(const SeriesWindow& window) {
  if (window.inputs.empty()) throw EmptyDatasetError("persistence of an empty window");
  return PopulationFrame{window.inputs.back().values, window.target.time_index};
}

}  // namespace acmv
