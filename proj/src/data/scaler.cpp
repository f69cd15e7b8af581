// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "acmv/data.hpp"
#include "acmv/errors.hpp"

namespace acmv {

Scaler::Scaler(double q1, double q3) : q1_(q1), q3_(q3), fitted_(true) {
  if (!std::isfinite(q1) || !std::isfinite(q3) || !(q3 > q1)) {
    throw NumericError("degenerate scaler: need finite Q1 < Q3, got Q1 = " +
                       std::to_string(q1) + ", Q3 = " + std::to_string(q3));
  }
}

void Scaler::require_fitted() const {
  if (!fitted_) throw StateError("scaler has not been fitted");
}

double Scaler::q1() const {
  require_fitted();
  return q1_;
}

double Scaler::q3() const {
  require_fitted();
  return q3_;
}

double Scaler::scale(double x) const {
  require_fitted();
  return (x - q1_) / (q3_ - q1_);
}

double Scaler::unscale(double x) const {
  require_fitted();
  return x * (q3_ - q1_) + q1_;
}

Eigen::VectorXd Scaler::scale(const Eigen::VectorXd& x) const {
  require_fitted();
  return (x.array() - q1_) / (q3_ - q1_);
}

Eigen::VectorXd Scaler::unscale(const Eigen::VectorXd& x) const {
  require_fitted();
  return x.array() * (q3_ - q1_) + q1_;
}

double linear_percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptyDatasetError("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw BoundsError("percentile outside [0, 100]");
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Scaler fit_quartile_scaler(std::span<const double> values) {
  if (values.empty()) throw EmptyDatasetError("cannot fit a scaler on no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = linear_percentile(sorted, 25.0);
  const double q3 = linear_percentile(sorted, 75.0);
  if (!(q3 > q1)) {
    throw NumericError("degenerate scale: Q1 = Q3 = " + std::to_string(q1) +
                       " on the training values");
  }
  return Scaler(q1, q3);
}

DatasetSplits chronological_split(std::vector<SeriesWindow> windows,
                                  const SplitFractions& fractions) {
  const double total = fractions.train + fractions.val + fractions.test;
  if (!(fractions.train > 0.0 && fractions.val > 0.0 && fractions.test > 0.0) ||
      std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
  const auto n = windows.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fractions.train * n));
  const auto n_val = static_cast<std::size_t>(std::llround(fractions.val * n));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw EmptyDatasetError("too few windows (" + std::to_string(n) +
                            ") for a train/val/test split");
  }
  DatasetSplits out;
  auto first = std::make_move_iterator(windows.begin());
  out.train.windows.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(first + static_cast<std::ptrdiff_t>(n_train),
                 first + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val),
                  std::make_move_iterator(windows.end()));
  return out;
}

Scaler fit_scaler(const TrainSplit& train) {
  if (train.windows.empty()) throw EmptyDatasetError("cannot fit a scaler on an empty split");
  std::set<int> seen;
  std::vector<double> values;
  auto take = [&](const PopulationFrame& f) {
    if (!seen.insert(f.time_index).second) return;
    values.insert(values.end(), f.values.data(), f.values.data() + f.values.size());
  };
  for (const auto& w : train.windows) {
    for (const auto& f : w.inputs) take(f);
    take(w.target);
  }
  return fit_quartile_scaler(values);
}

SeriesWindow scale_window(const SeriesWindow& window, const Scaler& scaler) {
  SeriesWindow out = window;
  for (auto& f : out.inputs) f.values = scaler.scale(f.values);
  out.target.values = scaler.scale(out.target.values);
  return out;
}

std::vector<SeriesWindow> scale_windows(std::span<const SeriesWindow> windows,
                                        const Scaler& scaler) {
  std::vector<SeriesWindow> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(scale_window(w, scaler));
  return out;
}

}  // namespace acmv
