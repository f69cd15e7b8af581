// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <utility>

#include "acmv/grid.hpp"

namespace acmv {

struct EvalResult {
  double mae = 0.0;   // persons
  double rmse = 0.0;  // persons
  double wape = 0.0;  // percent
  Eigen::VectorXd region_mae;
  Eigen::VectorXd region_rmse;
  Eigen::VectorXd region_wape;  // NaN for regions with no truth mass
};

/// pred and truth are T' x N. WAPE = 100 * sum|y - yhat| / sum|y|.
EvalResult evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

/// Stacks frame values as rows.
Eigen::MatrixXd stack_frames(std::span<const PopulationFrame> frames);

/// Per-region mean over training frames with the same (day type, hour).
class HistoricalAverage {
 public:
  static HistoricalAverage fit(std::span<const PopulationFrame> frames,
                               std::span<const ContextRecord> contexts);

  PopulationFrame predict(bool holiday, int hour, int time_index = 0) const;
  PopulationFrame predict(const ContextRecord& target, int time_index = 0) const;

 private:
  std::map<std::pair<bool, int>, Eigen::VectorXd> means_;
};

/// Last input frame, relabelled to the target interval.
PopulationFrame persistence(const SeriesWindow& window);

}  // namespace acmv
