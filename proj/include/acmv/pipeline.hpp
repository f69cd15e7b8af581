// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "acmv/config.hpp"

namespace acmv {

/// Graphs, windows, splits and the train-only scaler for one scenario.
struct PreparedData {
  GraphSet graphs;
  DatasetSplits raw;
  Scaler scaler;
  std::vector<SeriesWindow> train_scaled;
  std::vector<SeriesWindow> val_scaled;
  std::vector<SeriesWindow> test_scaled;
};

PreparedData prepare_data(const CityScenario& scenario, const RunConfig& config);

}  // namespace acmv
