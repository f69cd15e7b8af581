// SPDX-License-Identifier: Apache-2.0
#include "acmv/pipeline.hpp"

namespace acmv {

PreparedData prepare_data(const CityScenario& scenario, const RunConfig& config) {
  PreparedData d;
  d.graphs = build_graph_set(scenario, config.graph);
  d.raw = chronological_split(
      make_windows(scenario.series, scenario.contexts, config.model.window), config.split);
  d.scaler = fit_scaler(d.raw.train);
  d.train_scaled = scale_windows(d.raw.train.windows, d.scaler);
  d.val_scaled = scale_windows(d.raw.val, d.scaler);
  d.test_scaled = scale_windows(d.raw.test, d.scaler);
  return d;
}

}  // namespace acmv
