// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acmv/metrics.hpp"
#include "acmv/pipeline.hpp"

namespace acmv {

enum class VariantKind { historical_average, persistence, temporal_gru, graph };

struct VariantSpec {
  std::string name;
  VariantKind kind = VariantKind::graph;
  std::vector<ViewKind> views;
  FusionMode fusion = FusionMode::attention;

  bool deterministic() const noexcept {
    return kind == VariantKind::historical_average || kind == VariantKind::persistence;
  }
};

/// ha, persistence, gru, dist, poi, transport, dist+poi, dist+transport,
/// poi+transport, mv-gcns, acmv-gcns.
std::vector<std::string> known_variant_names();

/// Accepts a variant name or one of the presets `table1` (ha, persistence,
/// gru, mv-gcns, acmv-gcns), `table2` (the seven graph subsets) and `all`.
/// Unknown names raise ConfigError listing the valid ones.
std::vector<VariantSpec> parse_variants(std::span<const std::string> names);
VariantSpec parse_variant(std::string_view name);

struct RunResult {
  std::string variant;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EvalResult eval;
  TrainReport report;
  // Filled when ComparisonOptions::keep_outputs is set.
  Eigen::MatrixXd test_predictions;            // T' x N persons
  Eigen::MatrixXd test_view_predictions;       // (T' * N) x 3 persons
  std::vector<AttentionWeights> test_weights;  // T' entries
};

struct VariantSummary {
  std::string variant;
  int runs = 0;
  int failures = 0;
  double mae_mean = 0.0, mae_std = 0.0;
  double rmse_mean = 0.0, rmse_std = 0.0;
  double wape_mean = 0.0, wape_std = 0.0;
};

struct ComparisonTable {
  std::vector<RunResult> runs;          // variant-major, then seed order
  std::vector<VariantSummary> summary;  // declaration order
  int successes() const;
};

struct ComparisonOptions {
  int jobs = 1;
  bool keep_outputs = false;
  std::function<void(const RunResult&)> on_run;
};

/// Runs one variant on prepared data. Never throws; failures are recorded.
RunResult run_variant(const VariantSpec& variant, std::uint64_t seed,
                      const PreparedData& data, const RunConfig& config,
                      bool keep_outputs);

/// Trains and evaluates every variant for every seed on the test split.
ComparisonTable run_comparison(const CityScenario& scenario,
                               std::span<const VariantSpec> variants,
                               std::span<const std::uint64_t> seeds,
                               const RunConfig& config,
                               const ComparisonOptions& options = {});

/// `variant,seed,mae,rmse,wape` (failed runs carry empty metrics).
void write_runs_csv(std::ostream& out, const ComparisonTable& table);
/// `variant,runs,failures,mae_mean,mae_std,rmse_mean,rmse_std,wape_mean,wape_std`
void write_summary_csv(std::ostream& out, const ComparisonTable& table);

}  // namespace acmv
