// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "acmv/data.hpp"
#include "acmv/graph.hpp"
#include "acmv/model.hpp"
#include "acmv/train.hpp"

namespace acmv {

/// Everything a run needs besides the scenario data. Stored as nested JSON:
///
///   { "seed": 7,
///     "model":     { "cheb_order", "gcn_features", "gru_hidden", "embedding",
///                    "window", "activation", "gcn_bias" },
///     "graph":     { "theta", "kappa", "gamma" },
///     "optimizer": { "lr", "beta1", "beta2", "epsilon" },
///     "training":  { "epochs", "batch_size", "patience", "clip_norm" },
///     "split":     { "train", "val", "test" },
///     "generator": { ...GeneratorConfig fields... } }
///
/// Every section and key is optional; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 7;
  ModelConfig model{};
  GraphParams graph{};
  TrainOptions training{};
  SplitFractions split{};
  GeneratorConfig generator{};
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical, key-sorted JSON.
std::string to_json(const RunConfig& config, int indent = 2);
std::string to_json(const GeneratorConfig& config, int indent = -1);
GeneratorConfig parse_generator_config(std::string_view json_text);

/// Hex FNV-1a 64 of the canonical JSON, excluding the seed.
std::string config_hash(const RunConfig& config);

}  // namespace acmv
