// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acmv/comparison.hpp"
#include "acmv/config.hpp"

namespace acmv::app {

namespace fs = std::filesystem;

/// Options shared by every subcommand. An absent config means defaults; an
/// explicit seed overrides the one in the config.
struct Common {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct SynthArgs {
  Common common;
};

struct TrainArgs {
  Common common;
  fs::path scenario;
  std::string variant = "acmv-gcns";
  bool quiet = false;
};

struct EvaluateArgs {
  Common common;
  fs::path checkpoint;
  fs::path scenario;
};

struct CompareArgs {
  Common common;
  fs::path scenario;
  std::vector<std::string> variants{"table1"};
  std::vector<std::uint64_t> seeds;  // empty: {seed}
  int runs = 0;                      // > 0: seeds seed, seed + 1, ...
  int jobs = 1;
  bool quiet = false;
};

struct ExportArgs {
  Common common;
  fs::path checkpoint;
  fs::path scenario;
  std::optional<int> from;  // first target interval, inclusive
  std::optional<int> to;    // last target interval, exclusive
};

RunConfig resolve_config(const Common& common);

/// Each command writes its artifacts plus manifest.json under `out` and
/// returns the process exit code. Library errors propagate.
int cmd_synth(const SynthArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_compare(const CompareArgs& args);
int cmd_export_attention(const ExportArgs& args);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

/// Model, scaler and data rebuilt from a training checkpoint against a
/// scenario. Rejects mismatched region counts and config hashes.
struct LoadedRun {
  RunConfig config;
  VariantSpec variant;
  GridSpec grid{1, 1};
  PreparedData data;
  std::optional<AcmvModel> model;
};
LoadedRun load_run(const fs::path& checkpoint, const fs::path& scenario);

}  // namespace acmv::app

namespace acmv::app {

/// Keeps large tape buffers on the heap between batches instead of handing
/// them back to the kernel (glibc only; a no-op elsewhere).
void tune_allocator();

}  // namespace acmv::app
