// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "acmv/nn/tape.hpp"

namespace acmv::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers little-endian:
///   "ACMVCKPT" | u32 version | u32 meta_len | meta bytes | u32 count |
///   count x (u32 name_len | name | u32 rows | u32 cols | rows*cols f64,
///            column-major)
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string meta;
  std::map<std::string, Matrix> tensors;
};

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<const Param*>& params, const std::string& meta);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies tensors into params by name; names and shapes must match exactly.
void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params);

}  // namespace acmv::nn
