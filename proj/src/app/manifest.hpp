// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace acmv::app {

/// Reproducibility record written next to every command's outputs.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }
  void input(const std::string& role, const std::filesystem::path& path);
  void output(const std::filesystem::path& path);
  void write(const std::filesystem::path& dir);

 private:
  nlohmann::json doc_;
};

std::string utc_timestamp();

}  // namespace acmv::app
