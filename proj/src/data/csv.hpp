// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "acmv/errors.hpp"

namespace acmv::csv {

/// Header-addressed reader for simple comma-separated files without quoting.
class Reader {
 public:
  Reader(const std::filesystem::path& path, std::vector<std::string> required)
      : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in_, header)) {
      throw EmptyDatasetError(path.filename().string() + " is empty");
    }
    line_ = 1;
    const auto names = split(strip(header));
    for (const auto& name : required) {
      int found = -1;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) found = static_cast<int>(i);
      }
      if (found < 0) {
        throw ParseError(path.filename().string() + ": missing column '" + name + "'");
      }
      columns_.push_back(found);
    }
    names_ = std::move(required);
    width_ = names.size();
  }

  /// Reads the next data row; false at end of file. Blank lines are skipped.
  bool next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      text = strip(text);
      if (text.empty()) continue;
      fields_ = split(text);
      if (fields_.size() != width_) {
        fail("expected " + std::to_string(width_) + " fields, found " +
             std::to_string(fields_.size()));
      }
      return true;
    }
    return false;
  }

  int line() const noexcept { return line_; }
  std::string_view text(int column) const { return fields_[columns_[column]]; }

  long integer(int column) const {
    const std::string_view s = text(column);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail("column '" + names_[column] + "': '" + std::string(s) + "' is not an integer");
    }
    return v;
  }

  double real(int column) const {
    const std::string_view s = text(column);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail("column '" + names_[column] + "': '" + std::string(s) + "' is not a number");
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_.filename().string() + " line " + std::to_string(line_) + ": " + what);
  }

 private:
  static std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos
                                                               : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<int> columns_;
  std::vector<std::string> names_;
  std::vector<std::string> fields_;
  std::size_t width_ = 0;
  int line_ = 0;
};

}  // namespace acmv::csv
