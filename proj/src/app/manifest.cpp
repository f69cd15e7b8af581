// SPDX-License-Identifier: Apache-2.0
#include "manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>

#include <openssl/evp.h>

#include "acmv/app.hpp"
#include "acmv/data.hpp"
#include "acmv/errors.hpp"

namespace acmv::app {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::string command) {
  doc_["command"] = std::move(command);
  doc_["started_at"] = utc_timestamp();
  doc_["inputs"] = nlohmann::json::object();
  doc_["outputs"] = nlohmann::json::object();
}

void Manifest::input(const std::string& role, const fs::path& path) {
  nlohmann::json entry{{"path", path.string()}};
  if (fs::is_directory(path)) {
    nlohmann::json files = nlohmann::json::object();
    for (const char* name : kScenarioFiles) {
      if (fs::exists(path / name)) files[name] = sha256_file(path / name);
    }
    entry["sha256"] = files;
  } else {
    entry["sha256"] = sha256_file(path);
  }
  doc_["inputs"][role] = entry;
}

void Manifest::output(const fs::path& path) {
  doc_["outputs"][path.filename().string()] = sha256_file(path);
}

void Manifest::write(const fs::path& dir) {
  doc_["finished_at"] = utc_timestamp();
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc_.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace acmv::app
