// SPDX-License-Identifier: Apache-2.0
#include "acmv/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "acmv/errors.hpp"

namespace acmv::nn {
namespace {

constexpr char kMagic[8] = {'A', 'C', 'M', 'V', 'C', 'K', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw ParseError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::vector<const Param*>& params,
                     const std::string& meta) {
  std::string buf(kMagic, sizeof kMagic);
  put_u32(buf, kCheckpointVersion);
  put_u32(buf, static_cast<std::uint32_t>(meta.size()));
  buf += meta;
  put_u32(buf, static_cast<std::uint32_t>(params.size()));
  for (const Param* p : params) {
    put_u32(buf, static_cast<std::uint32_t>(p->name().size()));
    buf += p->name();
    put_u32(buf, static_cast<std::uint32_t>(p->value().rows()));
    put_u32(buf, static_cast<std::uint32_t>(p->value().cols()));
    for (Eigen::Index k = 0; k < p->value().size(); ++k) put_f64(buf, p->value().data()[k]);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw ParseError(path.string() + " is not a checkpoint file");
  }
  Checkpoint ckpt;
  ckpt.version = r.u32();
  if (ckpt.version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(ckpt.version));
  }
  ckpt.meta = r.bytes(r.u32());
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.bytes(r.u32());
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = r.f64();
    if (!ckpt.tensors.emplace(std::move(name), std::move(m)).second) {
      throw ParseError("duplicate tensor name in checkpoint");
    }
  }
  if (!r.done()) throw ParseError("trailing bytes in checkpoint " + path.string());
  return ckpt;
}

void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params) {
  if (ckpt.tensors.size() != params.size()) {
    throw ShapeError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                     " tensors, model has " + std::to_string(params.size()));
  }
  for (Param* p : params) {
    auto it = ckpt.tensors.find(p->name());
    if (it == ckpt.tensors.end()) throw ShapeError("checkpoint lacks parameter " + p->name());
    if (it->second.rows() != p->value().rows() || it->second.cols() != p->value().cols()) {
      throw ShapeError("shape mismatch for parameter " + p->name());
    }
    p->value() = it->second;
    p->zero_grad();
  }
}

}  // namespace acmv::nn
