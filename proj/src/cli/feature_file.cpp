// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/cli/feature_file.hpp"

#include <fstream>
#include <iterator>

#include "detail/binary_io.hpp"
#include "ffsing/error.hpp"

namespace ffsing {

namespace detail {

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

void write_text_file(const std::string& path, std::string_view text) {
  write_binary_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace detail

namespace {

constexpr char kMagic[] = "FFSV";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 20;

}  // namespace

FeatureFile FeatureFile::from_tensor(const num::Tensor& frames) {
  if (frames.rank() != 2) {
    throw ShapeMismatch("feature file needs a rank-2 tensor, got " + num::to_string(frames.shape()));
  }
  FeatureFile f;
  f.frames = static_cast<std::uint32_t>(frames.rows());
  f.dim = static_cast<std::uint32_t>(frames.cols());
  f.hop_ms = static_cast<std::uint32_t>(kHopMs);
  f.payload.assign(frames.values().begin(), frames.values().end());
  return f;
}

num::Tensor FeatureFile::to_tensor() const {
  return num::Tensor({frames, dim}, std::vector<double>(payload.begin(), payload.end()));
}

std::vector<std::uint8_t> FeatureFile::to_bytes() const {
  if (payload.size() != static_cast<std::size_t>(frames) * dim) {
    throw ShapeMismatch("feature payload holds " + std::to_string(payload.size()) + " values for " +
                        std::to_string(frames) + "x" + std::to_string(dim));
  }
  detail::ByteWriter w;
  w.raw(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.u32(frames);
  w.u32(dim);
  w.u32(hop_ms);
  for (float v : payload) {
    w.f32(v);
  }
  return std::move(w.bytes());
}

FeatureFile FeatureFile::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw IoError("feature file: truncated header");
  }
  detail::ByteReader r(bytes);
  if (r.raw(4) != std::string_view(kMagic, 4)) {
    throw IoError("feature file: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw IoError("feature file: unsupported version " + std::to_string(version));
  }
  FeatureFile f;
  f.frames = r.u32();
  f.dim = r.u32();
  f.hop_ms = r.u32();
  if (f.hop_ms != static_cast<std::uint32_t>(kHopMs)) {
    throw IoError("feature file: hop " + std::to_string(f.hop_ms) + " ms, expected " + std::to_string(kHopMs));
  }
  if (f.frames == 0 || f.dim == 0) {
    throw IoError("feature file: empty matrix");
  }
  const std::size_t count = static_cast<std::size_t>(f.frames) * f.dim;
  if (r.remaining() != count * 4) {
    throw IoError("feature file: payload is " + std::to_string(r.remaining()) + " bytes, header implies " +
                  std::to_string(count * 4));
  }
  f.payload.resize(count);
  for (float& v : f.payload) {
    v = r.f32();
  }
  return f;
}

void FeatureFile::write(const std::filesystem::path& path) const {
  detail::write_binary_file(path.string(), to_bytes());
}

FeatureFile FeatureFile::read(const std::filesystem::path& path) {
  try {
    return from_bytes(detail::read_binary_file(path.string()));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

F0Track read_f0_file(const std::filesystem::path& path) {
  const FeatureFile f = FeatureFile::read(path);
  if (f.dim != 1) {
    throw LengthMismatch(path.string() + ": F0 file must have dim 1, got " + std::to_string(f.dim));
  }
  return F0Track{std::vector<double>(f.payload.begin(), f.payload.end())};
}

void write_f0_file(const std::filesystem::path& path, const F0Track& f0) {
  FeatureFile::from_tensor(num::Tensor({f0.hz.size(), 1}, f0.hz)).write(path);
}

}  // namespace ffsing
