// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ffsing/conditioning.hpp"
#include "ffsing/numerics/tensor.hpp"

namespace ffsing {

// Frame-major float32 matrix with a small header:
//
//   "FFSV" | u32 version=1 | u32 frames | u32 dim | u32 hop_ms | f32 payload[frames * dim]
//
// all little endian. Acoustic features use dim=64; F0 tracks use dim=1 (Hz,
// 0 for unvoiced frames).
struct FeatureFile {
  std::uint32_t frames = 0;
  std::uint32_t dim = 0;
  std::uint32_t hop_ms = 10;
  std::vector<float> payload;

  static FeatureFile from_tensor(const num::Tensor& frames);
  num::Tensor to_tensor() const;

  std::vector<std::uint8_t> to_bytes() const;
  // IoError on bad magic, version, hop or payload length.
  static FeatureFile from_bytes(std::span<const std::uint8_t> bytes);
  void write(const std::filesystem::path& path) const;
  static FeatureFile read(const std::filesystem::path& path);
};

F0Track read_f0_file(const std::filesystem::path& path);  // dim must be 1
void write_f0_file(const std::filesystem::path& path, const F0Track& f0);

}  // namespace ffsing
