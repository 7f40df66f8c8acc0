// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ffsing/training/model.hpp"

namespace ffsing {

enum class DurationSource { average, ground_truth };

std::string_view to_string(DurationSource source);
DurationSource parse_duration_source(std::string_view text);  // ConfigError

struct StoredTensor {
  std::string name;
  num::Shape shape;
  std::vector<double> values;
};

// Trained parameters plus everything needed to run them: the model
// configuration, the phoneme inventory the embedding rows follow, and the
// duration table used for alignment.
//
// Binary layout (little endian):
//   "FFCK" | u32 version=1
//   u32 n_meta   { str key | str value }*
//   u32 n_tensor { str name | u8 set (0 raw, 1 polyak) | u32 rank | u32 dims[rank] | f64 values[] }*
//   u32 crc32 of every preceding byte
// where str is u32 length + UTF-8 bytes.
struct ModelCheckpoint {
  ModelConfig config;
  std::string inventory_text;
  std::string duration_table_text;
  DurationSource durations = DurationSource::average;
  std::uint64_t step = 0;
  std::vector<StoredTensor> raw;
  std::vector<StoredTensor> polyak;

  static ModelCheckpoint capture(const AcousticModel& model, const std::vector<std::vector<double>>& polyak_values,
                                 const PhonemeInventory& inventory, const DurationTable& table,
                                 DurationSource durations, std::uint64_t step);

  std::vector<std::uint8_t> to_bytes() const;
  static ModelCheckpoint from_bytes(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static ModelCheckpoint load(const std::filesystem::path& path);

  PhonemeInventory inventory() const;
  DurationTable duration_table() const;
  // Model holding the Polyak-averaged (default) or raw parameters.
  AcousticModel model(bool use_polyak = true) const;
};

}  // namespace ffsing
