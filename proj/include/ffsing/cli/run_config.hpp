// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "ffsing/training/checkpoint.hpp"
#include "ffsing/training/corpus.hpp"
#include "ffsing/training/model.hpp"
#include "ffsing/training/trainer.hpp"

namespace ffsing {

// Settings for `train` and `ablate`, read from a UTF-8 `key = value` file
// (`#` comments). Unknown keys are a ConfigError. Relative paths resolve
// against the config file's directory.
//
// Model keys: embed_dim, encoder_channels, encoder_kernel, encoder_blocks,
//   d_model, num_layers, decoder_kernel, reduction, out_dim, dropout,
//   sigma_init, attention, f0_dims, f0_min, f0_max, pos_dims.
// Optimisation keys: updates, batch_size, seed, base_lr, warmup, adam_beta1,
//   adam_beta2, adam_eps, polyak_decay, val_every.
// Data keys: inventory, duration_table, durations (average|ground_truth),
//   train_phrases, val_phrases (phrase lists; when train_phrases is unset a
//   synthetic corpus is generated from corpus_seed, corpus_phrases and
//   corpus_val_phrases).
// Output keys: checkpoint, log, report.
struct RunConfig {
  ModelConfig model;
  TrainOptions train;
  DurationSource durations = DurationSource::average;

  std::filesystem::path inventory;
  std::filesystem::path duration_table;
  std::filesystem::path train_phrases;  // empty: synthetic corpus
  std::filesystem::path val_phrases;
  std::uint64_t corpus_seed = 7;
  std::size_t corpus_phrases = 16;
  std::size_t corpus_val_phrases = 4;

  std::filesystem::path checkpoint;
  std::filesystem::path log;
  std::filesystem::path report;

  // Desk-scale defaults (d_model 64, 2 layers, batch 8, 2000 updates, warm-up
  // 160) with output paths under `base_dir`.
  static RunConfig defaults(const std::filesystem::path& base_dir);
  static RunConfig parse(std::string_view text, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
};

// Bundled inventory and duration table.
std::filesystem::path default_data_dir();

}  // namespace ffsing
