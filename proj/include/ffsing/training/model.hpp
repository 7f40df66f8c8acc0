// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ffsing/conditioning.hpp"
#include "ffsing/decoder.hpp"
#include "ffsing/duration.hpp"
#include "ffsing/encoder.hpp"

namespace ffsing {

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  F0CoderConfig f0;
  std::size_t pos_dims = 4;

  void validate() const;
  std::size_t decoder_input_dim() const { return encoder.channels + f0.dims + pos_dims; }
};

// Sets a model field from a `key=value` entry. Returns false for keys that
// are not model keys; throws ConfigError for malformed values.
bool apply_model_key(ModelConfig& config, std::string_view key, std::string_view value);
// `key=value` lines for every model field, accepted by apply_model_key.
std::string serialize_model_config(const ModelConfig& config);

// Everything the network consumes for one phrase.
struct PhraseInput {
  std::vector<std::size_t> phoneme_ids;  // plan order, one encoder state each
  FrameConditioning cond;
};

PhraseInput prepare_input(const DurationPlan& plan, const F0Track& f0, const PhonemeInventory& inventory,
                          const ModelConfig& config);

// Encoder + aligner + decoder with its learned parameters.
struct AcousticModel {
  ModelConfig config;
  std::size_t vocab = 0;
  EncoderParams encoder;
  DecoderParams decoder;

  static AcousticModel init(const ModelConfig& config, std::size_t vocab, std::uint64_t seed);

  // Named handles to every learned tensor in a fixed order.
  num::NamedTensors parameters() const;
  // Overwrites parameter values by name; shapes must match.
  void load_values(const std::vector<std::pair<std::string, std::vector<double>>>& values);

  num::Tensor forward(const PhraseInput& input, num::Mode mode, num::Rng& rng) const;
  // Eval-mode forward without graph construction.
  num::Tensor infer(const PhraseInput& input) const;
};

}  // namespace ffsing
