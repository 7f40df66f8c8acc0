// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ffsing/numerics/layers.hpp"
#include "ffsing/score.hpp"

namespace ffsing {

struct EncoderConfig {
  std::size_t embed_dim = 256;
  std::size_t channels = 64;
  std::size_t kernel = 3;
  std::size_t num_blocks = 1;
  double dropout = 0.1;

  void validate() const;  // ConfigError
};

// Phoneme embeddings, a 256 -> C projection into the convolutional stack,
// GLU blocks over the phoneme axis, and a separately projected monophone
// shortcut added after the last block.
struct EncoderParams {
  num::Tensor embedding;  // vocab x embed_dim
  num::Linear input_proj;
  std::vector<num::GluConv> blocks;
  num::Linear residual_proj;

  static EncoderParams init(const EncoderConfig& config, std::size_t vocab, num::Rng& rng);
  void collect(const std::string& prefix, num::NamedTensors& out) const;
};

// dropout -> same-padded conv to 2C' channels -> A * sigmoid(B).
num::Tensor glu_block(const num::Tensor& x, const num::GluConv& conv, double dropout, num::Mode mode,
                      num::Rng& rng);

// One output row of `config.channels` per phoneme id.
num::Tensor encode(std::span<const std::size_t> phoneme_ids, const EncoderConfig& config,
                   const EncoderParams& params, num::Mode mode, num::Rng& rng);

// Resolves symbols first; throws UnknownPhoneme.
num::Tensor encode(const std::vector<std::string>& phonemes, const PhonemeInventory& inventory,
                   const EncoderConfig& config, const EncoderParams& params, num::Mode mode, num::Rng& rng);

}  // namespace ffsing
