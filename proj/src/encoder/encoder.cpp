// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/encoder.hpp"

#include "ffsing/error.hpp"

namespace ffsing {

void EncoderConfig::validate() const {
  if (embed_dim == 0 || channels == 0 || num_blocks == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (kernel % 2 == 0) {
    throw ConfigError("encoder kernel must be odd");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("encoder dropout must lie in [0, 1)");
  }
}

EncoderParams EncoderParams::init(const EncoderConfig& config, std::size_t vocab, num::Rng& rng) {
  config.validate();
  EncoderParams p;
  p.embedding = num::normal_parameter({vocab, config.embed_dim}, 0.01, rng);
  p.input_proj = num::Linear::init(config.embed_dim, config.channels, rng);
  for (std::size_t b = 0; b < config.num_blocks; ++b) {
    p.blocks.push_back(num::GluConv::init(config.kernel, config.channels, config.channels, config.dropout, rng));
  }
  p.residual_proj = num::Linear::init(config.embed_dim, config.channels, rng);
  return p;
}

void EncoderParams::collect(const std::string& prefix, num::NamedTensors& out) const {
  out.emplace_back(prefix + ".embedding", embedding);
  input_proj.collect(prefix + ".input_proj", out);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].collect(prefix + ".block" + std::to_string(b), out);
  }
  residual_proj.collect(prefix + ".residual_proj", out);
}

num::Tensor glu_block(const num::Tensor& x, const num::GluConv& conv, double dropout, num::Mode mode,
                      num::Rng& rng) {
  const num::Tensor dropped = num::dropout(x, dropout, mode, rng);
  return num::glu(num::add_bias(num::conv1d(dropped, conv.weight, num::Padding::same), conv.bias));
}

num::Tensor encode(std::span<const std::size_t> phoneme_ids, const EncoderConfig& config,
                   const EncoderParams& params, num::Mode mode, num::Rng& rng) {
  const num::Tensor embedded = num::gather_rows(params.embedding, phoneme_ids);
  num::Tensor h = params.input_proj(embedded);
  for (const num::GluConv& block : params.blocks) {
    h = glu_block(h, block, config.dropout, mode, rng);
  }
  return num::add(h, params.residual_proj(embedded));
}

num::Tensor encode(const std::vector<std::string>& phonemes, const PhonemeInventory& inventory,
                   const EncoderConfig& config, const EncoderParams& params, num::Mode mode, num::Rng& rng) {
  std::vector<std::size_t> ids;
  ids.reserve(phonemes.size());
  for (const std::string& ph : phonemes) {
    ids.push_back(inventory.id(ph));
  }
  return encode(ids, config, params, mode, rng);
}

}  // namespace ffsing
