// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ffsing/conditioning.hpp"
#include "ffsing/numerics/layers.hpp"

namespace ffsing {

struct DecoderConfig {
  std::size_t d_model = 256;
  std::size_t num_layers = 6;
  std::size_t kernel = 3;
  std::size_t reduction = 2;
  std::size_t out_dim = 64;
  double dropout = 0.1;
  double sigma_init = 30.0;
  bool use_attention = true;

  void validate() const;  // ConfigError
};

// Single-head self-attention with a learned Gaussian locality bias.
// sigma = softplus(sigma_raw) keeps the width positive.
struct AttentionParams {
  num::Linear query;
  num::Linear key;
  num::Linear value;
  num::Linear output;
  num::Tensor sigma_raw;  // one element

  double sigma() const;
  void collect(const std::string& prefix, num::NamedTensors& out) const;
};

struct DecoderLayerParams {
  num::Tensor attn_norm_gain;
  num::Tensor attn_norm_bias;
  std::optional<AttentionParams> attention;  // absent in the no-attention variant
  num::Tensor conv_norm_gain;
  num::Tensor conv_norm_bias;
  num::GluConv conv;

  void collect(const std::string& prefix, num::NamedTensors& out) const;
};

struct DecoderParams {
  num::Linear input_proj;  // (C_enc + K_f0 + K_pos) -> d_model
  std::vector<DecoderLayerParams> layers;
  num::Linear output_proj;  // d_model -> out_dim * r

  static DecoderParams init(const DecoderConfig& config, std::size_t input_dim, num::Rng& rng);
  void collect(const std::string& prefix, num::NamedTensors& out) const;
};

// softplus^-1(sigma), so that softplus(sigma_raw) reproduces sigma.
double inverse_softplus(double sigma);

// M[j,k] = -(j-k)^2 / (2 sigma^2) for a T x T score matrix.
num::Tensor attention_bias(std::size_t t, double sigma);

// Concatenates [encoder row of each frame | F0 code | position code],
// projects to d_model and mean-pools groups of r frames.
num::Tensor assemble_input(const num::Tensor& encoded, const FrameConditioning& cond, const num::Linear& proj,
                           std::size_t reduction);

// softmax(Q K^T / sqrt(d_model) + M) V followed by the output projection.
// When `probabilities` is given it receives the attention matrix.
num::Tensor biased_attention(const num::Tensor& x, const AttentionParams& params,
                             num::Tensor* probabilities = nullptr);

// Pre-norm residual sub-layers:
//   y = x + Drop(Attn(LN(x)));  out = y + Drop(GLU(Conv(LN(y))))
num::Tensor decoder_layer(const num::Tensor& x, const DecoderLayerParams& params, const DecoderConfig& config,
                          num::Mode mode, num::Rng& rng);

// Full decoder: T x out_dim frames for T = cond.frames(). The r-padding
// frames of the last step are computed and dropped.
num::Tensor decode(const num::Tensor& encoded, const FrameConditioning& cond, const DecoderConfig& config,
                   const DecoderParams& params, num::Mode mode, num::Rng& rng);

}  // namespace ffsing
