// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/decoder.hpp"

#include <array>
#include <cmath>

#include "ffsing/encoder.hpp"
#include "ffsing/error.hpp"

namespace ffsing {

void DecoderConfig::validate() const {
  if (d_model == 0 || num_layers == 0 || out_dim == 0) {
    throw ConfigError("decoder dimensions must be positive");
  }
  if (kernel % 2 == 0) {
    throw ConfigError("decoder kernel must be odd");
  }
  if (reduction == 0) {
    throw ConfigError("reduction factor must be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("decoder dropout must lie in [0, 1)");
  }
  if (!(sigma_init > 0.0)) {
    throw ConfigError("sigma_init must be positive");
  }
}

double inverse_softplus(double sigma) {
  // log(exp(s) - 1) = s + log(1 - exp(-s))
  return sigma + std::log(-std::expm1(-sigma));
}

double AttentionParams::sigma() const {
  const double raw = sigma_raw[0];
  return raw > 0.0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

void AttentionParams::collect(const std::string& prefix, num::NamedTensors& out) const {
  query.collect(prefix + ".query", out);
  key.collect(prefix + ".key", out);
  value.collect(prefix + ".value", out);
  output.collect(prefix + ".output", out);
  out.emplace_back(prefix + ".sigma_raw", sigma_raw);
}

void DecoderLayerParams::collect(const std::string& prefix, num::NamedTensors& out) const {
  out.emplace_back(prefix + ".attn_norm.gain", attn_norm_gain);
  out.emplace_back(prefix + ".attn_norm.bias", attn_norm_bias);
  if (attention) {
    attention->collect(prefix + ".attention", out);
  }
  out.emplace_back(prefix + ".conv_norm.gain", conv_norm_gain);
  out.emplace_back(prefix + ".conv_norm.bias", conv_norm_bias);
  conv.collect(prefix + ".conv", out);
}

DecoderParams DecoderParams::init(const DecoderConfig& config, std::size_t input_dim, num::Rng& rng) {
  config.validate();
  const std::size_t d = config.d_model;
  DecoderParams p;
  p.input_proj = num::Linear::init(input_dim, d, rng);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    DecoderLayerParams layer;
    layer.attn_norm_gain = num::Tensor::filled({d}, 1.0, true);
    layer.attn_norm_bias = num::Tensor::zeros({d}, true);
    if (config.use_attention) {
      layer.attention = AttentionParams{num::Linear::init(d, d, rng), num::Linear::init(d, d, rng),
                                        num::Linear::init(d, d, rng), num::Linear::init(d, d, rng),
                                        num::Tensor::scalar(inverse_softplus(config.sigma_init), true)};
    }
    layer.conv_norm_gain = num::Tensor::filled({d}, 1.0, true);
    layer.conv_norm_bias = num::Tensor::zeros({d}, true);
    layer.conv = num::GluConv::init(config.kernel, d, d, config.dropout, rng);
    p.layers.push_back(std::move(layer));
  }
  p.output_proj = num::Linear::init(d, config.out_dim * config.reduction, rng);
  return p;
}

void DecoderParams::collect(const std::string& prefix, num::NamedTensors& out) const {
  input_proj.collect(prefix + ".input_proj", out);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].collect(prefix + ".layer" + std::to_string(l), out);
  }
  output_proj.collect(prefix + ".output_proj", out);
}

num::Tensor attention_bias(std::size_t t, double sigma) {
  const num::Tensor zeros = num::Tensor::zeros({t, t});
  num::NoGradGuard guard;
  return num::gaussian_bias(zeros, num::Tensor::scalar(sigma));
}

num::Tensor assemble_input(const num::Tensor& encoded, const FrameConditioning& cond, const num::Linear& proj,
                           std::size_t reduction) {
  const std::size_t frames = cond.frames();
  if (frames == 0 || cond.f0_code.rows() != frames || cond.pos_code.rows() != frames) {
    throw LengthMismatch("conditioning streams disagree on frame count");
  }
  for (std::size_t s : cond.state_index) {
    if (s >= encoded.rows()) {
      throw LengthMismatch("frame refers to encoder state " + std::to_string(s) + " of " +
                           std::to_string(encoded.rows()));
    }
  }
  const std::array<num::Tensor, 3> parts{num::gather_rows(encoded, cond.state_index), cond.f0_code,
                                         cond.pos_code};
  return group_frames(proj(num::concat_cols(parts)), reduction);
}

num::Tensor biased_attention(const num::Tensor& x, const AttentionParams& params, num::Tensor* probabilities) {
  const num::Tensor q = params.query(x);
  const num::Tensor k = params.key(x);
  const num::Tensor v = params.value(x);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  const num::Tensor scores = num::scale(num::matmul(q, num::transpose(k)), inv_sqrt_d);
  const num::Tensor sigma = num::softplus(params.sigma_raw);
  const num::Tensor weights = num::softmax_rows(num::gaussian_bias(scores, sigma));
  if (probabilities != nullptr) {
    *probabilities = weights;
  }
  return params.output(num::matmul(weights, v));
}

num::Tensor decoder_layer(const num::Tensor& x, const DecoderLayerParams& params, const DecoderConfig& config,
                          num::Mode mode, num::Rng& rng) {
  num::Tensor y = x;
  if (params.attention) {
    const num::Tensor h = num::layer_norm(y, params.attn_norm_gain, params.attn_norm_bias);
    y = num::add(y, num::dropout(biased_attention(h, *params.attention), config.dropout, mode, rng));
  }
  const num::Tensor h = num::layer_norm(y, params.conv_norm_gain, params.conv_norm_bias);
  const num::Tensor conv = num::glu(num::add_bias(num::conv1d(h, params.conv.weight), params.conv.bias));
  return num::add(y, num::dropout(conv, config.dropout, mode, rng));
}

num::Tensor decode(const num::Tensor& encoded, const FrameConditioning& cond, const DecoderConfig& config,
                   const DecoderParams& params, num::Mode mode, num::Rng& rng) {
  num::Tensor x = assemble_input(encoded, cond, params.input_proj, config.reduction);
  for (const DecoderLayerParams& layer : params.layers) {
    x = decoder_layer(x, layer, config, mode, rng);
  }
  const num::Tensor steps = params.output_proj(x);  // T' x (out_dim * r)
  const num::Tensor frames = num::reshape(steps, {steps.rows() * config.reduction, config.out_dim});
  if (frames.rows() == cond.frames()) {
    return frames;
  }
  return num::slice_rows(frames, 0, cond.frames());
}

}  // namespace ffsing
