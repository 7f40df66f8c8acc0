// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ffsing/decoder.hpp"
#include "ffsing/numerics/grad_check.hpp"
#include "ffsing/numerics/ops.hpp"

using namespace ffsing;

namespace {

DecoderConfig small_config() {
  DecoderConfig c;
  c.d_model = 8;
  c.num_layers = 2;
  c.out_dim = 3;
  c.dropout = 0.0;
  c.sigma_init = 2.0;
  return c;
}

FrameConditioning conditioning(std::size_t frames, std::size_t states) {
  FrameConditioning c;
  for (std::size_t t = 0; t < frames; ++t) {
    c.state_index.push_back(t * states / frames);
  }
  std::vector<double> f0;
  std::vector<double> pos;
  for (std::size_t t = 0; t < frames; ++t) {
    for (double v : code_f0(150.0 + 10.0 * static_cast<double>(t), F0CoderConfig{})) {
      f0.push_back(v);
    }
    for (double v : code_position(t % 4, 4, 4)) {
      pos.push_back(v);
    }
  }
  c.f0_code = num::Tensor({frames, 4}, f0);
  c.pos_code = num::Tensor({frames, 4}, pos);
  return c;
}

}  // namespace

TEST(AttentionBias, DiagonalZeroSymmetric) {
  const num::Tensor m = attention_bias(7, 1.3);
  for (std::size_t j = 0; j < 7; ++j) {
    EXPECT_EQ(m.at(j, j), 0.0);
    for (std::size_t k = 0; k < 7; ++k) {
      EXPECT_EQ(m.at(j, k), m.at(k, j));
      const double d = static_cast<double>(j) - static_cast<double>(k);
      EXPECT_NEAR(m.at(j, k), -d * d / (2 * 1.3 * 1.3), 1e-12);
    }
  }
}

TEST(Attention, SigmaRoundTripsThroughSoftplus) {
  for (double s : {1e-3, 0.5, 2.0, 30.0}) {
    EXPECT_NEAR(std::log1p(std::exp(inverse_softplus(s))), s, 1e-9 * std::max(1.0, s));
  }
  num::Rng rng(1, num::Stream::init);
  const DecoderParams p = DecoderParams::init(small_config(), 14, rng);
  EXPECT_NEAR(p.layers[0].attention->sigma(), 2.0, 1e-12);
}

TEST(Attention, RowStochasticAndNarrowLimit) {
  DecoderConfig cfg = small_config();
  num::Rng rng(2, num::Stream::init);
  DecoderParams p = DecoderParams::init(cfg, 14, rng);
  const num::Tensor x = num::normal_parameter({8, 8}, 1.0, rng);
  num::Tensor probs;
  biased_attention(x, *p.layers[0].attention, &probs);
  for (std::size_t r = 0; r < 8; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      s += probs.at(r, c);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  p.layers[0].attention->sigma_raw.mutable_values()[0] = inverse_softplus(1e-3);
  biased_attention(x, *p.layers[0].attention, &probs);
  for (std::size_t r = 0; r < 8; ++r) {
    double off = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      off += c == r ? 0.0 : probs.at(r, c);
    }
    EXPECT_LT(off, 1e-6);
  }
}

TEST(Decoder, OutputFramesMatchConditioning) {
  DecoderConfig cfg = small_config();
  num::Rng rng(3, num::Stream::init);
  const DecoderParams p = DecoderParams::init(cfg, 6 + 8, rng);
  const num::Tensor enc = num::normal_parameter({4, 6}, 1.0, rng);
  num::Rng drop(0);
  for (std::size_t frames : {1u, 7u, 10u}) {
    const num::Tensor y = decode(enc, conditioning(frames, 4), cfg, p, num::Mode::eval, drop);
    EXPECT_EQ(y.shape(), (num::Shape{frames, 3}));
  }
  cfg.reduction = 3;
  const DecoderParams p3 = DecoderParams::init(cfg, 14, rng);
  EXPECT_EQ(decode(enc, conditioning(10, 4), cfg, p3, num::Mode::eval, drop).rows(), 10u);
}

TEST(Decoder, NoAttentionVariantHasNoAttentionParameters) {
  DecoderConfig cfg = small_config();
  cfg.use_attention = false;
  num::Rng rng(4, num::Stream::init);
  const DecoderParams p = DecoderParams::init(cfg, 14, rng);
  num::NamedTensors named;
  p.collect("decoder", named);
  for (const auto& [name, t] : named) {
    EXPECT_EQ(name.find("attention"), std::string::npos) << name;
  }
  EXPECT_FALSE(p.layers[0].attention);
}

TEST(Decoder, AttentionGradientIncludingSigma) {
  num::Rng rng(5, num::Stream::init);
  DecoderParams p = DecoderParams::init(small_config(), 14, rng);
  AttentionParams& a = *p.layers[0].attention;
  num::Tensor x = num::normal_parameter({6, 8}, 1.0, rng);
  const num::Tensor probe = num::normal_parameter({6, 8}, 1.0, rng);
  std::vector<num::Tensor> params = {x, a.query.weight, a.key.weight, a.value.weight, a.output.weight,
                                     a.query.bias, a.sigma_raw};
  const auto f = [&] { return num::sum(num::mul(biased_attention(x, a), probe)); };
  EXPECT_LT(num::grad_check(f, params).max_relative_error, 1e-6);
}

TEST(Decoder, LayerGradient) {
  const DecoderConfig cfg = small_config();
  num::Rng rng(6, num::Stream::init);
  const DecoderParams p = DecoderParams::init(cfg, 14, rng);
  const DecoderLayerParams& l = p.layers[0];
  num::Tensor x = num::normal_parameter({5, 8}, 1.0, rng);
  const num::Tensor probe = num::normal_parameter({5, 8}, 1.0, rng);
  num::NamedTensors named;
  l.collect("layer", named);
  std::vector<num::Tensor> params = {x};
  std::vector<num::Tensor> softmax_invariant;
  for (const auto& [name, t] : named) {
    // The key bias shifts every score in a row equally, so the softmax
    // cancels it and its exact gradient is zero.
    (name.ends_with("key.bias") ? softmax_invariant : params).push_back(t);
  }
  ASSERT_EQ(softmax_invariant.size(), 1u);
  num::Rng drop(0);
  const auto f = [&] { return num::sum(num::mul(decoder_layer(x, l, cfg, num::Mode::eval, drop), probe)); };
  EXPECT_LT(num::grad_check(f, params).max_relative_error, 1e-5);
  for (double g : softmax_invariant[0].grad()) {
    EXPECT_LT(std::abs(g), 1e-12);
  }
}
