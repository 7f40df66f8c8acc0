// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ffsing/encoder.hpp"
#include "ffsing/error.hpp"
#include "ffsing/numerics/grad_check.hpp"
#include "ffsing/numerics/ops.hpp"

using namespace ffsing;

namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.embed_dim = 12;
  c.channels = 6;
  c.num_blocks = 2;
  return c;
}

}  // namespace

TEST(Encoder, OneRowPerPhoneme) {
  const EncoderConfig cfg = small_config();
  num::Rng rng(1, num::Stream::init);
  const EncoderParams p = EncoderParams::init(cfg, 5, rng);
  const std::vector<std::size_t> ids = {4, 0, 1, 1, 3, 2, 4};
  num::Rng drop(1, num::Stream::dropout);
  const num::Tensor y = encode(ids, cfg, p, num::Mode::eval, drop);
  EXPECT_EQ(y.shape(), (num::Shape{7, 6}));
  EXPECT_EQ(p.embedding.shape(), (num::Shape{5, 12}));
  num::NamedTensors named;
  p.collect("encoder", named);
  EXPECT_EQ(named.front().first, "encoder.embedding");
}

TEST(Encoder, EvalIsDeterministicTrainUsesDropout) {
  const EncoderConfig cfg = small_config();
  num::Rng rng(2, num::Stream::init);
  const EncoderParams p = EncoderParams::init(cfg, 5, rng);
  const std::vector<std::size_t> ids = {0, 1, 2, 3, 4};
  num::Rng a(1, num::Stream::dropout);
  num::Rng b(2, num::Stream::dropout);
  const auto e1 = encode(ids, cfg, p, num::Mode::eval, a);
  const auto e2 = encode(ids, cfg, p, num::Mode::eval, b);
  EXPECT_TRUE(std::equal(e1.values().begin(), e1.values().end(), e2.values().begin()));
  const auto t1 = encode(ids, cfg, p, num::Mode::train, a);
  EXPECT_FALSE(std::equal(e1.values().begin(), e1.values().end(), t1.values().begin()));
}

TEST(Encoder, ResolvesSymbols) {
  const auto inv = PhonemeInventory::parse("a vowel\nt consonant\nsil silence\n");
  const EncoderConfig cfg = small_config();
  num::Rng rng(3, num::Stream::init);
  const EncoderParams p = EncoderParams::init(cfg, inv.size(), rng);
  num::Rng drop(0);
  EXPECT_EQ(encode(std::vector<std::string>{"sil", "t", "a"}, inv, cfg, p, num::Mode::eval, drop).rows(), 3u);
  EXPECT_THROW(encode(std::vector<std::string>{"x"}, inv, cfg, p, num::Mode::eval, drop), UnknownPhoneme);
}

TEST(Encoder, GluBlockGradient) {
  num::Rng rng(4, num::Stream::init);
  num::GluConv conv = num::GluConv::init(3, 5, 4, 0.0, rng);
  num::Tensor x = num::normal_parameter({6, 5}, 1.0, rng);
  num::Tensor probe = num::normal_parameter({6, 4}, 1.0, rng);
  std::vector<num::Tensor> params = {x, conv.weight, conv.bias};
  num::Rng drop(0);
  const auto f = [&] {
    return num::sum(num::mul(glu_block(x, conv, 0.0, num::Mode::eval, drop), probe));
  };
  EXPECT_LT(num::grad_check(f, params).max_relative_error, 1e-6);
}

TEST(Encoder, ConfigValidation) {
  EncoderConfig c = small_config();
  c.kernel = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}
