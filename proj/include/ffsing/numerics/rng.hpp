// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace ffsing::num {

// Stream ids decouple independent consumers of one seed.
enum class Stream : std::uint64_t {
  init = 1,
  dropout = 2,
  batching = 3,
  corpus = 4,
  templates = 5,
  grad_check = 6,
};

// Counter-based generator. Draw i of (seed, stream) is
//
//   key   = splitmix64(seed ^ splitmix64(stream))
//   out_i = splitmix64(key + i * 0x9E3779B97F4A7C15),   i = 1, 2, ...
//
// where splitmix64 is the SplitMix64 output finalizer. The state is just the
// counter, so sequences are identical on every platform and any draw can be
// reproduced from (seed, stream, counter).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, Stream stream)
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller (cosine branch only, two draws each).
  double normal();
  // Uniform integer in [0, n), unbiased (rejection). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace ffsing::num
