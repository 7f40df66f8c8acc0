// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ffsing/numerics/ops.hpp"
#include "ffsing/numerics/rng.hpp"
#include "ffsing/numerics/tensor.hpp"

namespace ffsing::num {

using NamedTensor = std::pair<std::string, Tensor>;
using NamedTensors = std::vector<NamedTensor>;

// Zero-mean normal initialisation with the given variance.
Tensor normal_parameter(Shape shape, double variance, Rng& rng);

// Affine map y = x W + b with W[in x out].
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear init(std::size_t in, std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const { return add_bias(matmul(x, weight), bias); }
  void collect(const std::string& prefix, NamedTensors& out) const;
};

// Same-padded convolution producing 2C' channels that feed a gated linear
// unit: the first C' channels are the value, the last C' the gate.
struct GluConv {
  Tensor weight;  // k x C x 2C'
  Tensor bias;    // 2C'

  // Variance 4 (1 - dropout) / fan_in, fan_in = k * C.
  static GluConv init(std::size_t kernel, std::size_t in, std::size_t out, double dropout, Rng& rng);
  void collect(const std::string& prefix, NamedTensors& out) const;
};

// A * sigmoid(B) for x = [A | B] split along columns.
Tensor glu(const Tensor& x);

}  // namespace ffsing::num
