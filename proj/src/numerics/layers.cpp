// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/numerics/layers.hpp"

#include <cmath>

#include "ffsing/error.hpp"

namespace ffsing::num {

Tensor normal_parameter(Shape shape, double variance, Rng& rng) {
  const double sd = std::sqrt(variance);
  std::vector<double> values(element_count(shape));
  for (double& v : values) {
    v = sd * rng.normal();
  }
  return Tensor(std::move(shape), std::move(values), true);
}

Linear Linear::init(std::size_t in, std::size_t out, Rng& rng) {
  return {normal_parameter({in, out}, 1.0 / static_cast<double>(in), rng),
          Tensor::zeros({out}, true)};
}

void Linear::collect(const std::string& prefix, NamedTensors& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

GluConv GluConv::init(std::size_t kernel, std::size_t in, std::size_t out, double dropout, Rng& rng) {
  const double fan_in = static_cast<double>(kernel * in);
  return {normal_parameter({kernel, in, 2 * out}, 4.0 * (1.0 - dropout) / fan_in, rng),
          Tensor::zeros({2 * out}, true)};
}

void GluConv::collect(const std::string& prefix, NamedTensors& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

Tensor glu(const Tensor& x) {
  const std::size_t c = x.cols();
  if (c % 2 != 0) {
    throw ShapeMismatch("glu: channel count must be even, got " + std::to_string(c));
  }
  return mul(slice_cols(x, 0, c / 2), sigmoid(slice_cols(x, c / 2, c)));
}

}  // namespace ffsing::num
