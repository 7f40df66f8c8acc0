// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ffsing/numerics/tensor.hpp"

namespace ffsing {

// Mean absolute error; ShapeMismatch on differing shapes.
num::Tensor l1_loss(const num::Tensor& pred, const num::Tensor& target);

// base_lr * min(step / warmup, sqrt(warmup / step)); peaks at base_lr when
// step == warmup. InvalidStep for step < 1.
double noam_lr(std::int64_t step, double base_lr = 1e-3, std::int64_t warmup = 4000);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;

  static OptimizerState for_parameters(std::span<const num::Tensor> params, AdamConfig config = {});
};

// Bias-corrected Adam on each tensor's accumulated gradient. Elements whose
// gradient is exactly zero are skipped (moments and value untouched).
// Throws NonFiniteGradient before touching anything if a gradient is not
// finite.
void adam_step(std::span<num::Tensor> params, OptimizerState& state, double lr);

// Exponential moving average of the parameters, started from their values
// at construction.
struct PolyakShadow {
  double decay = 0.995;
  std::vector<std::vector<double>> values;

  static PolyakShadow from_parameters(std::span<const num::Tensor> params, double decay = 0.995);
};

// shadow <- decay * shadow + (1 - decay) * params.
void polyak_update(PolyakShadow& shadow, std::span<const num::Tensor> params);

}  // namespace ffsing
