// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/optim.hpp"

#include <cmath>

#include "ffsing/error.hpp"
#include "ffsing/numerics/ops.hpp"

namespace ffsing {

num::Tensor l1_loss(const num::Tensor& pred, const num::Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeMismatch("l1_loss: prediction " + num::to_string(pred.shape()) + " vs target " +
                        num::to_string(target.shape()));
  }
  return num::mean_abs_error(pred, target);
}

double noam_lr(std::int64_t step, double base_lr, std::int64_t warmup) {
  if (step < 1) {
    throw InvalidStep("learning-rate step must be >= 1, got " + std::to_string(step));
  }
  if (warmup < 1) {
    throw InvalidStep("warmup must be >= 1, got " + std::to_string(warmup));
  }
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return base_lr * std::min(s / w, std::sqrt(w / s));
}

OptimizerState OptimizerState::for_parameters(std::span<const num::Tensor> params, AdamConfig config) {
  OptimizerState state;
  state.config = config;
  for (const num::Tensor& p : params) {
    state.first_moment.emplace_back(p.size(), 0.0);
    state.second_moment.emplace_back(p.size(), 0.0);
  }
  return state;
}

void adam_step(std::span<num::Tensor> params, OptimizerState& state, double lr) {
  if (params.size() != state.first_moment.size()) {
    throw ShapeMismatch("adam_step: " + std::to_string(params.size()) + " parameters, state holds " +
                        std::to_string(state.first_moment.size()));
  }
  for (const num::Tensor& p : params) {
    for (double g : p.grad()) {
      if (!std::isfinite(g)) {
        throw NonFiniteGradient("non-finite gradient before optimizer step");
      }
    }
  }
  state.step += 1;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    num::Tensor& p = params[i];
    const auto grad = p.grad();
    if (grad.empty()) {
      continue;
    }
    auto value = p.mutable_values();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      if (g == 0.0) {
        continue;
      }
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g;
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
      value[j] -= lr * (m[j] / correct1) / (std::sqrt(v[j] / correct2) + c.eps);
    }
  }
}

PolyakShadow PolyakShadow::from_parameters(std::span<const num::Tensor> params, double decay) {
  PolyakShadow shadow;
  shadow.decay = decay;
  for (const num::Tensor& p : params) {
    shadow.values.emplace_back(p.values().begin(), p.values().end());
  }
  return shadow;
}

void polyak_update(PolyakShadow& shadow, std::span<const num::Tensor> params) {
  if (params.size() != shadow.values.size()) {
    throw ShapeMismatch("polyak_update: " + std::to_string(params.size()) + " parameters, shadow holds " +
                        std::to_string(shadow.values.size()));
  }
  const double a = shadow.decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto value = params[i].values();
    auto& s = shadow.values[i];
    for (std::size_t j = 0; j < s.size(); ++j) {
      s[j] = a * s[j] + (1.0 - a) * value[j];
    }
  }
}

}  // namespace ffsing
