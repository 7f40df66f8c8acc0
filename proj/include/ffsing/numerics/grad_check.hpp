// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "ffsing/numerics/tensor.hpp"

namespace ffsing::num {

struct GradCheckOptions {
  double step = 1e-5;
  // Fraction of coordinates probed per parameter (at least one each).
  double fraction = 1.0;
  std::uint64_t seed = 0;
  // Denominator floor of the relative error, so that coordinates whose true
  // gradient vanishes are compared in absolute terms.
  double floor = 1e-8;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
};

// Compares the reverse-mode gradient of the scalar `f` with respect to every
// tensor in `params` against central differences
//
//   (f(x + h e_i) - f(x - h e_i)) / 2h
//
// and reports the worst |analytic - numeric| / max(|analytic|, |numeric|, floor).
// `f` must rebuild its graph on each call and be deterministic (no dropout).
// Throws NonFiniteValue if any evaluation is not finite.
GradCheckResult grad_check(const std::function<Tensor()>& f, std::span<Tensor> params,
                           const GradCheckOptions& options = {});

}  // namespace ffsing::num
