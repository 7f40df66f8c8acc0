// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ffsing/error.hpp"
#include "ffsing/numerics/rng.hpp"

namespace ffsing::num {

namespace {

double evaluate(const std::function<Tensor()>& f) {
  NoGradGuard guard;
  const double v = f().item();
  if (!std::isfinite(v)) {
    throw NonFiniteValue("grad_check: objective evaluated to a non-finite value");
  }
  return v;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& f, std::span<Tensor> params,
                           const GradCheckOptions& options) {
  for (Tensor& p : params) {
    p.zero_grad();
  }
  const Tensor root = f();
  if (!std::isfinite(root.item())) {
    throw NonFiniteValue("grad_check: objective evaluated to a non-finite value");
  }
  root.backward();

  Rng rng(options.seed, Stream::grad_check);
  GradCheckResult result;
  for (Tensor& p : params) {
    std::vector<double> analytic(p.grad().begin(), p.grad().end());
    if (analytic.size() != p.size()) {
      analytic.assign(p.size(), 0.0);
    }
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.fraction < 1.0) {
      const std::size_t want = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(options.fraction * static_cast<double>(p.size()))));
      // Partial Fisher-Yates: first `want` entries become a uniform sample.
      for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(coords.size() - i));
        std::swap(coords[i], coords[j]);
      }
      coords.resize(want);
    }
    auto values = p.mutable_values();
    for (std::size_t i : coords) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const double plus = evaluate(f);
      values[i] = saved - options.step;
      const double minus = evaluate(f);
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), options.floor});
      result.max_relative_error =
          std::max(result.max_relative_error, std::abs(analytic[i] - numeric) / denom);
      ++result.coordinates;
    }
  }
  return result;
}

}  // namespace ffsing::num
