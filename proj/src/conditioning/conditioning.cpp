// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ffsing/error.hpp"
#include "ffsing/numerics/ops.hpp"

namespace ffsing {

void F0CoderConfig::validate() const {
  if (!(f_min > 0.0 && f_min < f_max)) {
    throw ConfigError("F0 coder needs 0 < f_min < f_max");
  }
  if (dims < 2) {
    throw ConfigError("F0 coder needs at least two basis functions");
  }
}

std::vector<std::size_t> expand_states(const DurationPlan& plan) {
  std::vector<std::size_t> out;
  out.reserve(plan.total_frames());
  std::size_t state = 0;
  for (const PlannedGroup& g : plan.groups) {
    for (std::size_t d : g.durations) {
      out.insert(out.end(), d, state);
      ++state;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> run_length_encode(std::span<const std::size_t> states) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t s : states) {
    if (!runs.empty() && runs.back().first == s) {
      ++runs.back().second;
    } else {
      runs.emplace_back(s, 1);
    }
  }
  return runs;
}

std::vector<double> code_f0(double hz, const F0CoderConfig& config) {
  std::vector<double> out(config.dims, 0.0);
  if (!(hz > 0.0)) {
    return out;
  }
  const double lo = std::log(config.f_min);
  const double hi = std::log(config.f_max);
  const double width = (hi - lo) / static_cast<double>(config.dims - 1);
  const double x = std::clamp(std::log(hz), lo, hi);
  for (std::size_t k = 0; k < config.dims; ++k) {
    const double centre = lo + static_cast<double>(k) * width;
    out[k] = std::max(0.0, 1.0 - std::abs(x - centre) / width);
  }
  return out;
}

std::vector<double> code_position(std::size_t t_local, std::size_t t_note, std::size_t dims) {
  const double p = static_cast<double>(t_local) / static_cast<double>(t_note);
  std::vector<double> out(dims);
  for (std::size_t k = 0; k < dims; ++k) {
    const double phase = 2.0 * std::numbers::pi * (p - static_cast<double>(k) / static_cast<double>(dims));
    out[k] = 0.5 * std::cos(phase) + 0.5;
  }
  return out;
}

FrameConditioning build_conditioning(const DurationPlan& plan, const F0Track& f0, const F0CoderConfig& config,
                                     std::size_t pos_dims) {
  config.validate();
  const std::size_t frames = plan.total_frames();
  if (f0.hz.size() != frames) {
    throw LengthMismatch("F0 track has " + std::to_string(f0.hz.size()) + " frames, alignment covers " +
                         std::to_string(frames));
  }
  FrameConditioning cond;
  cond.state_index = expand_states(plan);
  std::vector<double> f0_rows;
  std::vector<double> pos_rows;
  f0_rows.reserve(frames * config.dims);
  pos_rows.reserve(frames * pos_dims);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto code = code_f0(f0.hz[t], config);
    f0_rows.insert(f0_rows.end(), code.begin(), code.end());
  }
  for (const PlannedGroup& g : plan.groups) {
    for (std::size_t t = 0; t < g.frames; ++t) {
      const auto code = code_position(t, g.frames, pos_dims);
      pos_rows.insert(pos_rows.end(), code.begin(), code.end());
    }
  }
  cond.f0_code = num::Tensor({frames, config.dims}, std::move(f0_rows));
  cond.pos_code = num::Tensor({frames, pos_dims}, std::move(pos_rows));
  return cond;
}

num::Tensor group_frames(const num::Tensor& frames, std::size_t r) {
  return num::pool_rows(frames, r);
}

}  // namespace ffsing
