// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ffsing/duration.hpp"
#include "ffsing/numerics/tensor.hpp"

namespace ffsing {

// Per-frame F0 in Hz; 0 marks an unvoiced frame.
struct F0Track {
  std::vector<double> hz;
};

struct F0CoderConfig {
  double f_min = 80.0;
  double f_max = 800.0;
  std::size_t dims = 4;

  void validate() const;  // ConfigError
};

// Per-frame conditioning for one phrase.
struct FrameConditioning {
  std::vector<std::size_t> state_index;  // row of the encoder output per frame
  num::Tensor f0_code;                   // T x K_f0, entries in [0, 1]
  num::Tensor pos_code;                  // T x K_pos, entries in [0, 1]

  std::size_t frames() const noexcept { return state_index.size(); }
};

// Repeats state i for durations[i] frames, states numbered across the whole
// plan in order.
std::vector<std::size_t> expand_states(const DurationPlan& plan);

// Inverse of expand_states: (state, run length) pairs.
std::vector<std::pair<std::size_t, std::size_t>> run_length_encode(std::span<const std::size_t> states);

// Triangular coarse coding of log F0. Centres sit equally spaced in log
// frequency from f_min to f_max; each triangle reaches zero at its
// neighbours' centres. log F0 is clipped to the range; 0 Hz gives zeros.
std::vector<double> code_f0(double hz, const F0CoderConfig& config);

// Cyclical position: v_k = cos(2 pi p - 2 pi (k-1)/K) / 2 + 1/2 with
// p = t_local / t_note.
std::vector<double> code_position(std::size_t t_local, std::size_t t_note, std::size_t dims);

// Assembles state indices and both codes frame by frame. Position is measured
// within each duration group. Throws LengthMismatch when the F0 track and
// the plan disagree on length.
FrameConditioning build_conditioning(const DurationPlan& plan, const F0Track& f0,
                                     const F0CoderConfig& config, std::size_t pos_dims);

// Mean of each run of r rows, the last row repeated to pad T up to a multiple
// of r. Returns ceil(T / r) rows.
num::Tensor group_frames(const num::Tensor& frames, std::size_t r);

}  // namespace ffsing
