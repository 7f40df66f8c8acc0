// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffsing/conditioning.hpp"
#include "ffsing/duration.hpp"
#include "ffsing/numerics/tensor.hpp"
#include "ffsing/score.hpp"

namespace ffsing {

// One training/evaluation phrase: the score, its F0, the acoustic target and
// (when known) the true phoneme timing.
struct Phrase {
  std::string name;
  Score score;
  F0Track f0;
  num::Tensor target;  // total_frames x feature_dim
  std::optional<DurationPlan> ground_truth;
};

struct CorpusConfig {
  std::size_t min_notes = 2;
  std::size_t max_notes = 8;
  std::size_t min_note_frames = 20;
  std::size_t max_note_frames = 80;
  std::size_t min_edge_silence = 10;
  std::size_t max_edge_silence = 30;
  double rest_probability = 0.1;
  std::size_t max_onset_consonants = 2;
  std::size_t max_coda_consonants = 1;
  int min_pitch = 45;  // MIDI, A2
  int max_pitch = 74;  // MIDI, D5
  F0CoderConfig f0;
  // Relative per-frame F0 deviation, uniform in [-jitter, +jitter] in log Hz.
  double f0_jitter = 0.01;
  // Log-normal spread of true phoneme durations around the table means.
  double duration_jitter = 0.25;
  std::size_t feature_dim = 64;
  double f0_weight = 0.2;
  std::size_t smoothing = 5;

  void validate() const;  // ConfigError
};

struct SyntheticCorpus {
  std::uint64_t seed = 0;
  std::vector<Phrase> phrases;
};

// Deterministic stand-in for recorded data. Targets are
//
//   smooth_5( template[phoneme(t)] + f0_weight * normalised_log_f0(t) )
//
// with one seeded uniform[-1, 1] template per phoneme, the true timing drawn
// around the table means, and a centred moving average across frames that
// blurs phoneme boundaries. Unvoiced frames contribute no F0 term.
SyntheticCorpus generate_corpus(std::uint64_t seed, std::size_t num_phrases, const PhonemeInventory& inventory,
                                const DurationTable& table, const CorpusConfig& config = {});

// The per-phoneme templates the generator uses for `seed`.
std::vector<std::vector<double>> phoneme_templates(std::uint64_t seed, const PhonemeInventory& inventory,
                                                   std::size_t feature_dim);

}  // namespace ffsing
