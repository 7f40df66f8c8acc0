// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffsing/score.hpp"

namespace ffsing {

inline constexpr double kVowelShare = 0.5;

// Average phoneme durations in frames.
//
// File format: `<symbol> <mean_frames>` per line, `#` comments.
class DurationTable {
 public:
  static DurationTable parse(std::string_view text);
  static DurationTable load(const std::filesystem::path& path);

  // Throws UnknownPhoneme.
  double mean(std::string_view symbol) const;
  void set(const std::string& symbol, double mean_frames);
  // Throws ValidationError naming symbols the table lacks.
  void check_covers(const PhonemeInventory& inventory) const;
  const std::map<std::string, double, std::less<>>& means() const noexcept { return means_; }
  std::string serialize() const;

 private:
  std::map<std::string, double, std::less<>> means_;
};

// The phonemes sharing one note's time span after onset consonants moved to
// the preceding span. phonemes[0] is the nucleus (vowel, or silence for
// rests and gaps); the rest are codas followed by the next note's onset
// consonants.
struct NoteGroup {
  std::optional<std::size_t> note_index;  // nullopt for an implicit gap
  std::size_t onset_frame = 0;
  std::size_t frames = 0;  // target duration d_n
  std::vector<std::string> phonemes;
  std::vector<double> raw_durations;  // filled from a table, else empty
};

// Tiles [0, total_frames) with one group per note and per silent gap, and
// moves each note's leading consonants into the previous group. A note at
// frame 0 with onset consonants has nowhere to put them (ValidationError).
std::vector<NoteGroup> shift_onset_consonants(const Score& score, const PhonemeInventory& inventory);

// rint: round half away from zero.
double round_half_away(double x);

// Consonant scale r_c = min(1, (d_n - rint(r_v d_n)) / sum_{i>=2} d_i), 1 for
// a single phoneme. Throws InsufficientFrames when d_n < N.
double consonant_scale(std::size_t frames, std::span<const double> raw, double vowel_share = kVowelShare);

// Integer durations summing to `frames`: consonants get max(1, rint(r_c d_i)),
// the nucleus takes the remainder. If the remainder drops below one frame,
// frames are taken one at a time from the longest consonant (latest on ties).
std::vector<std::size_t> adjust_durations(std::size_t frames, std::span<const double> raw,
                                          double vowel_share = kVowelShare);

struct PlannedGroup {
  std::optional<std::size_t> note_index;
  std::size_t onset_frame = 0;
  std::size_t frames = 0;
  std::vector<std::string> phonemes;
  std::vector<double> raw_durations;  // empty for externally supplied plans
  double consonant_scale = 1.0;
  std::vector<std::size_t> durations;
};

struct DurationPlan {
  std::vector<PlannedGroup> groups;

  std::size_t total_frames() const;
  std::size_t phoneme_count() const;
  // All phonemes in plan order; one encoder state each.
  std::vector<std::string> phonemes() const;
};

// Shift, look up, adjust. Covers every frame of the score. InsufficientFrames
// names the note whose group is too short.
DurationPlan plan_from_table(const Score& score, const PhonemeInventory& inventory,
                             const DurationTable& table, double vowel_share = kVowelShare);

// Builds a plan from given per-group durations (e.g. ground truth). Each row
// must match its group's phoneme count, be >= 1 frame per phoneme, and sum to
// the group extent; otherwise LengthMismatch.
DurationPlan plan_from_durations(const std::vector<NoteGroup>& groups,
                                 const std::vector<std::vector<std::size_t>>& durations);

// Duration sidecar: one line per group holding its integer frame counts,
// `#` comments.
std::vector<std::vector<std::size_t>> parse_duration_sidecar(std::string_view text);
std::string serialize_duration_sidecar(const DurationPlan& plan);

}  // namespace ffsing
