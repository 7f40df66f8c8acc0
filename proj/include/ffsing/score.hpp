// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ffsing {

inline constexpr int kHopMs = 10;

enum class PhonemeClass { vowel, consonant, silence };

std::string_view to_string(PhonemeClass cls);

// Symbol table with dense ids 0..P-1 in file order and exactly one silence.
//
// File format: one `<symbol> <vowel|consonant|silence>` per line, `#` starts
// a comment.
class PhonemeInventory {
 public:
  static PhonemeInventory parse(std::string_view text);
  static PhonemeInventory load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return symbols_.size(); }
  bool contains(std::string_view symbol) const;
  // Throws UnknownPhoneme.
  std::size_t id(std::string_view symbol) const;
  PhonemeClass class_of(std::string_view symbol) const;
  PhonemeClass class_of(std::size_t id) const { return classes_.at(id); }
  const std::string& symbol(std::size_t id) const { return symbols_.at(id); }
  const std::string& silence() const { return symbols_[silence_id_]; }
  std::size_t silence_id() const noexcept { return silence_id_; }

  std::string serialize() const;

 private:
  std::vector<std::string> symbols_;
  std::vector<PhonemeClass> classes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t silence_id_ = 0;
};

struct Note {
  std::size_t onset_frames = 0;
  std::size_t duration_frames = 0;
  std::optional<int> pitch;  // MIDI note number; nullopt marks a rest
  std::vector<std::string> phonemes;
  std::size_t line = 0;  // source line, 0 when built in memory

  bool is_rest() const noexcept { return !pitch.has_value(); }
  std::size_t end_frames() const noexcept { return onset_frames + duration_frames; }
  bool operator==(const Note& other) const {
    return onset_frames == other.onset_frames && duration_frames == other.duration_frames &&
           pitch == other.pitch && phonemes == other.phonemes;
  }
};

// Notes in onset order at a fixed 10 ms hop; gaps between notes are silent.
struct Score {
  std::string inventory_ref;
  std::vector<Note> notes;
  std::size_t total_frames = 0;

  bool operator==(const Score& other) const {
    return inventory_ref == other.inventory_ref && notes == other.notes &&
           total_frames == other.total_frames;
  }
};

// Score file (UTF-8, line oriented, `#` comments):
//
//   version 1
//   inventory <path>
//   note <onset_frames> <duration_frames> <midi_pitch|R> <ph>[+<ph>...]
//   total <frames>          (optional; defaults to the end of the last note)
//
// Throws SyntaxError for malformed lines and ValidationError for ordering,
// overlap, and length violations; both carry the offending line.
Score parse_score(std::string_view text);
std::string serialize_score(const Score& score);

// Every symbol known; non-rest notes hold a vowel and no silence; rests hold
// exactly the silence symbol. The error lists every offending note index.
void validate_against_inventory(const Score& score, const PhonemeInventory& inventory);

struct LoadedScore {
  Score score;
  PhonemeInventory inventory;
};

// Reads a score file, loads its inventory (relative to the score's directory)
// and validates the pair.
LoadedScore load_score(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace ffsing
