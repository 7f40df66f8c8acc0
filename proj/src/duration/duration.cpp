// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/duration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "detail/text_lines.hpp"
#include "ffsing/error.hpp"

namespace ffsing {

DurationTable DurationTable::parse(std::string_view text) {
  DurationTable table;
  for (const auto& [line_no, tok] : detail::tokenize_lines(text)) {
    if (tok.size() != 2) {
      throw SyntaxError(line_no, "expected '<symbol> <mean_frames>'");
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), value);
    if (ec != std::errc() || ptr != tok[1].data() + tok[1].size() || !std::isfinite(value) || value <= 0.0) {
      throw SyntaxError(line_no, "mean duration must be a positive number, got '" + tok[1] + "'");
    }
    if (table.means_.contains(tok[0])) {
      throw SyntaxError(line_no, "duplicate symbol '" + tok[0] + "'");
    }
    table.means_.emplace(tok[0], value);
  }
  return table;
}

DurationTable DurationTable::load(const std::filesystem::path& path) {
  try {
    return parse(read_text_file(path));
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.line(), path.string() + ": " + e.detail());
  }
}

double DurationTable::mean(std::string_view symbol) const {
  const auto it = means_.find(symbol);
  if (it == means_.end()) {
    throw UnknownPhoneme("duration table has no entry for '" + std::string(symbol) + "'");
  }
  return it->second;
}

void DurationTable::set(const std::string& symbol, double mean_frames) {
  if (!(mean_frames > 0.0) || !std::isfinite(mean_frames)) {
    throw ValidationError("mean duration for '" + symbol + "' must be positive");
  }
  means_[symbol] = mean_frames;
}

void DurationTable::check_covers(const PhonemeInventory& inventory) const {
  std::string missing;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    if (!means_.contains(inventory.symbol(i))) {
      missing += (missing.empty() ? "" : ", ") + inventory.symbol(i);
    }
  }
  if (!missing.empty()) {
    throw ValidationError("duration table lacks: " + missing);
  }
}

std::string DurationTable::serialize() const {
  std::string out;
  for (const auto& [symbol, value] : means_) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out += symbol + " " + std::string(buf, ptr) + "\n";
  }
  return out;
}

namespace {

struct Segment {
  std::optional<std::size_t> note_index;
  std::size_t onset = 0;
  std::size_t frames = 0;
  std::vector<std::string> onset_consonants;
  std::vector<std::string> core;  // nucleus then codas
};

Segment make_note_segment(const Note& note, std::size_t index, const PhonemeInventory& inventory) {
  Segment seg{index, note.onset_frames, note.duration_frames, {}, {}};
  if (note.is_rest()) {
    seg.core = {inventory.silence()};
    return seg;
  }
  const auto first_vowel = std::find_if(note.phonemes.begin(), note.phonemes.end(), [&](const std::string& ph) {
    return inventory.class_of(ph) == PhonemeClass::vowel;
  });
  if (first_vowel == note.phonemes.end()) {
    throw ValidationError("note " + std::to_string(index) + " has no vowel", {index}, note.line ? std::optional(note.line) : std::nullopt);
  }
  seg.onset_consonants.assign(note.phonemes.begin(), first_vowel);
  seg.core.assign(first_vowel, note.phonemes.end());
  return seg;
}

}  // namespace

std::vector<NoteGroup> shift_onset_consonants(const Score& score, const PhonemeInventory& inventory) {
  std::vector<Segment> segments;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < score.notes.size(); ++i) {
    const Note& note = score.notes[i];
    if (note.onset_frames > cursor) {
      segments.push_back({std::nullopt, cursor, note.onset_frames - cursor, {}, {inventory.silence()}});
    }
    segments.push_back(make_note_segment(note, i, inventory));
    cursor = note.end_frames();
  }
  if (score.total_frames > cursor) {
    segments.push_back({std::nullopt, cursor, score.total_frames - cursor, {}, {inventory.silence()}});
  }

  if (!segments.empty() && !segments.front().onset_consonants.empty()) {
    const std::size_t idx = segments.front().note_index.value_or(0);
    throw ValidationError("note " + std::to_string(idx) +
                              " starts at frame 0 with onset consonants; no preceding frames to hold them",
                          {idx});
  }

  std::vector<NoteGroup> groups;
  groups.reserve(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    NoteGroup g;
    g.note_index = segments[s].note_index;
    g.onset_frame = segments[s].onset;
    g.frames = segments[s].frames;
    g.phonemes = segments[s].core;
    if (s + 1 < segments.size()) {
      const auto& next = segments[s + 1].onset_consonants;
      g.phonemes.insert(g.phonemes.end(), next.begin(), next.end());
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

double round_half_away(double x) {
  return std::round(x);
}

namespace {

void check_inputs(std::size_t frames, std::span<const double> raw) {
  if (raw.empty()) {
    throw InsufficientFrames("duration adjustment needs at least one phoneme");
  }
  for (double d : raw) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw ValidationError("raw phoneme durations must be positive and finite");
    }
  }
  if (frames < raw.size()) {
    throw InsufficientFrames(std::to_string(frames) + " frames cannot hold " + std::to_string(raw.size()) +
                             " phonemes");
  }
}

// Frames left to the consonants once the vowel's share is reserved.
double consonant_budget(std::size_t frames, double vowel_share) {
  const double d_n = static_cast<double>(frames);
  return d_n - round_half_away(vowel_share * d_n);
}

}  // namespace

double consonant_scale(std::size_t frames, std::span<const double> raw, double vowel_share) {
  check_inputs(frames, raw);
  if (raw.size() == 1) {
    return 1.0;
  }
  const double consonants = std::accumulate(raw.begin() + 1, raw.end(), 0.0);
  return std::min(1.0, consonant_budget(frames, vowel_share) / consonants);
}

std::vector<std::size_t> adjust_durations(std::size_t frames, std::span<const double> raw, double vowel_share) {
  check_inputs(frames, raw);
  const std::size_t n = raw.size();
  if (n == 1) {
    return {frames};
  }
  const double consonants = std::accumulate(raw.begin() + 1, raw.end(), 0.0);
  const double budget = consonant_budget(frames, vowel_share);

  std::vector<std::size_t> out(n, 0);
  std::size_t used = 0;
  for (std::size_t i = 1; i < n; ++i) {
    // raw * budget / total (one rounding) rather than r_c * raw (two), so
    // exact halves on integer inputs round as in exact arithmetic.
    const double scaled = budget >= consonants ? raw[i] : raw[i] * budget / consonants;
    out[i] = static_cast<std::size_t>(std::max(1.0, round_half_away(scaled)));
    used += out[i];
  }

  std::ptrdiff_t vowel = static_cast<std::ptrdiff_t>(frames) - static_cast<std::ptrdiff_t>(used);
  while (vowel < 1) {
    std::size_t longest = 1;
    for (std::size_t i = 2; i < n; ++i) {
      if (out[i] >= out[longest]) {
        longest = i;
      }
    }
    --out[longest];
    ++vowel;
  }
  out[0] = static_cast<std::size_t>(vowel);
  return out;
}

std::size_t DurationPlan::total_frames() const {
  std::size_t total = 0;
  for (const PlannedGroup& g : groups) {
    total += g.frames;
  }
  return total;
}

std::size_t DurationPlan::phoneme_count() const {
  std::size_t total = 0;
  for (const PlannedGroup& g : groups) {
    total += g.phonemes.size();
  }
  return total;
}

std::vector<std::string> DurationPlan::phonemes() const {
  std::vector<std::string> out;
  out.reserve(phoneme_count());
  for (const PlannedGroup& g : groups) {
    out.insert(out.end(), g.phonemes.begin(), g.phonemes.end());
  }
  return out;
}

namespace {

std::string describe_group(const NoteGroup& g, std::size_t group_index) {
  if (g.note_index) {
    return "note " + std::to_string(*g.note_index);
  }
  return "silent gap (group " + std::to_string(group_index) + ", frames " + std::to_string(g.onset_frame) + "-" +
         std::to_string(g.onset_frame + g.frames) + ")";
}

}  // namespace

DurationPlan plan_from_table(const Score& score, const PhonemeInventory& inventory, const DurationTable& table,
                             double vowel_share) {
  std::vector<NoteGroup> groups = shift_onset_consonants(score, inventory);
  DurationPlan plan;
  plan.groups.reserve(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    NoteGroup& g = groups[gi];
    g.raw_durations.clear();
    for (const std::string& ph : g.phonemes) {
      g.raw_durations.push_back(table.mean(ph));
    }
    PlannedGroup pg;
    pg.note_index = g.note_index;
    pg.onset_frame = g.onset_frame;
    pg.frames = g.frames;
    pg.phonemes = g.phonemes;
    pg.raw_durations = g.raw_durations;
    try {
      pg.consonant_scale = consonant_scale(g.frames, g.raw_durations, vowel_share);
      pg.durations = adjust_durations(g.frames, g.raw_durations, vowel_share);
    } catch (const InsufficientFrames& e) {
      throw InsufficientFrames(describe_group(g, gi) + ": " + e.what(), g.note_index);
    }
    plan.groups.push_back(std::move(pg));
  }
  return plan;
}

DurationPlan plan_from_durations(const std::vector<NoteGroup>& groups,
                                 const std::vector<std::vector<std::size_t>>& durations) {
  if (groups.size() != durations.size()) {
    throw LengthMismatch("duration rows: expected " + std::to_string(groups.size()) + " groups, got " +
                         std::to_string(durations.size()));
  }
  DurationPlan plan;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const NoteGroup& g = groups[gi];
    const auto& row = durations[gi];
    if (row.size() != g.phonemes.size()) {
      throw LengthMismatch(describe_group(g, gi) + ": expected " + std::to_string(g.phonemes.size()) +
                           " durations, got " + std::to_string(row.size()));
    }
    if (std::accumulate(row.begin(), row.end(), std::size_t{0}) != g.frames ||
        std::any_of(row.begin(), row.end(), [](std::size_t d) { return d == 0; })) {
      throw LengthMismatch(describe_group(g, gi) + ": durations must be >= 1 and sum to " +
                           std::to_string(g.frames));
    }
    PlannedGroup pg;
    pg.note_index = g.note_index;
    pg.onset_frame = g.onset_frame;
    pg.frames = g.frames;
    pg.phonemes = g.phonemes;
    pg.durations = row;
    plan.groups.push_back(std::move(pg));
  }
  return plan;
}

std::vector<std::vector<std::size_t>> parse_duration_sidecar(std::string_view text) {
  std::vector<std::vector<std::size_t>> rows;
  for (const auto& [line_no, tok] : detail::tokenize_lines(text)) {
    std::vector<std::size_t> row;
    for (const std::string& t : tok) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw SyntaxError(line_no, "expected integer frame count, got '" + t + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string serialize_duration_sidecar(const DurationPlan& plan) {
  std::string out;
  for (const PlannedGroup& g : plan.groups) {
    for (std::size_t i = 0; i < g.durations.size(); ++i) {
      out += (i > 0 ? " " : "") + std::to_string(g.durations[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace ffsing
