// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <limits>

#include "ffsing/error.hpp"
#include "ffsing/score.hpp"
#include "detail/text_lines.hpp"

namespace ffsing {

namespace {

std::size_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw SyntaxError(line, std::string("expected non-negative integer ") + what + ", got '" + tok + "'");
  }
  return value;
}

std::vector<std::string> split_phonemes(const std::string& tok, std::size_t line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t plus = tok.find('+', pos);
    std::string part = tok.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    if (part.empty()) {
      throw SyntaxError(line, "empty phoneme in '" + tok + "'");
    }
    out.push_back(std::move(part));
    if (plus == std::string::npos) {
      return out;
    }
    pos = plus + 1;
  }
}

}  // namespace

Score parse_score(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  Score score;
  bool have_version = false;
  bool have_inventory = false;
  std::optional<std::size_t> total;
  std::size_t total_line = 0;

  for (const auto& [line_no, tok] : lines) {
    const std::string& key = tok[0];
    if (!have_version) {
      if (key != "version" || tok.size() != 2) {
        throw SyntaxError(line_no, "expected header 'version 1'");
      }
      if (tok[1] != "1") {
        throw SyntaxError(line_no, "unsupported score version '" + tok[1] + "'");
      }
      have_version = true;
      continue;
    }
    if (key == "inventory") {
      if (tok.size() != 2 || have_inventory || !score.notes.empty()) {
        throw SyntaxError(line_no, "expected a single 'inventory <path>' before the notes");
      }
      score.inventory_ref = tok[1];
      have_inventory = true;
    } else if (key == "note") {
      if (!have_inventory) {
        throw SyntaxError(line_no, "'inventory <path>' must precede the notes");
      }
      if (tok.size() != 5) {
        throw SyntaxError(line_no, "expected 'note <onset> <duration> <pitch|R> <phonemes>'");
      }
      Note note;
      note.line = line_no;
      note.onset_frames = parse_count(tok[1], line_no, "onset");
      note.duration_frames = parse_count(tok[2], line_no, "duration");
      if (tok[3] != "R") {
        const std::size_t pitch = parse_count(tok[3], line_no, "pitch");
        if (pitch > 127) {
          throw SyntaxError(line_no, "MIDI pitch " + tok[3] + " outside 0-127");
        }
        note.pitch = static_cast<int>(pitch);
      }
      note.phonemes = split_phonemes(tok[4], line_no);
      score.notes.push_back(std::move(note));
    } else if (key == "total") {
      if (tok.size() != 2 || total) {
        throw SyntaxError(line_no, "expected a single 'total <frames>'");
      }
      total = parse_count(tok[1], line_no, "total");
      total_line = line_no;
    } else {
      throw SyntaxError(line_no, "unknown directive '" + key + "'");
    }
  }
  if (!have_version) {
    throw SyntaxError(lines.empty() ? 1 : lines.back().first, "missing 'version 1' header");
  }
  if (!have_inventory) {
    throw SyntaxError(lines.back().first, "missing 'inventory <path>'");
  }
  if (score.notes.empty()) {
    throw ValidationError("score has no notes");
  }

  for (std::size_t i = 0; i < score.notes.size(); ++i) {
    const Note& n = score.notes[i];
    if (n.duration_frames == 0) {
      throw ValidationError("note " + std::to_string(i) + " has zero duration", {i}, n.line);
    }
    if (i > 0) {
      const Note& prev = score.notes[i - 1];
      if (n.onset_frames < prev.onset_frames) {
        throw ValidationError("note " + std::to_string(i) + " starts before note " +
                                  std::to_string(i - 1) + " (notes must be sorted)",
                              {i}, n.line);
      }
      if (n.onset_frames < prev.end_frames()) {
        throw ValidationError("note " + std::to_string(i) + " overlaps note " + std::to_string(i - 1),
                              {i - 1, i}, n.line);
      }
    }
    if (n.is_rest() && n.phonemes.size() != 1) {
      throw ValidationError("rest note " + std::to_string(i) + " must hold exactly one silence phoneme",
                            {i}, n.line);
    }
  }
  const std::size_t end = score.notes.back().end_frames();
  if (total) {
    if (*total < end) {
      throw ValidationError("total " + std::to_string(*total) + " frames ends before the last note (" +
                                std::to_string(end) + ")",
                            {score.notes.size() - 1}, total_line);
    }
    score.total_frames = *total;
  } else {
    score.total_frames = end;
  }
  return score;
}

std::string serialize_score(const Score& score) {
  std::string out = "version 1\ninventory " + score.inventory_ref + "\n";
  for (const Note& n : score.notes) {
    out += "note " + std::to_string(n.onset_frames) + " " + std::to_string(n.duration_frames) + " ";
    out += n.pitch ? std::to_string(*n.pitch) : std::string("R");
    out += " ";
    for (std::size_t i = 0; i < n.phonemes.size(); ++i) {
      out += (i > 0 ? "+" : "") + n.phonemes[i];
    }
    out += "\n";
  }
  out += "total " + std::to_string(score.total_frames) + "\n";
  return out;
}

void validate_against_inventory(const Score& score, const PhonemeInventory& inventory) {
  std::vector<std::size_t> bad;
  std::string details;
  for (std::size_t i = 0; i < score.notes.size(); ++i) {
    const Note& n = score.notes[i];
    std::string problem;
    bool has_vowel = false;
    for (const std::string& ph : n.phonemes) {
      if (!inventory.contains(ph)) {
        problem = "unknown phoneme '" + ph + "'";
        break;
      }
      const PhonemeClass cls = inventory.class_of(ph);
      has_vowel = has_vowel || cls == PhonemeClass::vowel;
      if (!n.is_rest() && cls == PhonemeClass::silence) {
        problem = "silence symbol inside a sung note";
        break;
      }
    }
    if (problem.empty()) {
      if (n.is_rest()) {
        if (n.phonemes.size() != 1 || inventory.class_of(n.phonemes[0]) != PhonemeClass::silence) {
          problem = "rest must hold exactly the silence symbol";
        }
      } else if (!has_vowel) {
        problem = "no vowel";
      }
    }
    if (!problem.empty()) {
      bad.push_back(i);
      details += (details.empty() ? "" : "; ") + std::string("note ") + std::to_string(i) +
                 (n.line ? " (line " + std::to_string(n.line) + ")" : std::string()) + ": " + problem;
    }
  }
  if (!bad.empty()) {
    throw ValidationError(details, std::move(bad));
  }
}

LoadedScore load_score(const std::filesystem::path& path) {
  Score score = parse_score(read_text_file(path));
  std::filesystem::path inv_path(score.inventory_ref);
  if (inv_path.is_relative()) {
    inv_path = path.parent_path() / inv_path;
  }
  PhonemeInventory inventory = PhonemeInventory::load(inv_path);
  validate_against_inventory(score, inventory);
  return {std::move(score), std::move(inventory)};
}

}  // namespace ffsing
