// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "ffsing/error.hpp"
#include "ffsing/score.hpp"
#include "detail/text_lines.hpp"

namespace ffsing {

std::string_view to_string(PhonemeClass cls) {
  switch (cls) {
    case PhonemeClass::vowel:
      return "vowel";
    case PhonemeClass::consonant:
      return "consonant";
    case PhonemeClass::silence:
      return "silence";
  }
  return "?";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PhonemeInventory PhonemeInventory::parse(std::string_view text) {
  PhonemeInventory inv;
  std::optional<std::size_t> silence;
  for (const auto& [line_no, tokens] : detail::tokenize_lines(text)) {
    if (tokens.size() != 2) {
      throw SyntaxError(line_no, "expected '<symbol> <vowel|consonant|silence>'");
    }
    PhonemeClass cls;
    if (tokens[1] == "vowel") {
      cls = PhonemeClass::vowel;
    } else if (tokens[1] == "consonant") {
      cls = PhonemeClass::consonant;
    } else if (tokens[1] == "silence") {
      cls = PhonemeClass::silence;
    } else {
      throw SyntaxError(line_no, "unknown phoneme class '" + tokens[1] + "'");
    }
    if (tokens[0].find('+') != std::string::npos) {
      throw SyntaxError(line_no, "phoneme symbol may not contain '+'");
    }
    if (inv.index_.contains(tokens[0])) {
      throw SyntaxError(line_no, "duplicate phoneme symbol '" + tokens[0] + "'");
    }
    if (cls == PhonemeClass::silence) {
      if (silence) {
        throw SyntaxError(line_no, "second silence symbol '" + tokens[0] + "'");
      }
      silence = inv.symbols_.size();
    }
    inv.index_.emplace(tokens[0], inv.symbols_.size());
    inv.symbols_.push_back(tokens[0]);
    inv.classes_.push_back(cls);
  }
  if (!silence) {
    throw ValidationError("inventory declares no silence symbol");
  }
  inv.silence_id_ = *silence;
  return inv;
}

PhonemeInventory PhonemeInventory::load(const std::filesystem::path& path) {
  try {
    return parse(read_text_file(path));
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.line(), path.string() + ": " + e.detail());
  }
}

bool PhonemeInventory::contains(std::string_view symbol) const {
  return index_.contains(std::string(symbol));
}

std::size_t PhonemeInventory::id(std::string_view symbol) const {
  const auto it = index_.find(std::string(symbol));
  if (it == index_.end()) {
    throw UnknownPhoneme("unknown phoneme '" + std::string(symbol) + "'");
  }
  return it->second;
}

PhonemeClass PhonemeInventory::class_of(std::string_view symbol) const {
  return classes_[id(symbol)];
}

std::string PhonemeInventory::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    out += symbols_[i];
    out += ' ';
    out += to_string(classes_[i]);
    out += '\n';
  }
  return out;
}

}  // namespace ffsing
