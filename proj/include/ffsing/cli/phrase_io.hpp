// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "ffsing/training/corpus.hpp"

namespace ffsing {

// One line of a phrase list: `<score> <f0> <features> [<durations>]`, paths
// relative to the list file; `#` comments.
struct PhraseEntry {
  std::filesystem::path score;
  std::filesystem::path f0;
  std::filesystem::path features;
  std::filesystem::path durations;  // empty when absent
};

std::vector<PhraseEntry> parse_phrase_list(std::string_view text, const std::filesystem::path& base_dir);

// Loads every listed phrase. Scores must use an inventory identical to
// `inventory`; F0 and feature lengths must equal the score's total frames.
std::vector<Phrase> load_phrases(const std::filesystem::path& list_path, const PhonemeInventory& inventory);

// Writes inventory.txt, per-phrase score/F0/feature/duration files, and the
// lists train.txt (first `num_train` phrases) and val.txt (the rest).
void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus,
                  const PhonemeInventory& inventory, std::size_t num_train);

}  // namespace ffsing
