// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/cli/phrase_io.hpp"

#include "detail/binary_io.hpp"
#include "detail/text_lines.hpp"
#include "ffsing/cli/feature_file.hpp"
#include "ffsing/error.hpp"

namespace ffsing {

namespace fs = std::filesystem;

std::vector<PhraseEntry> parse_phrase_list(std::string_view text, const fs::path& base_dir) {
  const auto resolve = [&base_dir](const std::string& s) {
    fs::path p(s);
    return p.is_relative() ? base_dir / p : p;
  };
  std::vector<PhraseEntry> out;
  for (const auto& [line, tok] : detail::tokenize_lines(text)) {
    if (tok.size() != 3 && tok.size() != 4) {
      throw SyntaxError(line, "expected '<score> <f0> <features> [<durations>]'");
    }
    PhraseEntry e{resolve(tok[0]), resolve(tok[1]), resolve(tok[2]), {}};
    if (tok.size() == 4) {
      e.durations = resolve(tok[3]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Phrase> load_phrases(const fs::path& list_path, const PhonemeInventory& inventory) {
  std::vector<PhraseEntry> entries;
  try {
    entries = parse_phrase_list(read_text_file(list_path), list_path.parent_path());
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.line(), list_path.string() + ": " + e.detail());
  }
  std::vector<Phrase> out;
  for (const PhraseEntry& e : entries) {
    LoadedScore loaded = load_score(e.score);
    if (loaded.inventory.serialize() != inventory.serialize()) {
      throw ValidationError(e.score.string() + ": score inventory differs from the model's inventory");
    }
    Phrase p;
    p.name = e.score.stem().string();
    p.score = std::move(loaded.score);
    p.f0 = read_f0_file(e.f0);
    p.target = FeatureFile::read(e.features).to_tensor();
    const std::size_t frames = p.score.total_frames;
    if (p.f0.hz.size() != frames || p.target.rows() != frames) {
      throw LengthMismatch(e.score.string() + ": score covers " + std::to_string(frames) + " frames, F0 has " +
                           std::to_string(p.f0.hz.size()) + ", features have " +
                           std::to_string(p.target.rows()));
    }
    if (!e.durations.empty()) {
      const auto rows = parse_duration_sidecar(read_text_file(e.durations));
      p.ground_truth = plan_from_durations(shift_onset_consonants(p.score, inventory), rows);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_corpus(const fs::path& dir, const SyntheticCorpus& corpus, const PhonemeInventory& inventory,
                  std::size_t num_train) {
  fs::create_directories(dir);
  detail::write_text_file((dir / "inventory.txt").string(), inventory.serialize());
  std::string train_list;
  std::string val_list;
  for (std::size_t i = 0; i < corpus.phrases.size(); ++i) {
    const Phrase& p = corpus.phrases[i];
    const std::string score = p.name + ".score";
    const std::string f0 = p.name + ".f0";
    const std::string features = p.name + ".ffsv";
    std::string line = score + " " + f0 + " " + features;
    Score s = p.score;
    s.inventory_ref = "inventory.txt";
    detail::write_text_file((dir / score).string(), serialize_score(s));
    write_f0_file(dir / f0, p.f0);
    FeatureFile::from_tensor(p.target).write(dir / features);
    if (p.ground_truth) {
      const std::string durations = p.name + ".dur";
      detail::write_text_file((dir / durations).string(), serialize_duration_sidecar(*p.ground_truth));
      line += " " + durations;
    }
    (i < num_train ? train_list : val_list) += line + "\n";
  }
  detail::write_text_file((dir / "train.txt").string(), train_list);
  detail::write_text_file((dir / "val.txt").string(), val_list);
}

}  // namespace ffsing
