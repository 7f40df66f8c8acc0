// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/corpus.hpp"

#include <cmath>
#include <cstdio>

#include "ffsing/error.hpp"
#include "ffsing/numerics/rng.hpp"

namespace ffsing {

void CorpusConfig::validate() const {
  if (min_notes < 1 || min_notes > max_notes) {
    throw ConfigError("corpus: need 1 <= min_notes <= max_notes");
  }
  if (min_note_frames < 1 || min_note_frames > max_note_frames) {
    throw ConfigError("corpus: need 1 <= min_note_frames <= max_note_frames");
  }
  if (min_edge_silence < 1 || min_edge_silence > max_edge_silence) {
    throw ConfigError("corpus: need 1 <= min_edge_silence <= max_edge_silence");
  }
  // Every group must hold at least one frame per phoneme.
  const std::size_t longest_group = 2 + max_coda_consonants + max_onset_consonants;
  if (min_note_frames < longest_group || min_edge_silence < 1 + max_onset_consonants) {
    throw ConfigError("corpus: notes or edge silences too short for the allowed consonant clusters");
  }
  if (rest_probability < 0.0 || rest_probability >= 1.0) {
    throw ConfigError("corpus: rest_probability must lie in [0, 1)");
  }
  if (min_pitch < 0 || max_pitch > 127 || min_pitch > max_pitch) {
    throw ConfigError("corpus: pitch range must lie within MIDI 0-127");
  }
  f0.validate();
  if (f0_jitter < 0.0 || duration_jitter < 0.0 || feature_dim < 1 || smoothing < 1) {
    throw ConfigError("corpus: jitters must be >= 0, feature_dim and smoothing >= 1");
  }
}

std::vector<std::vector<double>> phoneme_templates(std::uint64_t seed, const PhonemeInventory& inventory,
                                                   std::size_t feature_dim) {
  num::Rng rng(seed, num::Stream::templates);
  std::vector<std::vector<double>> out(inventory.size(), std::vector<double>(feature_dim));
  for (auto& row : out) {
    for (double& v : row) {
      v = rng.uniform(-1.0, 1.0);
    }
  }
  return out;
}

namespace {

double midi_to_hz(int pitch) { return 440.0 * std::exp2((pitch - 69) / 12.0); }

std::size_t draw(num::Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

template <typename T>
const T& pick(const std::vector<T>& from, num::Rng& rng) {
  return from[rng.below(from.size())];
}

std::vector<std::string> syllable(const std::vector<std::string>& vowels, const std::vector<std::string>& consonants,
                                  const CorpusConfig& c, num::Rng& rng) {
  std::vector<std::string> out;
  const std::size_t onset = consonants.empty() ? 0 : rng.below(c.max_onset_consonants + 1);
  const std::size_t coda = consonants.empty() ? 0 : rng.below(c.max_coda_consonants + 1);
  for (std::size_t i = 0; i < onset; ++i) {
    out.push_back(pick(consonants, rng));
  }
  out.push_back(pick(vowels, rng));
  for (std::size_t i = 0; i < coda; ++i) {
    out.push_back(pick(consonants, rng));
  }
  return out;
}

Score random_score(const PhonemeInventory& inv, const std::vector<std::string>& vowels,
                   const std::vector<std::string>& consonants, const CorpusConfig& c, num::Rng& rng) {
  Score score;
  score.inventory_ref = "inventory.txt";
  const std::size_t n_notes = draw(rng, c.min_notes, c.max_notes);
  std::size_t frame = draw(rng, c.min_edge_silence, c.max_edge_silence);
  for (std::size_t i = 0; i < n_notes; ++i) {
    Note note;
    note.onset_frames = frame;
    note.duration_frames = draw(rng, c.min_note_frames, c.max_note_frames);
    const bool inner = i > 0 && i + 1 < n_notes;
    if (inner && rng.uniform() < c.rest_probability) {
      note.phonemes = {inv.silence()};
    } else {
      note.pitch = static_cast<int>(rng.between(c.min_pitch, c.max_pitch));
      note.phonemes = syllable(vowels, consonants, c, rng);
    }
    frame = note.end_frames();
    score.notes.push_back(std::move(note));
  }
  score.total_frames = frame + draw(rng, c.min_edge_silence, c.max_edge_silence);
  return score;
}

DurationPlan true_timing(const Score& score, const PhonemeInventory& inv, const DurationTable& table,
                         const CorpusConfig& c, num::Rng& rng) {
  const std::vector<NoteGroup> groups = shift_onset_consonants(score, inv);
  std::vector<std::vector<std::size_t>> rows;
  for (const NoteGroup& g : groups) {
    std::vector<double> raw;
    for (const std::string& ph : g.phonemes) {
      raw.push_back(table.mean(ph) * std::exp(c.duration_jitter * rng.normal()));
    }
    rows.push_back(adjust_durations(g.frames, raw));
  }
  return plan_from_durations(groups, rows);
}

F0Track random_f0(const Score& score, const CorpusConfig& c, num::Rng& rng) {
  F0Track f0;
  f0.hz.assign(score.total_frames, 0.0);
  for (const Note& n : score.notes) {
    if (n.is_rest()) {
      continue;
    }
    const double base = midi_to_hz(*n.pitch);
    for (std::size_t t = n.onset_frames; t < n.end_frames(); ++t) {
      f0.hz[t] = base * std::exp(c.f0_jitter * rng.uniform(-1.0, 1.0));
    }
  }
  return f0;
}

num::Tensor render_target(const DurationPlan& plan, const F0Track& f0, const PhonemeInventory& inv,
                          const std::vector<std::vector<double>>& templates, const CorpusConfig& c) {
  const std::vector<std::string> phonemes = plan.phonemes();
  const std::vector<std::size_t> states = expand_states(plan);
  const std::size_t frames = states.size();
  const std::size_t dim = c.feature_dim;
  const double lo = std::log(c.f0.f_min);
  const double span = std::log(c.f0.f_max) - lo;
  std::vector<double> raw(frames * dim);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto& tpl = templates[inv.id(phonemes[states[t]])];
    const double pitch = f0.hz[t] > 0.0 ? c.f0_weight * (std::log(f0.hz[t]) - lo) / span : 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      raw[t * dim + k] = tpl[k] + pitch;
    }
  }
  const std::size_t half = c.smoothing / 2;
  std::vector<double> smooth(frames * dim, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t a = t >= half ? t - half : 0;
    const std::size_t b = std::min(frames, t + (c.smoothing - half));
    for (std::size_t u = a; u < b; ++u) {
      for (std::size_t k = 0; k < dim; ++k) {
        smooth[t * dim + k] += raw[u * dim + k];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(b - a);
    for (std::size_t k = 0; k < dim; ++k) {
      smooth[t * dim + k] *= inv_n;
    }
  }
  return num::Tensor({frames, dim}, std::move(smooth));
}

}  // namespace

SyntheticCorpus generate_corpus(std::uint64_t seed, std::size_t num_phrases, const PhonemeInventory& inventory,
                                const DurationTable& table, const CorpusConfig& config) {
  config.validate();
  table.check_covers(inventory);
  std::vector<std::string> vowels;
  std::vector<std::string> consonants;
  for (std::size_t id = 0; id < inventory.size(); ++id) {
    const PhonemeClass cls = inventory.class_of(id);
    if (cls == PhonemeClass::vowel) {
      vowels.push_back(inventory.symbol(id));
    } else if (cls == PhonemeClass::consonant) {
      consonants.push_back(inventory.symbol(id));
    }
  }
  if (vowels.size() < 3 || consonants.size() < 5) {
    throw ValidationError("corpus: inventory needs at least 3 vowels and 5 consonants");
  }
  const auto templates = phoneme_templates(seed, inventory, config.feature_dim);
  num::Rng rng(seed, num::Stream::corpus);
  SyntheticCorpus corpus;
  corpus.seed = seed;
  for (std::size_t i = 0; i < num_phrases; ++i) {
    Phrase p;
    char name[32];
    std::snprintf(name, sizeof(name), "phrase_%03zu", i);
    p.name = name;
    p.score = random_score(inventory, vowels, consonants, config, rng);
    DurationPlan plan = true_timing(p.score, inventory, table, config, rng);
    p.f0 = random_f0(p.score, config, rng);
    p.target = render_target(plan, p.f0, inventory, templates, config);
    p.ground_truth = std::move(plan);
    corpus.phrases.push_back(std::move(p));
  }
  return corpus;
}

}  // namespace ffsing
