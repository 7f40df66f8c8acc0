// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ffsing/training/trainer.hpp"

namespace ffsing {

// full: the proposed system (self-attention, table durations).
// no_self_attention: convolutional sub-layers only.
// gt_durations: trained and evaluated on true phoneme timing.
// avg_durations: table durations; same recipe as full.
enum class Variant { full, no_self_attention, gt_durations, avg_durations };

inline constexpr Variant kAllVariants[] = {Variant::full, Variant::no_self_attention, Variant::gt_durations,
                                           Variant::avg_durations};

std::string_view to_string(Variant v);

struct VariantSetup {
  ModelConfig config;
  DurationSource durations;
};

VariantSetup variant_setup(Variant v, const ModelConfig& base);

struct AblationRow {
  Variant variant;
  double val_l1 = 0.0;
  double train_l1 = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;

  const AblationRow& row(Variant v) const;
  // `variant,val_l1,train_l1` with one row per variant.
  std::string to_csv() const;
  // Whether gt_durations <= avg_durations <= no_self_attention held.
  bool ordering_holds() const;
};

// Evaluates each variant's checkpoint (Polyak weights, its own duration
// source) on the training and validation phrases. MissingVariant when a
// variant has no checkpoint.
AblationReport ablation_report(const std::map<Variant, ModelCheckpoint>& checkpoints,
                               const std::vector<Phrase>& train_phrases, const std::vector<Phrase>& val_phrases);

// Trains the four variants with identical options and reports them.
AblationReport run_ablation(const std::vector<Phrase>& train_phrases, const std::vector<Phrase>& val_phrases,
                            const ModelConfig& base, const TrainOptions& options,
                            const PhonemeInventory& inventory, const DurationTable& table);

}  // namespace ffsing
