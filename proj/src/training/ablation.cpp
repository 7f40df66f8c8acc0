// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/ablation.hpp"

#include <cstdio>

namespace ffsing {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full:
      return "full";
    case Variant::no_self_attention:
      return "no_self_attention";
    case Variant::gt_durations:
      return "gt_durations";
    case Variant::avg_durations:
      return "avg_durations";
  }
  return "unknown";
}

VariantSetup variant_setup(Variant v, const ModelConfig& base) {
  VariantSetup setup{base, DurationSource::average};
  setup.config.decoder.use_attention = v != Variant::no_self_attention;
  if (v == Variant::gt_durations) {
    setup.durations = DurationSource::ground_truth;
  }
  return setup;
}

const AblationRow& AblationReport::row(Variant v) const {
  for (const AblationRow& r : rows) {
    if (r.variant == v) {
      return r;
    }
  }
  throw MissingVariant("ablation report lacks variant '" + std::string(to_string(v)) + "'");
}

std::string AblationReport::to_csv() const {
  std::string out = "variant,val_l1,train_l1\n";
  char buf[160];
  for (const AblationRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g\n", std::string(to_string(r.variant)).c_str(), r.val_l1,
                  r.train_l1);
    out += buf;
  }
  return out;
}

bool AblationReport::ordering_holds() const {
  const double gt = row(Variant::gt_durations).val_l1;
  const double avg = row(Variant::avg_durations).val_l1;
  const double conv = row(Variant::no_self_attention).val_l1;
  return gt <= avg && avg <= conv;
}

AblationReport ablation_report(const std::map<Variant, ModelCheckpoint>& checkpoints,
                               const std::vector<Phrase>& train_phrases, const std::vector<Phrase>& val_phrases) {
  AblationReport report;
  for (Variant v : kAllVariants) {
    const auto it = checkpoints.find(v);
    if (it == checkpoints.end()) {
      throw MissingVariant("no checkpoint for variant '" + std::string(to_string(v)) + "'");
    }
    const ModelCheckpoint& ck = it->second;
    const PhonemeInventory inventory = ck.inventory();
    const DurationTable table = ck.duration_table();
    const AcousticModel model = ck.model(true);
    const auto train_set = prepare_examples(train_phrases, inventory, table, ck.config, ck.durations);
    const auto val_set = val_phrases.empty()
                             ? train_set
                             : prepare_examples(val_phrases, inventory, table, ck.config, ck.durations);
    report.rows.push_back({v, evaluate_l1(model, val_set), evaluate_l1(model, train_set)});
  }
  return report;
}

AblationReport run_ablation(const std::vector<Phrase>& train_phrases, const std::vector<Phrase>& val_phrases,
                            const ModelConfig& base, const TrainOptions& options,
                            const PhonemeInventory& inventory, const DurationTable& table) {
  std::map<Variant, ModelCheckpoint> checkpoints;
  for (Variant v : kAllVariants) {
    const VariantSetup setup = variant_setup(v, base);
    const auto train_set = prepare_examples(train_phrases, inventory, table, setup.config, setup.durations);
    const auto val_set = prepare_examples(val_phrases, inventory, table, setup.config, setup.durations);
    TrainResult result = train(train_set, val_set, setup.config, options, inventory, table, setup.durations);
    checkpoints.emplace(v, std::move(result.checkpoint));
  }
  return ablation_report(checkpoints, train_phrases, val_phrases);
}

}  // namespace ffsing
