// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ffsing/error.hpp"
#include "ffsing/training/checkpoint.hpp"
#include "ffsing/training/corpus.hpp"
#include "ffsing/training/model.hpp"
#include "ffsing/training/optim.hpp"

namespace ffsing {

struct TrainOptions {
  std::size_t updates = 2000;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  double base_lr = 1e-3;
  std::int64_t warmup = 4000;
  AdamConfig adam;
  double polyak_decay = 0.995;
  // Validation cadence in updates (0 disables periodic validation; the final
  // update is always validated when a validation set exists).
  std::size_t val_every = 100;

  void validate() const;  // ConfigError
};

struct Example {
  std::string name;
  PhraseInput input;
  num::Tensor target;
};

// Aligns each phrase with the chosen duration source and builds its model
// input. Ground truth requires every phrase to carry a true plan.
std::vector<Example> prepare_examples(const std::vector<Phrase>& phrases, const PhonemeInventory& inventory,
                                      const DurationTable& table, const ModelConfig& config,
                                      DurationSource durations);

struct TrainRecord {
  std::size_t step = 0;
  double lr = 0.0;
  double train_l1 = 0.0;
  std::optional<double> val_l1;
};

std::string format_log_csv(const std::vector<TrainRecord>& log);

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<TrainRecord> log;
  // Eval-mode L1 over the training set with the final raw parameters.
  double final_train_l1 = 0.0;
};

// Raised when a batch loss is not finite; carries the last checkpoint whose
// loss was finite.
class NonFiniteLoss : public NumericError {
 public:
  NonFiniteLoss(const std::string& what, std::shared_ptr<const ModelCheckpoint> last_good)
      : NumericError(what), last_good_(std::move(last_good)) {}

  const std::shared_ptr<const ModelCheckpoint>& last_good() const noexcept { return last_good_; }

 private:
  std::shared_ptr<const ModelCheckpoint> last_good_;
};

// Mini-batch training with L1 loss, Adam under the warm-up schedule and
// Polyak averaging. Batches are drawn from per-epoch shuffles; the batch loss
// weights every true frame equally. Validation uses the Polyak weights.
TrainResult train(const std::vector<Example>& train_set, const std::vector<Example>& val_set,
                  const ModelConfig& config, const TrainOptions& options, const PhonemeInventory& inventory,
                  const DurationTable& table, DurationSource durations,
                  const std::function<void(const TrainRecord&)>& on_record = {});

// Frame-weighted mean L1 over the set, eval mode.
double evaluate_l1(const AcousticModel& model, const std::vector<Example>& examples);
std::vector<double> per_example_l1(const AcousticModel& model, const std::vector<Example>& examples);

}  // namespace ffsing
