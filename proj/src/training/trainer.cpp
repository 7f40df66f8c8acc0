// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "ffsing/numerics/ops.hpp"

namespace ffsing {

void TrainOptions::validate() const {
  if (batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (base_lr <= 0.0 || warmup < 1) {
    throw ConfigError("base_lr must be > 0 and warmup >= 1");
  }
  if (!(polyak_decay >= 0.0 && polyak_decay < 1.0)) {
    throw ConfigError("polyak_decay must lie in [0, 1)");
  }
}

std::vector<Example> prepare_examples(const std::vector<Phrase>& phrases, const PhonemeInventory& inventory,
                                      const DurationTable& table, const ModelConfig& config,
                                      DurationSource durations) {
  std::vector<Example> out;
  out.reserve(phrases.size());
  for (const Phrase& p : phrases) {
    DurationPlan plan;
    if (durations == DurationSource::ground_truth) {
      if (!p.ground_truth) {
        throw ValidationError("phrase '" + p.name + "' has no ground-truth durations");
      }
      plan = *p.ground_truth;
    } else {
      plan = plan_from_table(p.score, inventory, table);
    }
    if (p.target.rows() != plan.total_frames()) {
      throw LengthMismatch("phrase '" + p.name + "': target has " + std::to_string(p.target.rows()) +
                           " frames, score covers " + std::to_string(plan.total_frames()));
    }
    out.push_back({p.name, prepare_input(plan, p.f0, inventory, config), p.target});
  }
  return out;
}

std::string format_log_csv(const std::vector<TrainRecord>& log) {
  std::string out = "step,lr,train_l1,val_l1\n";
  char buf[128];
  for (const TrainRecord& r : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,", r.step, r.lr, r.train_l1);
    out += buf;
    if (r.val_l1) {
      std::snprintf(buf, sizeof(buf), "%.9g", *r.val_l1);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<double> per_example_l1(const AcousticModel& model, const std::vector<Example>& examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const Example& e : examples) {
    out.push_back(l1_loss(model.infer(e.input), e.target).item());
  }
  return out;
}

double evaluate_l1(const AcousticModel& model, const std::vector<Example>& examples) {
  if (examples.empty()) {
    throw ValidationError("cannot evaluate an empty set");
  }
  const std::vector<double> l1 = per_example_l1(model, examples);
  double total = 0.0;
  double frames = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double n = static_cast<double>(examples[i].target.rows());
    total += l1[i] * n;
    frames += n;
  }
  return total / frames;
}

namespace {

AcousticModel with_values(const AcousticModel& model, const std::vector<std::vector<double>>& values) {
  AcousticModel copy = AcousticModel::init(model.config, model.vocab, 0);
  const num::NamedTensors params = copy.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    num::Tensor t = params[i].second;
    std::copy(values[i].begin(), values[i].end(), t.mutable_values().begin());
  }
  return copy;
}

}  // namespace

TrainResult train(const std::vector<Example>& train_set, const std::vector<Example>& val_set,
                  const ModelConfig& config, const TrainOptions& options, const PhonemeInventory& inventory,
                  const DurationTable& table, DurationSource durations,
                  const std::function<void(const TrainRecord&)>& on_record) {
  options.validate();
  if (train_set.empty()) {
    throw ValidationError("training set is empty");
  }
  AcousticModel model = AcousticModel::init(config, inventory.size(), options.seed);
  std::vector<num::Tensor> params;
  for (auto& [name, t] : model.parameters()) {
    params.push_back(t);
  }
  OptimizerState state = OptimizerState::for_parameters(params, options.adam);
  PolyakShadow shadow = PolyakShadow::from_parameters(params, options.polyak_decay);
  num::Rng batch_rng(options.seed, num::Stream::batching);
  num::Rng dropout_rng(options.seed, num::Stream::dropout);

  std::vector<std::size_t> order(train_set.size());
  std::size_t cursor = order.size();
  const auto next_index = [&]() {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[batch_rng.below(i)]);
      }
      cursor = 0;
    }
    return order[cursor++];
  };

  TrainResult result;
  const std::size_t batch = std::min(options.batch_size, train_set.size());
  for (std::size_t step = 1; step <= options.updates; ++step) {
    std::vector<std::size_t> members;
    std::size_t frames = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      members.push_back(next_index());
      frames += train_set[members.back()].target.rows();
    }
    for (num::Tensor& p : params) {
      p.zero_grad();
    }
    double batch_loss = 0.0;
    for (std::size_t i : members) {
      const Example& e = train_set[i];
      const double weight = static_cast<double>(e.target.rows()) / static_cast<double>(frames);
      const num::Tensor loss = l1_loss(model.forward(e.input, num::Mode::train, dropout_rng), e.target);
      batch_loss += weight * loss.item();
      num::scale(loss, weight).backward();
    }
    if (!std::isfinite(batch_loss)) {
      // Parameters still hold the values of the previous update.
      auto last = std::make_shared<const ModelCheckpoint>(
          ModelCheckpoint::capture(model, shadow.values, inventory, table, durations, step - 1));
      throw NonFiniteLoss("non-finite training loss at update " + std::to_string(step), std::move(last));
    }
    const double lr = noam_lr(static_cast<std::int64_t>(step), options.base_lr, options.warmup);
    adam_step(params, state, lr);
    polyak_update(shadow, params);

    TrainRecord record{step, lr, batch_loss, std::nullopt};
    const bool periodic = options.val_every > 0 && step % options.val_every == 0;
    if (!val_set.empty() && (periodic || step == options.updates)) {
      record.val_l1 = evaluate_l1(with_values(model, shadow.values), val_set);
    }
    result.log.push_back(record);
    if (on_record) {
      on_record(record);
    }
  }
  result.checkpoint = ModelCheckpoint::capture(model, shadow.values, inventory, table, durations, options.updates);
  result.final_train_l1 = evaluate_l1(model, train_set);
  return result;
}

}  // namespace ffsing
