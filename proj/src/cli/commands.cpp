// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>

#include "detail/binary_io.hpp"
#include "ffsing/cli/feature_file.hpp"
#include "ffsing/cli/phrase_io.hpp"
#include "ffsing/cli/run_config.hpp"
#include "ffsing/error.hpp"
#include "ffsing/training/ablation.hpp"

namespace ffsing {

namespace fs = std::filesystem;

std::string format_alignment(const DurationPlan& plan) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < plan.groups.size(); ++i) {
    const PlannedGroup& g = plan.groups[i];
    out += "# group " + std::to_string(i);
    out += g.note_index ? " note " + std::to_string(*g.note_index) : std::string(" gap");
    out += " onset=" + std::to_string(g.onset_frame) + " frames=" + std::to_string(g.frames);
    std::snprintf(buf, sizeof(buf), " r_c=%.6g", g.consonant_scale);
    out += buf;
    out += " phonemes=";
    for (std::size_t k = 0; k < g.phonemes.size(); ++k) {
      out += (k ? "+" : "") + g.phonemes[k];
    }
    if (!g.raw_durations.empty()) {
      out += " raw=";
      for (std::size_t k = 0; k < g.raw_durations.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%s%.6g", k ? "," : "", g.raw_durations[k]);
        out += buf;
      }
    }
    out += "\n";
    for (std::size_t k = 0; k < g.durations.size(); ++k) {
      out += (k ? " " : "") + std::to_string(g.durations[k]);
    }
    out += "\n";
  }
  return out;
}

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    detail::write_text_file(path, text);
  }
}

struct Data {
  PhonemeInventory inventory;
  DurationTable table;
  std::vector<Phrase> train;
  std::vector<Phrase> val;
};

SyntheticCorpus synthetic_corpus(const RunConfig& cfg, const PhonemeInventory& inv, const DurationTable& table) {
  CorpusConfig cc;
  cc.feature_dim = cfg.model.decoder.out_dim;
  cc.f0 = cfg.model.f0;
  return generate_corpus(cfg.corpus_seed, cfg.corpus_phrases + cfg.corpus_val_phrases, inv, table, cc);
}

Data load_data(const RunConfig& cfg) {
  Data d{PhonemeInventory::load(cfg.inventory), DurationTable::load(cfg.duration_table), {}, {}};
  d.table.check_covers(d.inventory);
  if (!cfg.train_phrases.empty()) {
    d.train = load_phrases(cfg.train_phrases, d.inventory);
    if (!cfg.val_phrases.empty()) {
      d.val = load_phrases(cfg.val_phrases, d.inventory);
    }
  } else {
    SyntheticCorpus corpus = synthetic_corpus(cfg, d.inventory, d.table);
    for (std::size_t i = 0; i < corpus.phrases.size(); ++i) {
      (i < cfg.corpus_phrases ? d.train : d.val).push_back(std::move(corpus.phrases[i]));
    }
  }
  if (d.train.empty()) {
    throw ValidationError("no training phrases");
  }
  return d;
}

int cmd_align(const std::string& score_path, const std::string& table_path, const std::string& out_path,
              std::ostream& out) {
  const LoadedScore loaded = load_score(score_path);
  const DurationTable table =
      DurationTable::load(table_path.empty() ? default_data_dir() / "durations.txt" : fs::path(table_path));
  const DurationPlan plan = plan_from_table(loaded.score, loaded.inventory, table);
  emit(out_path, format_alignment(plan), out);
  return kExitOk;
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed, std::ostream& out,
              std::ostream& err) {
  RunConfig cfg = RunConfig::load(config_path);
  if (seed) {
    cfg.train.seed = *seed;
  }
  const Data data = load_data(cfg);
  const auto train_set = prepare_examples(data.train, data.inventory, data.table, cfg.model, cfg.durations);
  const auto val_set = prepare_examples(data.val, data.inventory, data.table, cfg.model, cfg.durations);
  const auto progress = [&err](const TrainRecord& r) {
    if (r.val_l1) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "step %zu lr %.3g train_l1 %.5f val_l1 %.5f\n", r.step, r.lr, r.train_l1,
                    *r.val_l1);
      err << buf;
    }
  };
  try {
    const TrainResult result = train(train_set, val_set, cfg.model, cfg.train, data.inventory, data.table,
                                     cfg.durations, progress);
    result.checkpoint.save(cfg.checkpoint);
    detail::write_text_file(cfg.log.string(), format_log_csv(result.log));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "final_train_l1 %.6f\n", result.final_train_l1);
    out << buf << "checkpoint " << cfg.checkpoint.string() << "\n";
  } catch (const NonFiniteLoss& e) {
    if (e.last_good()) {
      const fs::path rescue = cfg.checkpoint.string() + ".last_good";
      e.last_good()->save(rescue);
      err << "last finite checkpoint saved to " << rescue.string() << "\n";
    }
    throw;
  }
  return kExitOk;
}

int cmd_synth(const std::string& checkpoint_path, const std::string& score_path, const std::string& f0_path,
              const std::string& out_path, const std::string& gt_durations) {
  const ModelCheckpoint ck = ModelCheckpoint::load(checkpoint_path);
  const PhonemeInventory inventory = ck.inventory();
  // The checkpoint's inventory defines the embedding rows; the score's own
  // inventory reference is not consulted.
  const Score score = parse_score(read_text_file(score_path));
  validate_against_inventory(score, inventory);
  const F0Track f0 = read_f0_file(f0_path);
  if (f0.hz.size() != score.total_frames) {
    throw LengthMismatch("F0 track has " + std::to_string(f0.hz.size()) + " frames, score covers " +
                         std::to_string(score.total_frames));
  }
  const DurationPlan plan =
      gt_durations.empty()
          ? plan_from_table(score, inventory, ck.duration_table())
          : plan_from_durations(shift_onset_consonants(score, inventory),
                                parse_duration_sidecar(read_text_file(gt_durations)));
  const AcousticModel model = ck.model(true);
  const num::Tensor features = model.infer(prepare_input(plan, f0, inventory, ck.config));
  FeatureFile::from_tensor(features).write(out_path);
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& phrases_path, const std::string& out_path,
             std::ostream& out) {
  const ModelCheckpoint ck = ModelCheckpoint::load(checkpoint_path);
  const PhonemeInventory inventory = ck.inventory();
  const std::vector<Phrase> phrases = load_phrases(phrases_path, inventory);
  if (phrases.empty()) {
    throw ValidationError(phrases_path + ": phrase list is empty");
  }
  const auto examples = prepare_examples(phrases, inventory, ck.duration_table(), ck.config, ck.durations);
  const AcousticModel model = ck.model(true);
  const std::vector<double> l1 = per_example_l1(model, examples);
  std::string csv = "phrase,l1\n";
  char buf[160];
  double total = 0.0;
  double frames = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g\n", examples[i].name.c_str(), l1[i]);
    csv += buf;
    total += l1[i] * static_cast<double>(examples[i].target.rows());
    frames += static_cast<double>(examples[i].target.rows());
  }
  std::snprintf(buf, sizeof(buf), "mean,%.9g\n", total / frames);
  csv += buf;
  emit(out_path, csv, out);
  return kExitOk;
}

int cmd_ablate(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  RunConfig cfg = RunConfig::load(config_path);
  if (seed) {
    cfg.train.seed = *seed;
  }
  const Data data = load_data(cfg);
  AblationReport report;
  try {
    report = run_ablation(data.train, data.val.empty() ? data.train : data.val, cfg.model, cfg.train,
                          data.inventory, data.table);
  } catch (const std::exception& e) {
    err << "error: ablation variant failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  const std::string csv = report.to_csv();
  detail::write_text_file(out_path.empty() ? cfg.report.string() : out_path, csv);
  out << csv;
  err << "ordering gt_durations <= avg_durations <= no_self_attention: "
      << (report.ordering_holds() ? "holds" : "does not hold") << "\n";
  return kExitOk;
}

int cmd_corpus(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
               std::ostream& out) {
  RunConfig cfg = config_path.empty() ? RunConfig::defaults(fs::current_path()) : RunConfig::load(config_path);
  if (seed) {
    cfg.corpus_seed = *seed;
  }
  const PhonemeInventory inventory = PhonemeInventory::load(cfg.inventory);
  const DurationTable table = DurationTable::load(cfg.duration_table);
  const SyntheticCorpus corpus = synthetic_corpus(cfg, inventory, table);
  write_corpus(out_dir, corpus, inventory, cfg.corpus_phrases);
  out << "wrote " << corpus.phrases.size() << " phrases to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feed-forward singing voice acoustic model"};
  app.name("ffsing");
  app.require_subcommand(1);

  std::string config, score, f0, out_path, checkpoint, gt_durations, table, phrases;
  std::optional<std::uint64_t> seed;

  CLI::App* align = app.add_subcommand("align", "Print the phoneme alignment of a score");
  align->add_option("--score", score, "Score file")->required();
  align->add_option("--table", table, "Duration table (default: bundled table)");
  align->add_option("--out", out_path, "Write the dump here instead of stdout");

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model from a run config");
  train_cmd->add_option("--config", config, "Run config")->required();
  train_cmd->add_option("--seed", seed, "Override the training seed");

  CLI::App* synth = app.add_subcommand("synth", "Predict acoustic features for a score");
  synth->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  synth->add_option("--score", score, "Score file")->required();
  synth->add_option("--f0", f0, "F0 track (feature file, dim 1, Hz)")->required();
  synth->add_option("--out", out_path, "Output feature file")->required();
  synth->add_option("--gt-durations", gt_durations, "Duration sidecar to use instead of the table");

  CLI::App* eval = app.add_subcommand("eval", "Per-phrase L1 of a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  eval->add_option("--phrases", phrases, "Phrase list")->required();
  eval->add_option("--out", out_path, "Write the CSV here instead of stdout");

  CLI::App* ablate = app.add_subcommand("ablate", "Train and compare the four ablation variants");
  ablate->add_option("--config", config, "Run config")->required();
  ablate->add_option("--seed", seed, "Override the training seed");
  ablate->add_option("--out", out_path, "Report path (default: the config's report)");

  CLI::App* corpus = app.add_subcommand("corpus", "Write a synthetic corpus to disk");
  corpus->add_option("--config", config, "Run config (corpus and model keys)");
  corpus->add_option("--seed", seed, "Override the corpus seed");
  corpus->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (align->parsed()) {
      return cmd_align(score, table, out_path, out);
    }
    if (train_cmd->parsed()) {
      return cmd_train(config, seed, out, err);
    }
    if (synth->parsed()) {
      return cmd_synth(checkpoint, score, f0, out_path, gt_durations);
    }
    if (eval->parsed()) {
      return cmd_eval(checkpoint, phrases, out_path, out);
    }
    if (ablate->parsed()) {
      return cmd_ablate(config, seed, out_path, out, err);
    }
    return cmd_corpus(config, seed, out_path, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* v = dynamic_cast<const ValidationError*>(&e); v && !v->notes().empty()) {
      err << "offending notes:";
      for (std::size_t n : v->notes()) {
        err << " " << n;
      }
      err << "\n";
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace ffsing
