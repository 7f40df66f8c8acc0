// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ffsing/cli/commands.hpp"
#include "ffsing/cli/feature_file.hpp"
#include "ffsing/cli/phrase_io.hpp"
#include "ffsing/cli/run_config.hpp"
#include "ffsing/conditioning.hpp"
#include "ffsing/decoder.hpp"
#include "ffsing/duration.hpp"
#include "ffsing/encoder.hpp"
#include "ffsing/numerics/grad_check.hpp"
#include "ffsing/numerics/ops.hpp"
#include "ffsing/training/corpus.hpp"
#include "ffsing/training/optim.hpp"
#include "ffsing/training/trainer.hpp"

using namespace ffsing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ffsing");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

PhonemeInventory inventory() { return PhonemeInventory::load(fs::path(FFSING_DATA_DIR) / "inventory.txt"); }
DurationTable table() { return DurationTable::load(fs::path(FFSING_DATA_DIR) / "durations.txt"); }

// Adjusted durations in exact integer arithmetic, followed by the
// frame-stealing correction (latest longest consonant gives up a frame).
std::vector<std::size_t> oracle(long dn, const std::vector<long>& raw) {
  const std::size_t n = raw.size();
  if (n == 1) {
    return {static_cast<std::size_t>(dn)};
  }
  const long consonant_sum = std::accumulate(raw.begin() + 1, raw.end(), 0L);
  long num = dn - (dn + 1) / 2;
  long den = consonant_sum;
  if (num >= den) {
    num = 1;
    den = 1;
  }
  std::vector<long> d(n);
  long taken = 0;
  for (std::size_t i = 1; i < n; ++i) {
    d[i] = std::max(1L, (2 * num * raw[i] + den) / (2 * den));
    taken += d[i];
  }
  d[0] = dn - taken;
  while (d[0] < 1) {
    std::size_t pick = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (d[i] >= d[pick]) {
        pick = i;
      }
    }
    --d[pick];
    ++d[0];
  }
  return {d.begin(), d.end()};
}

Outcome durations_worked_and_exhaustive() {
  Outcome o;
  const auto start = Clock::now();
  o.require(adjust_durations(37, std::vector<double>{12}) == std::vector<std::size_t>{37}, "single vowel");
  o.require(adjust_durations(50, std::vector<double>{20, 10, 10}) == std::vector<std::size_t>{30, 10, 10},
            "unscaled consonants");
  o.require(adjust_durations(10, std::vector<double>{8, 6, 4}) == std::vector<std::size_t>{5, 3, 2},
            "halved consonants");
  o.require(adjust_durations(4, std::vector<double>{10, 8, 8, 8}) == std::vector<std::size_t>{1, 1, 1, 1},
            "frame stealing");
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<long> raw(n, 1);
    while (true) {
      for (long dn = static_cast<long>(n); dn <= 20; ++dn) {
        std::vector<double> real(raw.begin(), raw.end());
        mismatches += adjust_durations(static_cast<std::size_t>(dn), real) != oracle(dn, raw);
        ++cases;
      }
      std::size_t k = 0;
      while (k < n && raw[k] == 10) {
        raw[k++] = 1;
      }
      if (k == n) {
        break;
      }
      ++raw[k];
    }
  }
  const double elapsed = seconds_since(start);
  o.require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  o.require(elapsed < 10.0, "took " + fmt("%.1f s", elapsed));
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(cases) + " cases in " + fmt("%.2f s", elapsed);
  return o;
}

Outcome durations_partition() {
  Outcome o;
  num::Rng rng(2026);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> raw(n);
    for (double& r : raw) {
      r = rng.uniform(0.2, 40.0);
    }
    const std::size_t dn = n + rng.below(150);
    const auto d = adjust_durations(dn, raw);
    bad += std::accumulate(d.begin(), d.end(), std::size_t{0}) != dn ||
           *std::min_element(d.begin(), d.end()) < 1;
  }
  o.require(bad == 0, std::to_string(bad) + " of 1000 notes violate sum or minimum");
  if (o.pass) {
    o.detail = "1000 random notes";
  }
  return o;
}

Outcome gradients() {
  Outcome o;
  const auto start = Clock::now();
  num::Rng drop(0);
  std::ostringstream errors;

  {
    num::Rng rng(11, num::Stream::init);
    num::GluConv conv = num::GluConv::init(5, 16, 16, 0.0, rng);
    num::Tensor x = num::normal_parameter({12, 16}, 1.0, rng);
    const num::Tensor probe = num::normal_parameter({12, 16}, 1.0, rng);
    std::vector<num::Tensor> params = {x, conv.weight, conv.bias};
    const auto f = [&] { return num::sum(num::mul(glu_block(x, conv, 0.0, num::Mode::eval, drop), probe)); };
    const double e = num::grad_check(f, params).max_relative_error;
    o.require(e < 1e-4, "encoder block " + fmt("%.2e", e));
    errors << "encoder " << fmt("%.1e", e);
  }

  DecoderConfig cfg;
  cfg.d_model = 16;
  cfg.num_layers = 1;
  cfg.out_dim = 8;
  cfg.dropout = 0.0;
  cfg.sigma_init = 3.0;
  {
    num::Rng rng(12, num::Stream::init);
    const DecoderParams p = DecoderParams::init(cfg, 20, rng);
    const AttentionParams& a = *p.layers[0].attention;
    num::Tensor x = num::normal_parameter({9, 16}, 1.0, rng);
    const num::Tensor probe = num::normal_parameter({9, 16}, 1.0, rng);
    std::vector<num::Tensor> params = {x,           a.query.weight, a.query.bias,   a.key.weight,
                                       a.value.weight, a.value.bias, a.output.weight, a.output.bias,
                                       a.sigma_raw};
    const auto f = [&] { return num::sum(num::mul(biased_attention(x, a), probe)); };
    const double e = num::grad_check(f, params).max_relative_error;
    o.require(e < 1e-4, "attention " + fmt("%.2e", e));
    errors << ", attention+sigma " << fmt("%.1e", e);
  }
  {
    num::Rng rng(13, num::Stream::init);
    const DecoderParams p = DecoderParams::init(cfg, 20, rng);
    const DecoderLayerParams& l = p.layers[0];
    num::Tensor x = num::normal_parameter({9, 16}, 1.0, rng);
    const num::Tensor probe = num::normal_parameter({9, 16}, 1.0, rng);
    num::NamedTensors named;
    l.collect("layer", named);
    std::vector<num::Tensor> params = {x};
    std::vector<num::Tensor> key_bias;
    for (const auto& [name, t] : named) {
      // Shifts every score in a row equally: its exact gradient is zero.
      (name.ends_with("key.bias") ? key_bias : params).push_back(t);
    }
    const auto f = [&] { return num::sum(num::mul(decoder_layer(x, l, cfg, num::Mode::eval, drop), probe)); };
    const double e = num::grad_check(f, params).max_relative_error;
    double key_grad = 0.0;
    for (const num::Tensor& t : key_bias) {
      for (double g : t.grad()) {
        key_grad = std::max(key_grad, std::abs(g));
      }
    }
    o.require(e < 1e-4, "decoder layer " + fmt("%.2e", e));
    o.require(key_grad < 1e-12, "key bias gradient " + fmt("%.2e", key_grad));
    errors << ", decoder layer " << fmt("%.1e", e);
  }
  {
    const PhonemeInventory inv = inventory();
    const DurationTable tab = table();
    const ModelConfig config = RunConfig::defaults(".").model;
    CorpusConfig cc;
    cc.max_notes = 3;
    cc.feature_dim = config.decoder.out_dim;
    const SyntheticCorpus corpus = generate_corpus(5, 1, inv, tab, cc);
    const auto examples = prepare_examples(corpus.phrases, inv, tab, config, DurationSource::average);
    const AcousticModel model = AcousticModel::init(config, inv.size(), 3);
    std::vector<num::Tensor> params;
    std::vector<num::Tensor> key_bias;
    for (const auto& [name, t] : model.parameters()) {
      (name.ends_with("key.bias") ? key_bias : params).push_back(t);
    }
    const auto f = [&] { return l1_loss(model.forward(examples[0].input, num::Mode::eval, drop), examples[0].target); };
    num::GradCheckOptions options;
    options.fraction = 0.01;
    options.seed = 9;
    // The loss averages thousands of residuals, so its summation noise
    // (~1e-13) swamps central differences at the default step.
    options.step = 1e-4;
    const num::GradCheckResult r = num::grad_check(f, params, options);
    double key_grad = 0.0;
    for (const num::Tensor& t : key_bias) {
      for (double g : t.grad()) {
        key_grad = std::max(key_grad, std::abs(g));
      }
    }
    o.require(r.max_relative_error < 1e-4, "end-to-end " + fmt("%.2e", r.max_relative_error));
    o.require(key_grad < 1e-12, "end-to-end key bias gradient " + fmt("%.2e", key_grad));
    errors << ", end-to-end " << fmt("%.1e", r.max_relative_error) << " over " << r.coordinates << " coords";
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 120.0, "took " + fmt("%.0f s", elapsed));
  o.detail += (o.detail.empty() ? "" : "; ") + errors.str() + " in " + fmt("%.1f s", elapsed);
  return o;
}

Outcome attention_properties() {
  Outcome o;
  DecoderConfig cfg;
  cfg.d_model = 16;
  cfg.num_layers = 1;
  cfg.dropout = 0.0;
  cfg.sigma_init = 2.0;
  num::Rng rng(21, num::Stream::init);
  DecoderParams p = DecoderParams::init(cfg, 20, rng);
  AttentionParams& a = *p.layers[0].attention;
  const num::Tensor x = num::normal_parameter({8, 16}, 1.0, rng);
  num::Tensor probs;
  biased_attention(x, a, &probs);
  double row_error = 0.0;
  for (std::size_t r = 0; r < 8; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      s += probs.at(r, c);
      o.require(probs.at(r, c) >= 0.0, "negative probability");
    }
    row_error = std::max(row_error, std::abs(s - 1.0));
  }
  o.require(row_error < 1e-9, "row sum error " + fmt("%.2e", row_error));

  const num::Tensor m = attention_bias(11, 2.5);
  bool diag = true;
  bool symmetric = true;
  for (std::size_t j = 0; j < 11; ++j) {
    diag = diag && m.at(j, j) == 0.0;
    for (std::size_t k = 0; k < 11; ++k) {
      symmetric = symmetric && m.at(j, k) == m.at(k, j) && m.at(j, k) <= 0.0;
    }
  }
  o.require(diag, "bias diagonal not zero");
  o.require(symmetric, "bias not symmetric");

  a.sigma_raw.mutable_values()[0] = inverse_softplus(1e-3);
  biased_attention(x, a, &probs);
  double off = 0.0;
  for (std::size_t r = 0; r < 8; ++r) {
    double row_off = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      row_off += c == r ? 0.0 : probs.at(r, c);
    }
    off = std::max(off, row_off);
  }
  o.require(off < 1e-6, "narrow off-diagonal mass " + fmt("%.2e", off));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("row error ") + fmt("%.1e", row_error) +
              ", narrow off-diagonal " + fmt("%.1e", off);
  return o;
}

Outcome conditioning_codes() {
  Outcome o;
  const std::vector<double> want0 = {1.0, 0.5, 0.0, 0.5};
  const std::vector<double> want_half = {0.0, 0.5, 1.0, 0.5};
  const auto at0 = code_position(0, 10, 4);
  const auto half = code_position(5, 10, 4);
  double pos_error = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    pos_error = std::max({pos_error, std::abs(at0[k] - want0[k]), std::abs(half[k] - want_half[k])});
  }
  o.require(pos_error < 1e-9, "position error " + fmt("%.2e", pos_error));
  const F0CoderConfig f0;
  double unity_error = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double hz = 40.0 * std::pow(2000.0 / 40.0, i / 2000.0);
    const auto v = code_f0(hz, f0);
    unity_error = std::max(unity_error, std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0));
  }
  o.require(unity_error < 1e-9, "F0 partition error " + fmt("%.2e", unity_error));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("position ") + fmt("%.1e", pos_error) +
              ", F0 partition " + fmt("%.1e", unity_error);
  return o;
}

Outcome schedule_and_averaging() {
  Outcome o;
  double noam_error = 0.0;
  noam_error = std::max(noam_error, std::abs(noam_lr(4000) - 1e-3));
  noam_error = std::max(noam_error, std::abs(noam_lr(2000) - 5e-4));
  noam_error = std::max(noam_error, std::abs(noam_lr(16000) - 5e-4));
  noam_error = std::max(noam_error, std::abs(noam_lr(1) - 1e-3 / 4000.0));
  o.require(noam_error < 1e-12, "schedule error " + fmt("%.2e", noam_error));
  std::vector<num::Tensor> p = {num::Tensor({1}, {0.0})};
  PolyakShadow shadow = PolyakShadow::from_parameters(p);
  p[0].mutable_values()[0] = 1.0;
  double polyak_error = 0.0;
  for (int t = 1; t <= 1000; ++t) {
    polyak_update(shadow, p);
    polyak_error = std::max(polyak_error, std::abs(shadow.values[0][0] - (1.0 - std::pow(0.995, t))));
  }
  o.require(polyak_error < 1e-12, "averaging error " + fmt("%.2e", polyak_error));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("schedule ") + fmt("%.1e", noam_error) +
              ", averaging " + fmt("%.1e", polyak_error);
  return o;
}

// Shared by the overfit and reproducibility checks.
struct OverfitArtifacts {
  fs::path checkpoint;
  fs::path corpus;
  std::size_t phrases = 0;
};

Outcome overfit(const fs::path& dir, OverfitArtifacts& artifacts) {
  Outcome o;
  const auto start = Clock::now();
  std::ofstream(dir / "overfit.cfg") << "# desk defaults, all phrases used for training\n"
                                        "corpus_phrases = 16\ncorpus_val_phrases = 0\nupdates = 2000\n";
  const CliRun trained = run({"train", "--config", (dir / "overfit.cfg").string()});
  if (trained.code != 0) {
    o.require(false, "train exited " + std::to_string(trained.code) + ": " + trained.err);
    return o;
  }
  const auto pos = trained.out.find("final_train_l1 ");
  const double final_l1 = pos == std::string::npos ? 1e9 : std::stod(trained.out.substr(pos + 15));
  o.require(final_l1 < 0.05, "final train L1 " + fmt("%.4f", final_l1));

  artifacts.checkpoint = dir / "model.ffck";
  artifacts.corpus = dir / "corpus";
  const CliRun corpus = run({"corpus", "--config", (dir / "overfit.cfg").string(), "--out", artifacts.corpus.string()});
  if (corpus.code != 0) {
    o.require(false, "corpus exited " + std::to_string(corpus.code));
    return o;
  }
  const auto entries = parse_phrase_list(slurp(artifacts.corpus / "train.txt"), artifacts.corpus);
  artifacts.phrases = entries.size();
  o.require(entries.size() == 16, "expected 16 phrases");
  double worst = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const fs::path out = dir / ("synth_" + std::to_string(i) + ".ffsv");
    const CliRun s = run({"synth", "--checkpoint", artifacts.checkpoint.string(), "--score",
                          entries[i].score.string(), "--f0", entries[i].f0.string(), "--out", out.string()});
    if (s.code != 0) {
      o.require(false, "synth exited " + std::to_string(s.code) + ": " + s.err);
      return o;
    }
    const FeatureFile pred = FeatureFile::read(out);
    const FeatureFile target = FeatureFile::read(entries[i].features);
    if (pred.frames != target.frames || pred.dim != target.dim) {
      o.require(false, "synth shape differs from target");
      return o;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pred.payload.size(); ++k) {
      sum += std::abs(static_cast<double>(pred.payload[k]) - target.payload[k]);
    }
    worst = std::max(worst, sum / static_cast<double>(pred.payload.size()));
  }
  o.require(worst < 0.1, "worst per-phrase L1 " + fmt("%.4f", worst));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 900.0, "took " + fmt("%.0f s", elapsed));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("final train L1 ") + fmt("%.4f", final_l1) +
              ", worst synthesized phrase L1 " + fmt("%.4f", worst) + ", " + fmt("%.0f s", elapsed);
  return o;
}

const char* kSmallConfig =
    "embed_dim = 32\nencoder_channels = 16\nd_model = 32\nnum_layers = 1\nout_dim = 16\n"
    "corpus_phrases = 6\ncorpus_val_phrases = 3\nbatch_size = 3\nwarmup = 20\nupdates = 60\nval_every = 20\n";

Outcome ablation(const fs::path& dir) {
  Outcome o;
  std::ofstream(dir / "ablate.cfg") << kSmallConfig;
  std::string reports[2];
  std::string ordering;
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("ablation_" + std::to_string(i) + ".csv");
    const CliRun r = run({"ablate", "--config", (dir / "ablate.cfg").string(), "--out", out.string()});
    if (r.code != 0) {
      o.require(false, "ablate exited " + std::to_string(r.code) + ": " + r.err);
      return o;
    }
    reports[i] = slurp(out);
    ordering = r.err;
  }
  o.require(reports[0] == reports[1], "reports differ between runs");
  o.require(std::count(reports[0].begin(), reports[0].end(), '\n') == 5, "expected header plus four rows");
  for (const char* v : {"full", "no_self_attention", "gt_durations", "avg_durations"}) {
    o.require(reports[0].find(std::string("\n") + v + ",") != std::string::npos, std::string("missing ") + v);
  }
  while (!ordering.empty() && ordering.back() == '\n') {
    ordering.pop_back();
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("identical reports, ") + ordering;
  return o;
}

Outcome reproducibility(const fs::path& dir, const OverfitArtifacts& artifacts) {
  Outcome o;
  if (artifacts.phrases == 0) {
    o.require(false, "overfit artifacts unavailable");
    return o;
  }
  const auto entries = parse_phrase_list(slurp(artifacts.corpus / "train.txt"), artifacts.corpus);
  const std::string original = slurp(entries[0].features);
  const FeatureFile loaded = FeatureFile::read(entries[0].features);
  const auto rewritten = FeatureFile::from_tensor(loaded.to_tensor()).to_bytes();
  o.require(std::string(rewritten.begin(), rewritten.end()) == original, "feature round trip changed bytes");

  std::string synth[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("repeat_" + std::to_string(i) + ".ffsv");
    const CliRun s = run({"synth", "--checkpoint", artifacts.checkpoint.string(), "--score", entries[0].score.string(),
                          "--f0", entries[0].f0.string(), "--out", out.string()});
    o.require(s.code == 0, "synth failed");
    synth[i] = slurp(out);
  }
  o.require(!synth[0].empty() && synth[0] == synth[1], "repeated synthesis differs");

  std::ofstream(dir / "repeat.cfg") << kSmallConfig << "log = repeat.csv\ncheckpoint = repeat.ffck\n";
  std::string logs[2];
  std::string checkpoints[2];
  for (int i = 0; i < 2; ++i) {
    const CliRun r = run({"train", "--config", (dir / "repeat.cfg").string(), "--seed", "42"});
    o.require(r.code == 0, "train failed");
    logs[i] = slurp(dir / "repeat.csv");
    checkpoints[i] = slurp(dir / "repeat.ffck");
  }
  o.require(std::count(logs[0].begin(), logs[0].end(), '\n') == 61, "log length");
  o.require(logs[0] == logs[1], "loss trajectories differ");
  o.require(checkpoints[0] == checkpoints[1], "checkpoints differ");
  if (o.pass) {
    o.detail = "feature bytes, synthesis, 60-step trajectory and checkpoint identical";
  }
  return o;
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "ffsing_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  OverfitArtifacts artifacts;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"duration worked cases and exact oracle", durations_worked_and_exhaustive},
      {"duration partition on random notes", durations_partition},
      {"gradient checks", gradients},
      {"attention properties", attention_properties},
      {"position and F0 codes", conditioning_codes},
      {"learning-rate schedule and weight averaging", schedule_and_averaging},
      {"overfit 16 phrases", [&] { return overfit(dir, artifacts); }},
      {"ablation determinism", [&] { return ablation(dir); }},
      {"reproducibility", [&] { return reproducibility(dir, artifacts); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ")" << std::endl;
  }
  fs::remove_all(dir);
  return failures == 0 ? 0 : 1;
}
