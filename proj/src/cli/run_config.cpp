// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/cli/run_config.hpp"

#include <charconv>
#include <string>

#include "ffsing/error.hpp"
#include "ffsing/score.hpp"

#ifndef FFSING_DATA_DIR
#define FFSING_DATA_DIR "data"
#endif

namespace ffsing {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T number(std::size_t line, std::string_view key, std::string_view value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": bad value '" + std::string(value) + "' for key '" +
                      std::string(key) + "'");
  }
  return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  return p.is_relative() ? base / p : p;
}

}  // namespace

std::filesystem::path default_data_dir() { return FFSING_DATA_DIR; }

RunConfig RunConfig::defaults(const std::filesystem::path& base_dir) {
  RunConfig c;
  c.model.decoder.d_model = 64;
  c.model.decoder.num_layers = 2;
  // A 4000-update warm-up for a 50k-update run is 8%; keep that fraction.
  c.train.warmup = 160;
  c.inventory = default_data_dir() / "inventory.txt";
  c.duration_table = default_data_dir() / "durations.txt";
  c.checkpoint = base_dir / "model.ffck";
  c.log = base_dir / "train_log.csv";
  c.report = base_dir / "ablation.csv";
  return c;
}

RunConfig RunConfig::parse(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig c = defaults(base_dir);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty value for key '" + std::string(key) + "'");
    }
    try {
      if (apply_model_key(c.model, key, value)) {
        continue;
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (key == "updates") {
      c.train.updates = number<std::size_t>(line_no, key, value);
    } else if (key == "batch_size") {
      c.train.batch_size = number<std::size_t>(line_no, key, value);
    } else if (key == "seed") {
      c.train.seed = number<std::uint64_t>(line_no, key, value);
    } else if (key == "base_lr") {
      c.train.base_lr = number<double>(line_no, key, value);
    } else if (key == "warmup") {
      c.train.warmup = number<std::int64_t>(line_no, key, value);
    } else if (key == "adam_beta1") {
      c.train.adam.beta1 = number<double>(line_no, key, value);
    } else if (key == "adam_beta2") {
      c.train.adam.beta2 = number<double>(line_no, key, value);
    } else if (key == "adam_eps") {
      c.train.adam.eps = number<double>(line_no, key, value);
    } else if (key == "polyak_decay") {
      c.train.polyak_decay = number<double>(line_no, key, value);
    } else if (key == "val_every") {
      c.train.val_every = number<std::size_t>(line_no, key, value);
    } else if (key == "durations") {
      c.durations = parse_duration_source(value);
    } else if (key == "inventory") {
      c.inventory = resolve(base_dir, value);
    } else if (key == "duration_table") {
      c.duration_table = resolve(base_dir, value);
    } else if (key == "train_phrases") {
      c.train_phrases = resolve(base_dir, value);
    } else if (key == "val_phrases") {
      c.val_phrases = resolve(base_dir, value);
    } else if (key == "corpus_seed") {
      c.corpus_seed = number<std::uint64_t>(line_no, key, value);
    } else if (key == "corpus_phrases") {
      c.corpus_phrases = number<std::size_t>(line_no, key, value);
    } else if (key == "corpus_val_phrases") {
      c.corpus_val_phrases = number<std::size_t>(line_no, key, value);
    } else if (key == "checkpoint") {
      c.checkpoint = resolve(base_dir, value);
    } else if (key == "log") {
      c.log = resolve(base_dir, value);
    } else if (key == "report") {
      c.report = resolve(base_dir, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  c.model.validate();
  c.train.validate();
  if (c.train_phrases.empty() && c.corpus_phrases == 0) {
    throw ConfigError("corpus_phrases must be >= 1 when train_phrases is unset");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse(text, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace ffsing
