// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/model.hpp"

#include <charconv>
#include <map>

#include "ffsing/error.hpp"

namespace ffsing {

void ModelConfig::validate() const {
  encoder.validate();
  decoder.validate();
  f0.validate();
  if (pos_dims < 2) {
    throw ConfigError("pos_dims must be >= 2");
  }
}

namespace {

std::size_t to_count(std::string_view key, std::string_view value) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "' expects a non-negative integer, got '" + std::string(value) + "'");
  }
  return v;
}

double to_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw ConfigError("key '" + std::string(key) + "' expects true or false, got '" + std::string(value) + "'");
}

std::string real_text(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

bool apply_model_key(ModelConfig& c, std::string_view key, std::string_view value) {
  if (key == "embed_dim") {
    c.encoder.embed_dim = to_count(key, value);
  } else if (key == "encoder_channels") {
    c.encoder.channels = to_count(key, value);
  } else if (key == "encoder_kernel") {
    c.encoder.kernel = to_count(key, value);
  } else if (key == "encoder_blocks") {
    c.encoder.num_blocks = to_count(key, value);
  } else if (key == "d_model") {
    c.decoder.d_model = to_count(key, value);
  } else if (key == "num_layers") {
    c.decoder.num_layers = to_count(key, value);
  } else if (key == "decoder_kernel") {
    c.decoder.kernel = to_count(key, value);
  } else if (key == "reduction") {
    c.decoder.reduction = to_count(key, value);
  } else if (key == "out_dim") {
    c.decoder.out_dim = to_count(key, value);
  } else if (key == "dropout") {
    c.decoder.dropout = to_real(key, value);
    c.encoder.dropout = c.decoder.dropout;
  } else if (key == "sigma_init") {
    c.decoder.sigma_init = to_real(key, value);
  } else if (key == "attention") {
    c.decoder.use_attention = to_bool(key, value);
  } else if (key == "f0_dims") {
    c.f0.dims = to_count(key, value);
  } else if (key == "f0_min") {
    c.f0.f_min = to_real(key, value);
  } else if (key == "f0_max") {
    c.f0.f_max = to_real(key, value);
  } else if (key == "pos_dims") {
    c.pos_dims = to_count(key, value);
  } else {
    return false;
  }
  return true;
}

std::string serialize_model_config(const ModelConfig& c) {
  std::string out;
  const auto put = [&out](const char* key, const std::string& value) { out += std::string(key) + "=" + value + "\n"; };
  put("embed_dim", std::to_string(c.encoder.embed_dim));
  put("encoder_channels", std::to_string(c.encoder.channels));
  put("encoder_kernel", std::to_string(c.encoder.kernel));
  put("encoder_blocks", std::to_string(c.encoder.num_blocks));
  put("d_model", std::to_string(c.decoder.d_model));
  put("num_layers", std::to_string(c.decoder.num_layers));
  put("decoder_kernel", std::to_string(c.decoder.kernel));
  put("reduction", std::to_string(c.decoder.reduction));
  put("out_dim", std::to_string(c.decoder.out_dim));
  put("dropout", real_text(c.decoder.dropout));
  put("sigma_init", real_text(c.decoder.sigma_init));
  put("attention", c.decoder.use_attention ? "true" : "false");
  put("f0_dims", std::to_string(c.f0.dims));
  put("f0_min", real_text(c.f0.f_min));
  put("f0_max", real_text(c.f0.f_max));
  put("pos_dims", std::to_string(c.pos_dims));
  return out;
}

PhraseInput prepare_input(const DurationPlan& plan, const F0Track& f0, const PhonemeInventory& inventory,
                          const ModelConfig& config) {
  PhraseInput input;
  for (const std::string& ph : plan.phonemes()) {
    input.phoneme_ids.push_back(inventory.id(ph));
  }
  input.cond = build_conditioning(plan, f0, config.f0, config.pos_dims);
  return input;
}

AcousticModel AcousticModel::init(const ModelConfig& config, std::size_t vocab, std::uint64_t seed) {
  config.validate();
  num::Rng rng(seed, num::Stream::init);
  AcousticModel m;
  m.config = config;
  m.vocab = vocab;
  m.encoder = EncoderParams::init(config.encoder, vocab, rng);
  m.decoder = DecoderParams::init(config.decoder, config.decoder_input_dim(), rng);
  return m;
}

num::NamedTensors AcousticModel::parameters() const {
  num::NamedTensors out;
  encoder.collect("encoder", out);
  decoder.collect("decoder", out);
  return out;
}

void AcousticModel::load_values(const std::vector<std::pair<std::string, std::vector<double>>>& values) {
  std::map<std::string, const std::vector<double>*> by_name;
  for (const auto& [name, v] : values) {
    by_name[name] = &v;
  }
  for (auto& [name, tensor] : parameters()) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw ValidationError("checkpoint lacks parameter '" + name + "'");
    }
    if (it->second->size() != tensor.size()) {
      throw ShapeMismatch("parameter '" + name + "' has " + std::to_string(it->second->size()) +
                          " values, model expects " + std::to_string(tensor.size()));
    }
    num::Tensor handle = tensor;
    std::copy(it->second->begin(), it->second->end(), handle.mutable_values().begin());
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    throw ValidationError("checkpoint holds unknown parameter '" + by_name.begin()->first + "'");
  }
}

num::Tensor AcousticModel::forward(const PhraseInput& input, num::Mode mode, num::Rng& rng) const {
  const num::Tensor encoded = encode(input.phoneme_ids, config.encoder, encoder, mode, rng);
  return decode(encoded, input.cond, config.decoder, decoder, mode, rng);
}

num::Tensor AcousticModel::infer(const PhraseInput& input) const {
  num::NoGradGuard guard;
  num::Rng unused(0, num::Stream::dropout);
  return forward(input, num::Mode::eval, unused);
}

}  // namespace ffsing
