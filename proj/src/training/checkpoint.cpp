// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/training/checkpoint.hpp"

#include <zlib.h>

#include <charconv>
#include <map>

#include "detail/binary_io.hpp"
#include "detail/text_lines.hpp"
#include "ffsing/error.hpp"

namespace ffsing {

namespace {

constexpr char kMagic[] = "FFCK";
constexpr std::uint32_t kVersion = 1;

std::uint32_t checksum(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(chunk));
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_tensor(detail::ByteWriter& w, const StoredTensor& t, std::uint8_t set) {
  w.str(t.name);
  w.u8(set);
  w.u32(static_cast<std::uint32_t>(t.shape.size()));
  for (std::size_t d : t.shape) {
    w.u32(static_cast<std::uint32_t>(d));
  }
  for (double v : t.values) {
    w.f64(v);
  }
}

ModelConfig parse_config(const std::string& text) {
  ModelConfig config;
  for (const auto& [line, tok] : detail::tokenize_lines(text)) {
    const std::string& entry = tok[0];
    const auto eq = entry.find('=');
    if (tok.size() != 1 || eq == std::string::npos) {
      throw IoError("checkpoint: malformed config entry on line " + std::to_string(line));
    }
    if (!apply_model_key(config, std::string_view(entry).substr(0, eq), std::string_view(entry).substr(eq + 1))) {
      throw IoError("checkpoint: unknown config key '" + entry.substr(0, eq) + "'");
    }
  }
  config.validate();
  return config;
}

std::vector<std::pair<std::string, std::vector<double>>> as_values(const std::vector<StoredTensor>& tensors) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  out.reserve(tensors.size());
  for (const StoredTensor& t : tensors) {
    out.emplace_back(t.name, t.values);
  }
  return out;
}

}  // namespace

std::string_view to_string(DurationSource source) {
  return source == DurationSource::average ? "average" : "ground_truth";
}

DurationSource parse_duration_source(std::string_view text) {
  if (text == "average") {
    return DurationSource::average;
  }
  if (text == "ground_truth") {
    return DurationSource::ground_truth;
  }
  throw ConfigError("duration source must be 'average' or 'ground_truth', got '" + std::string(text) + "'");
}

ModelCheckpoint ModelCheckpoint::capture(const AcousticModel& model,
                                         const std::vector<std::vector<double>>& polyak_values,
                                         const PhonemeInventory& inventory, const DurationTable& table,
                                         DurationSource durations, std::uint64_t step) {
  ModelCheckpoint ck;
  ck.config = model.config;
  ck.inventory_text = inventory.serialize();
  ck.duration_table_text = table.serialize();
  ck.durations = durations;
  ck.step = step;
  const num::NamedTensors params = model.parameters();
  if (polyak_values.size() != params.size()) {
    throw ShapeMismatch("checkpoint: " + std::to_string(polyak_values.size()) + " averaged tensors for " +
                        std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, tensor] = params[i];
    if (polyak_values[i].size() != tensor.size()) {
      throw ShapeMismatch("checkpoint: averaged '" + name + "' has the wrong size");
    }
    ck.raw.push_back({name, tensor.shape(), {tensor.values().begin(), tensor.values().end()}});
    ck.polyak.push_back({name, tensor.shape(), polyak_values[i]});
  }
  return ck;
}

std::vector<std::uint8_t> ModelCheckpoint::to_bytes() const {
  detail::ByteWriter w;
  w.raw(std::string_view(kMagic, 4));
  w.u32(kVersion);
  const std::vector<std::pair<std::string, std::string>> meta = {
      {"config", serialize_model_config(config)},
      {"inventory", inventory_text},
      {"duration_table", duration_table_text},
      {"duration_source", std::string(to_string(durations))},
      {"step", std::to_string(step)},
  };
  w.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(raw.size() + polyak.size()));
  for (const StoredTensor& t : raw) {
    write_tensor(w, t, 0);
  }
  for (const StoredTensor& t : polyak) {
    write_tensor(w, t, 1);
  }
  w.u32(checksum(w.bytes()));
  return std::move(w.bytes());
}

ModelCheckpoint ModelCheckpoint::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) {
    throw IoError("checkpoint: file too short");
  }
  const auto body = bytes.first(bytes.size() - 4);
  detail::ByteReader tail(bytes.last(4));
  if (tail.u32() != checksum(body)) {
    throw IoError("checkpoint: checksum mismatch (file corrupt or truncated)");
  }
  detail::ByteReader r(body);
  if (r.raw(4) != std::string_view(kMagic, 4)) {
    throw IoError("checkpoint: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  }
  std::map<std::string, std::string> meta;
  const std::uint32_t n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string key = r.str();
    meta[key] = r.str();
  }
  for (const char* key : {"config", "inventory", "duration_table", "duration_source", "step"}) {
    if (!meta.count(key)) {
      throw IoError(std::string("checkpoint: missing '") + key + "' entry");
    }
  }
  ModelCheckpoint ck;
  ck.config = parse_config(meta["config"]);
  ck.inventory_text = meta["inventory"];
  ck.duration_table_text = meta["duration_table"];
  ck.durations = parse_duration_source(meta["duration_source"]);
  const std::string& step = meta["step"];
  if (std::from_chars(step.data(), step.data() + step.size(), ck.step).ec != std::errc()) {
    throw IoError("checkpoint: bad step '" + step + "'");
  }
  const std::uint32_t n_tensor = r.u32();
  for (std::uint32_t i = 0; i < n_tensor; ++i) {
    StoredTensor t;
    t.name = r.str();
    const std::uint8_t set = r.u8();
    if (set > 1) {
      throw IoError("checkpoint: bad tensor set for '" + t.name + "'");
    }
    const std::uint32_t rank = r.u32();
    for (std::uint32_t d = 0; d < rank; ++d) {
      t.shape.push_back(r.u32());
    }
    const std::size_t count = num::element_count(t.shape);
    if (count * 8 > r.remaining()) {
      throw IoError("checkpoint: tensor '" + t.name + "' truncated");
    }
    t.values.resize(count);
    for (double& v : t.values) {
      v = r.f64();
    }
    (set == 0 ? ck.raw : ck.polyak).push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw IoError("checkpoint: trailing bytes");
  }
  return ck;
}

void ModelCheckpoint::save(const std::filesystem::path& path) const {
  const auto bytes = to_bytes();
  detail::write_binary_file(path.string(), bytes);
}

ModelCheckpoint ModelCheckpoint::load(const std::filesystem::path& path) {
  const auto bytes = detail::read_binary_file(path.string());
  try {
    return from_bytes(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

PhonemeInventory ModelCheckpoint::inventory() const { return PhonemeInventory::parse(inventory_text); }

DurationTable ModelCheckpoint::duration_table() const { return DurationTable::parse(duration_table_text); }

AcousticModel ModelCheckpoint::model(bool use_polyak) const {
  AcousticModel m = AcousticModel::init(config, inventory().size(), 0);
  m.load_values(as_values(use_polyak ? polyak : raw));
  return m;
}

}  // namespace ffsing
