// Copyright 2026 The rnn-factor-lab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rnnlab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rnnlab {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O writes host byte order, which must be little-endian");

namespace {

using nlohmann::json;

constexpr std::size_t kHeaderBytes = 16;

template <typename Scalar>
constexpr const char* dtype_name() {
  return std::is_same_v<Scalar, float> ? "f32" : "f64";
}

// Every tensor of a checkpoint in file order, as writable views into ck.
template <typename Scalar>
TensorList<Scalar> checkpoint_tensors(Checkpoint<Scalar>& ck) {
  TensorList<Scalar> out;
  for (auto& t : ck.model.tensors()) {
    t.name = "model/" + t.name;
    out.push_back(std::move(t));
  }
  for (auto& t : ck.optimizer.accumulators.tensors()) {
    t.name = "adagrad/" + t.name;
    out.push_back(std::move(t));
  }
  for (std::size_t l = 0; l < ck.state.size(); ++l) {
    const std::string prefix = "state/" + std::to_string(l) + "/";
    out.push_back(make_view(prefix + "h", ck.state[l].h));
    out.push_back(make_view(prefix + "c", ck.state[l].c));
  }
  return out;
}

json config_json(const ModelConfig& config) {
  json layers = json::array();
  for (const auto& layer : config.layers) {
    layers.push_back({{"tag", layer.tag()},
                      {"input_dim", layer.input_dim},
                      {"cell_dim", layer.cell_dim}});
  }
  return {{"vocab_size", config.vocab_size},
          {"layers", layers},
          {"unroll_length", config.unroll_length},
          {"batch_size", config.batch_size}};
}

std::string shape_text(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint<Scalar>& checkpoint) {
  // Views only read through; the const_cast lets one walker serve both
  // directions.
  auto tensors = checkpoint_tensors(const_cast<Checkpoint<Scalar>&>(checkpoint));
  json metadata;
  try {
    metadata = json::parse(checkpoint.metadata);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("checkpoint metadata is not JSON: ") + e.what());
  }
  const AdagradOptions& opt = checkpoint.optimizer.options;
  json manifest = {
      {"dtype", dtype_name<Scalar>()},
      {"config", config_json(checkpoint.model.config)},
      {"adagrad",
       {{"lr", opt.learning_rate},
        {"initial_accumulator", opt.initial_accumulator},
        {"epsilon", opt.epsilon}}},
      {"metadata", metadata},
      {"tensors", json::array()},
  };
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    manifest["tensors"].push_back({{"name", t.name},
                                   {"shape", {t.rows, t.cols}},
                                   {"dtype", dtype_name<Scalar>()},
                                   {"offset", offset}});
    offset += static_cast<std::uint64_t>(t.size()) * sizeof(Scalar);
  }
  const std::string manifest_text = manifest.dump();

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    const std::uint32_t version = kCheckpointVersion;
    const std::uint64_t length = manifest_text.size();
    out.write(kCheckpointMagic, 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(manifest_text.data(), static_cast<std::streamsize>(length));
    for (const auto& t : tensors) {
      out.write(reinterpret_cast<const char*>(t.data),
                static_cast<std::streamsize>(t.size() * sizeof(Scalar)));
    }
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

std::string read_checkpoint_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char header[kHeaderBytes];
  if (!in.read(header, kHeaderBytes)) {
    throw CheckpointError(path.string() + ": truncated header");
  }
  if (std::memcmp(header, kCheckpointMagic, 4) != 0) {
    throw CheckpointError(path.string() + ": not an FLM1 checkpoint");
  }
  std::uint32_t version = 0;
  std::uint64_t length = 0;
  std::memcpy(&version, header + 4, sizeof(version));
  std::memcpy(&length, header + 8, sizeof(length));
  if (version != kCheckpointVersion) {
    throw CheckpointError(path.string() + ": unsupported version " +
                          std::to_string(version));
  }
  const auto file_size = std::filesystem::file_size(path);
  if (length > file_size - kHeaderBytes) {
    throw CheckpointError(path.string() + ": truncated manifest");
  }
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw CheckpointError(path.string() + ": truncated manifest");
  }
  return text;
}

template <typename Scalar>
Checkpoint<Scalar> load_checkpoint(const std::filesystem::path& path,
                                   const ModelConfig& expected) {
  const std::string manifest_text = read_checkpoint_manifest(path);
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(path.string() + ": manifest is not JSON: " + e.what());
  }

  Checkpoint<Scalar> ck;
  ck.model = LanguageModel<Scalar>::init(expected, 0).zeros_like();
  ck.state = zero_state<Scalar>(expected, expected.batch_size);
  try {
    const json& a = manifest.at("adagrad");
    AdagradOptions options;
    options.learning_rate = a.at("lr").get<double>();
    options.initial_accumulator = a.at("initial_accumulator").get<double>();
    options.epsilon = a.at("epsilon").get<double>();
    ck.optimizer = AdagradState<Scalar>::init(ck.model, options);
    ck.metadata = manifest.at("metadata").dump();
  } catch (const json::exception& e) {
    throw CheckpointError(path.string() + ": bad manifest: " + e.what());
  }

  auto tensors = checkpoint_tensors(ck);
  const json& entries = manifest.contains("tensors") ? manifest["tensors"]
                                                     : json::array();
  if (!entries.is_array()) {
    throw CheckpointError(path.string() + ": manifest has no tensor list");
  }
  if (entries.size() != tensors.size()) {
    throw CheckpointError(path.string() + ": " +
                          std::to_string(entries.size()) +
                          " tensors in file, config implies " +
                          std::to_string(tensors.size()));
  }
  const std::uint64_t payload_start = kHeaderBytes + manifest_text.size();
  const std::uint64_t file_size = std::filesystem::file_size(path);
  std::ifstream in(path, std::ios::binary);
  std::uint64_t expected_offset = 0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& t = tensors[i];
    std::string name;
    Index rows = 0;
    Index cols = 0;
    std::string dtype;
    std::uint64_t offset = 0;
    try {
      name = entries[i].at("name").get<std::string>();
      rows = entries[i].at("shape").at(0).get<Index>();
      cols = entries[i].at("shape").at(1).get<Index>();
      dtype = entries[i].at("dtype").get<std::string>();
      offset = entries[i].at("offset").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw CheckpointError(path.string() + ": bad manifest entry " +
                            std::to_string(i) + ": " + e.what());
    }
    if (name != t.name) {
      throw CheckpointError("tensor " + t.name + ": file has \"" + name +
                            "\" in its place");
    }
    if (rows != t.rows || cols != t.cols) {
      throw CheckpointError("tensor " + t.name + ": expected shape " +
                            shape_text(t.rows, t.cols) + ", file has " +
                            shape_text(rows, cols));
    }
    if (dtype != dtype_name<Scalar>()) {
      throw CheckpointError("tensor " + t.name + ": expected dtype " +
                            dtype_name<Scalar>() + ", file has " + dtype);
    }
    if (offset != expected_offset) {
      throw CheckpointError("tensor " + t.name + ": offset " +
                            std::to_string(offset) + " breaks manifest order");
    }
    const std::uint64_t bytes =
        static_cast<std::uint64_t>(t.size()) * sizeof(Scalar);
    if (payload_start + offset + bytes > file_size) {
      throw CheckpointError("tensor " + t.name + ": file truncated");
    }
    in.seekg(static_cast<std::streamoff>(payload_start + offset));
    if (!in.read(reinterpret_cast<char*>(t.data),
                 static_cast<std::streamsize>(bytes))) {
      throw CheckpointError("tensor " + t.name + ": read failed");
    }
    expected_offset += bytes;
  }
  if (payload_start + expected_offset != file_size) {
    throw CheckpointError(path.string() + ": trailing bytes after payload");
  }
  return ck;
}

template void save_checkpoint(const std::filesystem::path&,
                              const Checkpoint<float>&);
template void save_checkpoint(const std::filesystem::path&,
                              const Checkpoint<double>&);
template Checkpoint<float> load_checkpoint(const std::filesystem::path&,
                                           const ModelConfig&);
template Checkpoint<double> load_checkpoint(const std::filesystem::path&,
                                            const ModelConfig&);

}  // namespace rnnlab
