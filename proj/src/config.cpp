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

#include "rnnlab/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace rnnlab {

namespace {

using nlohmann::json;

// Rejects keys outside `allowed` so a misspelt hyperparameter is an error
// rather than a silent default.
void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + where + "." + key + "\"");
    }
  }
}

template <typename T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_unsigned()) {
          out = it->template get<T>();
        } else if (it->template get<std::int64_t>() >= 0) {
          out = static_cast<T>(it->template get<std::int64_t>());
        } else {
          throw ConfigError("");
        }
      } else {
        out = it->template get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError("");
      out = it->template get<T>();
    } else {
      if (!it->is_string()) throw ConfigError("");
      out = it->template get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError("bad value for \"" + where + "." + key + "\": " +
                      it->dump());
  }
}

CellConfig parse_layer(const json& obj, const std::string& where) {
  check_keys(obj, where,
             {"variant", "input_dim", "cell_dim", "rank", "groups"});
  std::string variant = "dense";
  CellConfig layer;
  read(obj, where, "variant", variant);
  read(obj, where, "input_dim", layer.input_dim);
  read(obj, where, "cell_dim", layer.cell_dim);
  Index rank = 0;
  Index groups = 0;
  read(obj, where, "rank", rank);
  read(obj, where, "groups", groups);
  if (variant == "dense") {
    if (obj.contains("rank") || obj.contains("groups")) {
      throw ConfigError(where + ": dense layers take neither rank nor groups");
    }
    layer.variant = Dense{};
  } else if (variant == "factorized") {
    if (!obj.contains("rank") || obj.contains("groups")) {
      throw ConfigError(where + ": factorized layers need rank (and no groups)");
    }
    layer.variant = Factorized{rank};
  } else if (variant == "grouped") {
    if (!obj.contains("groups") || obj.contains("rank")) {
      throw ConfigError(where + ": grouped layers need groups (and no rank)");
    }
    layer.variant = Grouped{groups};
  } else {
    throw ConfigError(where + ".variant must be dense, factorized or grouped");
  }
  return layer;
}

json layer_json(const CellConfig& layer) {
  json out = {{"input_dim", layer.input_dim}, {"cell_dim", layer.cell_dim}};
  if (const auto* f = std::get_if<Factorized>(&layer.variant)) {
    out["variant"] = "factorized";
    out["rank"] = f->rank;
  } else if (const auto* g = std::get_if<Grouped>(&layer.variant)) {
    out["variant"] = "grouped";
    out["groups"] = g->groups;
  } else {
    out["variant"] = "dense";
  }
  return out;
}

Precision parse_precision(const std::string& text) {
  if (text == "float") return Precision::kFloat;
  if (text == "double") return Precision::kDouble;
  throw ConfigError("model.precision must be \"float\" or \"double\"");
}

}  // namespace

std::string to_string(Precision precision) {
  return precision == Precision::kFloat ? "float" : "double";
}

void RunConfig::validate() const {
  if (model.layers.empty()) throw ConfigError("model.layers is empty");
  // Vocabulary size is not known yet; 3 is the smallest legal value.
  model_config(3).validate();
  const AdagradOptions& a = optimizer.adagrad;
  if (!(a.learning_rate > 0.0)) throw ConfigError("optimizer.lr must be > 0");
  if (!(a.initial_accumulator >= 0.0)) {
    throw ConfigError("optimizer.initial_accumulator must be >= 0");
  }
  if (!(a.epsilon > 0.0)) throw ConfigError("optimizer.epsilon must be > 0");
  if (data.max_vocab < 3) throw ConfigError("data.max_vocab must be >= 3");
  if (!(data.heldout_fraction >= 0.0 && data.heldout_fraction < 1.0)) {
    throw ConfigError("data.heldout_fraction must lie in [0, 1)");
  }
  if (run.steps < 0) throw ConfigError("run.steps must be >= 0");
  if (run.eval_interval < 1) throw ConfigError("run.eval_interval must be >= 1");
  if (run.checkpoint_interval < 0) {
    throw ConfigError("run.checkpoint_interval must be >= 0");
  }
  if (run.threads < 1) throw ConfigError("run.threads must be >= 1");
}

ModelConfig RunConfig::model_config(Index vocab_size) const {
  return ModelConfig{vocab_size, model.layers, model.unroll_length,
                     model.batch_size};
}

RunConfig parse_run_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config", {"model", "optimizer", "data", "run"});
  RunConfig cfg;
  const json empty = json::object();
  const auto section = [&](const char* name) -> const json& {
    const auto it = root.find(name);
    return it == root.end() ? empty : *it;
  };

  const json& m = section("model");
  check_keys(m, "model", {"layers", "unroll_length", "batch_size", "precision"});
  if (m.contains("layers")) {
    const json& layers = m["layers"];
    if (!layers.is_array() || layers.empty()) {
      throw ConfigError("model.layers must be a non-empty array");
    }
    cfg.model.layers.clear();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      cfg.model.layers.push_back(
          parse_layer(layers[l], "model.layers[" + std::to_string(l) + "]"));
    }
  }
  read(m, "model", "unroll_length", cfg.model.unroll_length);
  read(m, "model", "batch_size", cfg.model.batch_size);
  std::string precision = to_string(cfg.model.precision);
  read(m, "model", "precision", precision);
  cfg.model.precision = parse_precision(precision);

  const json& o = section("optimizer");
  check_keys(o, "optimizer", {"lr", "clip_norm", "initial_accumulator", "epsilon"});
  read(o, "optimizer", "lr", cfg.optimizer.adagrad.learning_rate);
  read(o, "optimizer", "clip_norm", cfg.optimizer.clip_norm);
  read(o, "optimizer", "initial_accumulator",
       cfg.optimizer.adagrad.initial_accumulator);
  read(o, "optimizer", "epsilon", cfg.optimizer.adagrad.epsilon);

  const json& d = section("data");
  check_keys(d, "data", {"corpus", "mode", "max_vocab", "heldout_fraction"});
  read(d, "data", "corpus", cfg.data.corpus);
  std::string mode = to_string(cfg.data.mode);
  read(d, "data", "mode", mode);
  cfg.data.mode = parse_token_mode(mode);
  read(d, "data", "max_vocab", cfg.data.max_vocab);
  read(d, "data", "heldout_fraction", cfg.data.heldout_fraction);

  const json& r = section("run");
  check_keys(r, "run",
             {"steps", "seed", "eval_interval", "checkpoint_path",
              "checkpoint_interval", "metrics_path", "threads"});
  read(r, "run", "steps", cfg.run.steps);
  read(r, "run", "seed", cfg.run.seed);
  read(r, "run", "eval_interval", cfg.run.eval_interval);
  read(r, "run", "checkpoint_path", cfg.run.checkpoint_path);
  read(r, "run", "checkpoint_interval", cfg.run.checkpoint_interval);
  read(r, "run", "metrics_path", cfg.run.metrics_path);
  read(r, "run", "threads", cfg.run.threads);

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg = parse_run_config(read_text_file(path));
  const std::filesystem::path corpus(cfg.data.corpus);
  if (!cfg.data.corpus.empty() && corpus.is_relative()) {
    cfg.data.corpus = (path.parent_path() / corpus).lexically_normal().string();
  }
  return cfg;
}

std::string dump_run_config(const RunConfig& cfg) {
  json layers = json::array();
  for (const auto& layer : cfg.model.layers) layers.push_back(layer_json(layer));
  const json root = {
      {"model",
       {{"layers", layers},
        {"unroll_length", cfg.model.unroll_length},
        {"batch_size", cfg.model.batch_size},
        {"precision", to_string(cfg.model.precision)}}},
      {"optimizer",
       {{"lr", cfg.optimizer.adagrad.learning_rate},
        {"clip_norm", cfg.optimizer.clip_norm},
        {"initial_accumulator", cfg.optimizer.adagrad.initial_accumulator},
        {"epsilon", cfg.optimizer.adagrad.epsilon}}},
      {"data",
       {{"corpus", cfg.data.corpus},
        {"mode", to_string(cfg.data.mode)},
        {"max_vocab", cfg.data.max_vocab},
        {"heldout_fraction", cfg.data.heldout_fraction}}},
      {"run",
       {{"steps", cfg.run.steps},
        {"seed", cfg.run.seed},
        {"eval_interval", cfg.run.eval_interval},
        {"checkpoint_path", cfg.run.checkpoint_path},
        {"checkpoint_interval", cfg.run.checkpoint_interval},
        {"metrics_path", cfg.run.metrics_path},
        {"threads", cfg.run.threads}}},
  };
  return root.dump(2);
}

}  // namespace rnnlab
