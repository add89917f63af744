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

#include "rnnlab/accounting.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

#include "rnnlab/training.hpp"

namespace rnnlab {

namespace {

constexpr Index kBigProjection = 1024;
constexpr Index kBigCell = 8192;

std::vector<CellConfig> two_layers(const CellConfig& layer) {
  return {layer, layer};
}

BenchReport counts_for(const NamedConfig& config) {
  BenchReport r;
  r.label = config.label;
  r.total_rnn_params = rnn_param_count(config);
  for (const auto& layer : config.layers) {
    const MacCount macs = flops_per_step(layer);
    r.gate_macs += macs.gate;
    r.flops_per_step += macs.total();
  }
  r.reference_params = config.reference_params;
  return r;
}

}  // namespace

MacCount flops_per_step(const CellConfig& config) {
  MacCount macs;
  macs.gate = param_count(config, /*include_projection=*/false,
                          /*include_bias=*/false);
  macs.projection = static_cast<std::int64_t>(config.input_dim) *
                    static_cast<std::int64_t>(config.cell_dim);
  return macs;
}

std::int64_t rnn_param_count(const NamedConfig& config) {
  std::int64_t total = 0;
  for (const auto& layer : config.layers) {
    total += param_count(layer, /*include_projection=*/true,
                         /*include_bias=*/true);
  }
  return total;
}

std::vector<NamedConfig> table1_configs() {
  const Index p = kBigProjection;
  const Index n = kBigCell;
  return {
      {"BIGLSTM baseline", two_layers(CellConfig::dense(p, n)), 151060480},
      {"BIG F-LSTM F512", two_layers(CellConfig::factorized(p, n, 512)),
       52494336},
      {"BIG G-LSTM G-2", two_layers(CellConfig::grouped(p, n, 2)), 83951616},
      {"BIG G-LSTM G-4", two_layers(CellConfig::grouped(p, n, 4)), 50397184},
      {"BIG G-LSTM G-8", two_layers(CellConfig::grouped(p, n, 8)), 33619968},
      {"BIG G-LSTM G4-G8",
       {CellConfig::grouped(p, n, 4), CellConfig::grouped(p, n, 8)},
       std::nullopt},
  };
}

std::vector<BenchReport> table1_report() {
  std::vector<BenchReport> out;
  for (const auto& config : table1_configs()) out.push_back(counts_for(config));
  return out;
}

std::vector<NamedConfig> throughput_configs(const BenchOptions& options) {
  const Index p = options.input_dim;
  const Index n = options.cell_dim;
  const auto stack = [&](const CellConfig& layer) {
    return std::vector<CellConfig>(static_cast<std::size_t>(options.layers),
                                   layer);
  };
  return {
      {"Dense", stack(CellConfig::dense(p, n)), std::nullopt},
      {"G-2", stack(CellConfig::grouped(p, n, 2)), std::nullopt},
      {"G-4", stack(CellConfig::grouped(p, n, 4)), std::nullopt},
      {"G-8", stack(CellConfig::grouped(p, n, 8)), std::nullopt},
      {"F" + std::to_string(p / 2), stack(CellConfig::factorized(p, n, p / 2)),
       std::nullopt},
  };
}

std::vector<BenchReport> throughput_bench(
    const std::vector<NamedConfig>& configs, const BenchOptions& options) {
  if (options.steps < 0 || options.warmup_steps < 0) {
    throw ConfigError("bench: step counts must be non-negative");
  }
  std::vector<BenchReport> out;
  for (const auto& named : configs) {
    BenchReport report = counts_for(named);
    if (options.steps == 0) {
      out.push_back(report);
      continue;
    }
    ModelConfig mc{options.vocab, named.layers, options.unroll, options.batch};
    mc.validate();
    LanguageModel<float> model = LanguageModel<float>::init(mc, options.seed);
    AdagradState<float> optimizer =
        AdagradState<float>::init(model, AdagradOptions{});
    ModelState<float> state = zero_state<float>(mc, options.batch);

    // Same synthetic token stream for every config.
    Rng rng(options.seed);
    const int total = options.warmup_steps + options.steps;
    std::vector<BatchSequence> batches(static_cast<std::size_t>(total));
    for (auto& b : batches) {
      b.tokens.resize(options.batch, options.unroll + 1);
      for (Index i = 0; i < b.tokens.size(); ++i) {
        b.tokens.data()[i] = static_cast<std::int32_t>(
            rng.below(static_cast<std::uint64_t>(options.vocab)));
      }
    }
    TrainStepOptions step_options;
    step_options.execution.threads = options.threads;
    for (int s = 0; s < options.warmup_steps; ++s) {
      train_step(model, optimizer, batches[s], state, step_options);
    }
    const auto start = std::chrono::steady_clock::now();
    for (int s = options.warmup_steps; s < total; ++s) {
      train_step(model, optimizer, batches[s], state, step_options);
    }
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    report.steps_timed = options.steps;
    const double words = static_cast<double>(options.batch * options.unroll) *
                         static_cast<double>(options.steps);
    report.measured_words_per_sec = words / std::max(elapsed, 1e-9);
    out.push_back(report);
  }
  return out;
}

OrderingVerdict check_throughput_ordering(
    const std::vector<BenchReport>& reports, double min_separation) {
  OrderingVerdict verdict;
  std::map<std::string, double> wps;
  for (const auto& r : reports) {
    if (!r.measured_words_per_sec) {
      verdict.detail = "no measurement for " + r.label;
      return verdict;
    }
    wps[r.label] = *r.measured_words_per_sec;
  }
  verdict.measured = true;
  std::ostringstream detail;
  detail << std::fixed << std::setprecision(1);
  bool ok = true;
  const std::vector<std::string> chain = {"Dense", "G-2", "G-4", "G-8"};
  for (const auto& label : chain) {
    if (!wps.count(label)) {
      verdict.detail = "missing report " + label;
      return verdict;
    }
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const double lo = wps[chain[i]];
    const double hi = wps[chain[i + 1]];
    const bool pair_ok = hi > lo * (1.0 + min_separation);
    ok = ok && pair_ok;
    detail << chain[i] << " " << lo << " < " << chain[i + 1] << " " << hi
           << " (+" << 100.0 * (hi / lo - 1.0) << "%) "
           << (pair_ok ? "ok" : "FAIL") << "; ";
  }
  for (const auto& [label, value] : wps) {
    if (label.empty() || label[0] != 'F') continue;
    const bool pair_ok = value > wps["Dense"];
    ok = ok && pair_ok;
    detail << label << " " << value << " > Dense " << wps["Dense"] << " "
           << (pair_ok ? "ok" : "FAIL") << "; ";
  }
  verdict.passed = ok;
  verdict.detail = detail.str();
  return verdict;
}

std::string format_report_table(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(20) << "model" << std::right << std::setw(16)
     << "rnn_params" << std::setw(16) << "published" << std::setw(16)
     << "gate_macs" << std::setw(16) << "words/sec" << "\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(20) << r.label << std::right << std::setw(16)
       << r.total_rnn_params << std::setw(16)
       << (r.reference_params ? std::to_string(*r.reference_params) : "-")
       << std::setw(16) << r.gate_macs << std::setw(16);
    if (r.measured_words_per_sec) {
      std::ostringstream v;
      v << std::fixed << std::setprecision(1) << *r.measured_words_per_sec;
      os << v.str();
    } else {
      os << "no measurement";
    }
    os << "\n";
  }
  return os.str();
}

std::string format_report_csv(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  os << "label,rnn_params,gate_macs,words_per_sec\n";
  for (const auto& r : reports) {
    os << r.label << "," << r.total_rnn_params << "," << r.gate_macs << ",";
    if (r.measured_words_per_sec) {
      os << std::fixed << std::setprecision(3) << *r.measured_words_per_sec
         << std::defaultfloat;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace rnnlab
