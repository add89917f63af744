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

#include <gtest/gtest.h>

namespace rnnlab {
namespace {

const BenchReport* find(const std::vector<BenchReport>& reports,
                        const std::string& label) {
  for (const auto& r : reports) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

TEST(Table1, PublishedCountsExact) {
  const auto reports = table1_report();
  const std::pair<const char*, std::int64_t> expected[] = {
      {"BIGLSTM baseline", 151060480}, {"BIG F-LSTM F512", 52494336},
      {"BIG G-LSTM G-2", 83951616},    {"BIG G-LSTM G-4", 50397184},
      {"BIG G-LSTM G-8", 33619968},
  };
  for (const auto& [label, count] : expected) {
    const BenchReport* r = find(reports, label);
    ASSERT_NE(r, nullptr) << label;
    EXPECT_EQ(r->total_rnn_params, count) << label;
    ASSERT_TRUE(r->reference_params.has_value());
    EXPECT_EQ(*r->reference_params, count);
    EXPECT_FALSE(r->measured_words_per_sec.has_value());
  }
}

TEST(Table1, HierarchicalGroupsCount) {
  const BenchReport* r = find(table1_report(), "BIG G-LSTM G4-G8");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->total_rnn_params, 42008576);
  EXPECT_EQ(param_count(CellConfig::grouped(1024, 8192, 4), true, true), 25198592);
  EXPECT_EQ(param_count(CellConfig::grouped(1024, 8192, 8), true, true), 16809984);
}

TEST(Table1, GroupedLayerUsesSharedProjection) {
  // 41,975,808 = 33,554,432 gates + 32,768 bias + 8,388,608 full projection.
  EXPECT_EQ(param_count(CellConfig::grouped(1024, 8192, 2), true, true), 41975808);
}

TEST(FlopsPerStep, GateMacs) {
  EXPECT_EQ(flops_per_step(CellConfig::dense(1024, 8192)).gate, 67108864);
  EXPECT_EQ(flops_per_step(CellConfig::factorized(1024, 8192, 512)).gate, 17825792);
  EXPECT_EQ(flops_per_step(CellConfig::grouped(1024, 8192, 2)).gate * 2, 67108864);
  EXPECT_EQ(flops_per_step(CellConfig::dense(1024, 8192)).projection, 8388608);
  EXPECT_EQ(flops_per_step(CellConfig::dense(4, 8)).total(), 8 * 4 * 8 + 4 * 8);
}

TEST(FlopsPerStep, GroupedTimesKEqualsDense) {
  const Index dims[] = {1, 2, 4, 6, 8, 12, 16, 24, 32, 64};
  for (const Index p : dims) {
    for (const Index n : dims) {
      if (p > n) continue;
      const auto dense = flops_per_step(CellConfig::dense(p, n)).gate;
      for (Index k = 1; k <= p; ++k) {
        if (p % k || n % k) continue;
        EXPECT_EQ(flops_per_step(CellConfig::grouped(p, n, k)).gate * k, dense)
            << p << " " << n << " " << k;
      }
    }
  }
}

TEST(FlopsPerStep, InvalidConfigRejected) {
  EXPECT_THROW(flops_per_step(CellConfig::grouped(4, 8, 3)), ConfigError);
  EXPECT_THROW(flops_per_step(CellConfig::factorized(4, 8, 4)), ConfigError);
}

TEST(ThroughputBench, ZeroStepsGivesNoMeasurement) {
  BenchOptions options;
  options.steps = 0;
  options.warmup_steps = 0;
  const auto reports = throughput_bench(throughput_configs(options), options);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) {
    EXPECT_FALSE(r.measured_words_per_sec.has_value()) << r.label;
    EXPECT_EQ(r.steps_timed, 0);
    EXPECT_GT(r.total_rnn_params, 0);
  }
  EXPECT_NE(format_report_table(reports).find("no measurement"), std::string::npos);
  const auto verdict = check_throughput_ordering(reports);
  EXPECT_FALSE(verdict.measured);
}

TEST(ThroughputBench, SmallRunMeasuresEveryConfig) {
  BenchOptions options;
  options.input_dim = 8;
  options.cell_dim = 16;
  options.batch = 2;
  options.unroll = 3;
  options.vocab = 11;
  options.steps = 2;
  const auto configs = throughput_configs(options);
  const auto reports = throughput_bench(configs, options);
  ASSERT_EQ(reports.size(), configs.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    EXPECT_EQ(reports[i].label, configs[i].label);
    ASSERT_TRUE(reports[i].measured_words_per_sec.has_value());
    EXPECT_GT(*reports[i].measured_words_per_sec, 0.0);
    EXPECT_EQ(reports[i].steps_timed, 2);
    EXPECT_EQ(reports[i].total_rnn_params, rnn_param_count(configs[i]));
  }
  EXPECT_EQ(configs.back().label, "F4");
}

std::vector<BenchReport> synthetic(double dense, double g2, double g4, double g8,
                                   double f) {
  const auto make = [](const char* label, double wps) {
    BenchReport r;
    r.label = label;
    r.measured_words_per_sec = wps;
    return r;
  };
  return {make("Dense", dense), make("G-2", g2), make("G-4", g4), make("G-8", g8),
          make("F128", f)};
}

TEST(OrderingCheck, AcceptsSeparatedOrdering) {
  const auto v = check_throughput_ordering(synthetic(100, 110, 120, 130, 101));
  EXPECT_TRUE(v.measured);
  EXPECT_TRUE(v.passed) << v.detail;
}

TEST(OrderingCheck, RejectsSmallSeparationOrInversion) {
  EXPECT_FALSE(check_throughput_ordering(synthetic(100, 104, 120, 130, 150)).passed);
  EXPECT_FALSE(check_throughput_ordering(synthetic(100, 110, 105, 130, 150)).passed);
  EXPECT_FALSE(check_throughput_ordering(synthetic(100, 110, 120, 130, 99)).passed);
}

TEST(ReportFormats, CsvColumns) {
  auto reports = synthetic(100.5, 1, 2, 3, 4);
  reports[0].total_rnn_params = 12;
  reports[0].gate_macs = 8;
  reports[1].measured_words_per_sec.reset();
  const std::string csv = format_report_csv(reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,rnn_params,gate_macs,words_per_sec");
  EXPECT_NE(csv.find("\nDense,12,8,100.500\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nG-2,0,0,\n"), std::string::npos) << csv;
}

TEST(ReportFormats, TableListsRows) {
  const std::string table = format_report_table(table1_report());
  EXPECT_NE(table.find("BIGLSTM baseline"), std::string::npos);
  EXPECT_NE(table.find("151060480"), std::string::npos);
  EXPECT_NE(table.find("42008576"), std::string::npos);
}

}  // namespace
}  // namespace rnnlab
