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


#include "rnnlab/corpus.hpp"

#include <gtest/gtest.h>

#include "rnnlab/config.hpp"
#include "test_support.hpp"

namespace rnnlab {
namespace {

TEST(BuildVocab, WordModeIds) {
  const Vocabulary v = build_vocab("a a b", TokenMode::kWord, 10);
  EXPECT_EQ(v.size(), 4);
  EXPECT_EQ(v.id("<unk>"), Vocabulary::kUnk);
  EXPECT_EQ(v.id("<eos>"), Vocabulary::kEos);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), 3);
  EXPECT_EQ(v.token(2), "a");
}

TEST(BuildVocab, SizeLimitMapsRareTokensToUnk) {
  const Vocabulary v = build_vocab("a a b", TokenMode::kWord, 3);
  EXPECT_EQ(v.size(), 3);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), Vocabulary::kUnk);
  EXPECT_EQ(v.id("never seen"), Vocabulary::kUnk);
}

TEST(BuildVocab, TiesBrokenLexicographically) {
  const Vocabulary v = build_vocab("b a", TokenMode::kWord, 10);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), 3);
  const Vocabulary w = build_vocab("c b c a b a\nz", TokenMode::kWord, 10);
  EXPECT_EQ(w.tokens(),
            (std::vector<std::string>{"<unk>", "<eos>", "a", "b", "c", "z"}));
}

TEST(BuildVocab, CharModeUsesScalarValues) {
  const Vocabulary v = build_vocab("h\xc3\xa9h\n\xe2\x82\xac", TokenMode::kChar, 10);
  // "h" x2, "é" x1, "€" x1; the two singletons tie and sort by bytes.
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"<unk>", "<eos>", "h",
                                                  "\xc3\xa9", "\xe2\x82\xac"}));
  EXPECT_EQ(tokenize_line("a b", TokenMode::kChar),
            (std::vector<std::string>{"a", " ", "b"}));
}

TEST(BuildVocab, InvalidUtf8IsDataError) {
  EXPECT_THROW(build_vocab("ok\xff", TokenMode::kChar, 10), DataError);
  EXPECT_THROW(build_vocab("\xc3", TokenMode::kChar, 10), DataError);
  EXPECT_THROW(build_vocab("\xc0\xaf", TokenMode::kChar, 10), DataError);  // overlong
  EXPECT_THROW(build_vocab("\xed\xa0\x80", TokenMode::kChar, 10), DataError);  // surrogate
}

TEST(BuildVocab, EmptyCorpusIsDataError) {
  EXPECT_THROW(build_vocab("", TokenMode::kWord, 10), DataError);
  EXPECT_THROW(build_vocab(" \n\t\n", TokenMode::kChar, 10), DataError);
  EXPECT_THROW(build_vocab("a", TokenMode::kWord, 2), ConfigError);
}

TEST(BuildVocab, PureFunctionOfInputs) {
  const std::string text = "the cat\nthe dog  sat\r\nthe end\n";
  EXPECT_EQ(build_vocab(text, TokenMode::kWord, 5), build_vocab(text, TokenMode::kWord, 5));
  EXPECT_EQ(build_vocab(text, TokenMode::kChar, 50), build_vocab(text, TokenMode::kChar, 50));
}

TEST(ReadTextFile, MissingFileIsIoError) {
  try {
    read_text_file("/nonexistent/corpus.txt");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.code(), ExitCode::kData);
  }
}

TEST(Corpus, LinesAndStream) {
  const std::string text = "a b\r\n\n  \nb c\n";
  const auto lines = split_lines(text);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "a b");
  EXPECT_EQ(lines[1], "b c");
  const Vocabulary v = build_vocab(text, TokenMode::kWord, 10);
  const auto stream = encode_stream(v, lines, TokenMode::kWord);
  const std::int32_t a = v.id("a"), b = v.id("b"), c = v.id("c");
  EXPECT_EQ(stream, (std::vector<std::int32_t>{a, b, Vocabulary::kEos, b, c,
                                               Vocabulary::kEos}));
}

TEST(Corpus, HeldOutSplitTakesLastLines) {
  const std::string text = "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n";
  const auto split = split_heldout(text, 0.25);
  ASSERT_EQ(split.train.size(), 7u);
  ASSERT_EQ(split.heldout.size(), 3u);
  EXPECT_EQ(split.heldout.front(), "8");
  EXPECT_EQ(split_heldout(text, 0.0).heldout.size(), 0u);
  EXPECT_EQ(split_heldout("one line", 0.5).train.size(), 1u);
  EXPECT_THROW(split_heldout(text, 1.0), ConfigError);
}

TEST(StreamBatcher, WindowsOverlapByOneAndWrap) {
  std::vector<std::int32_t> stream(23);
  for (int i = 0; i < 23; ++i) stream[i] = i;
  StreamBatcher batcher(stream, 2, 3);  // segments of 11: [0,11) and [11,22)
  EXPECT_EQ(batcher.segment_length(), 11);
  const auto w0 = batcher.next();
  EXPECT_FALSE(w0.reset);
  EXPECT_EQ(w0.batch.tokens.row(0), (TokenGrid(1, 4) << 0, 1, 2, 3).finished());
  EXPECT_EQ(w0.batch.tokens.row(1), (TokenGrid(1, 4) << 11, 12, 13, 14).finished());
  const auto w1 = batcher.next();
  EXPECT_EQ(w1.batch.tokens(0, 0), 3);  // last target becomes first input
  batcher.next();                        // cursor 6 -> 9
  EXPECT_EQ(batcher.cursor(), 9);
  const auto w3 = batcher.next();  // 9 + 4 > 11: wraps
  EXPECT_TRUE(w3.reset);
  EXPECT_EQ(w3.batch.tokens(0, 0), 0);
  EXPECT_EQ(w3.batch.tokens(1, 0), 11);
}

TEST(StreamBatcher, SeekRestoresPosition) {
  std::vector<std::int32_t> stream(100);
  for (int i = 0; i < 100; ++i) stream[i] = i;
  StreamBatcher a(stream, 4, 5), b(stream, 4, 5);
  for (int i = 0; i < 7; ++i) a.next();
  b.seek(a.cursor());
  for (int i = 0; i < 5; ++i) {
    const auto wa = a.next();
    const auto wb = b.next();
    EXPECT_EQ(wa.batch.tokens, wb.batch.tokens);
    EXPECT_EQ(wa.reset, wb.reset);
  }
  EXPECT_THROW(b.seek(26), IndexError);
}

TEST(StreamBatcher, TooShortStreamIsDataError) {
  EXPECT_THROW(StreamBatcher(std::vector<std::int32_t>(10, 0), 4, 3), DataError);
}

TEST(RunConfig, DefaultsFromEmptyObject) {
  const RunConfig c = parse_run_config("{}");
  ASSERT_EQ(c.model.layers.size(), 1u);
  EXPECT_EQ(c.model.layers[0], CellConfig::dense(64, 256));
  EXPECT_EQ(c.optimizer.adagrad.learning_rate, 0.2);
  EXPECT_EQ(c.optimizer.adagrad.initial_accumulator, 0.1);
  EXPECT_EQ(c.optimizer.adagrad.epsilon, 1e-10);
  EXPECT_EQ(c.optimizer.clip_norm, 1.0);
  EXPECT_EQ(c.data.mode, TokenMode::kChar);
  EXPECT_EQ(c.run.threads, 1);
}

TEST(RunConfig, ParsesAllSections) {
  const RunConfig c = parse_run_config(R"({
    "model": {"layers": [{"variant": "grouped", "input_dim": 8, "cell_dim": 16, "groups": 2},
                         {"variant": "factorized", "input_dim": 8, "cell_dim": 16, "rank": 3}],
              "unroll_length": 5, "batch_size": 2, "precision": "double"},
    "optimizer": {"lr": 0.5, "clip_norm": 0, "initial_accumulator": 0.2, "epsilon": 1e-8},
    "data": {"corpus": "x.txt", "mode": "word", "max_vocab": 50, "heldout_fraction": 0.2},
    "run": {"steps": 7, "seed": 9, "eval_interval": 2, "checkpoint_path": "c.flm",
            "checkpoint_interval": 3, "metrics_path": "m.csv", "threads": 2}})");
  EXPECT_EQ(c.model.layers[0], CellConfig::grouped(8, 16, 2));
  EXPECT_EQ(c.model.layers[1], CellConfig::factorized(8, 16, 3));
  EXPECT_EQ(c.model.precision, Precision::kDouble);
  EXPECT_EQ(c.optimizer.adagrad.learning_rate, 0.5);
  EXPECT_EQ(c.optimizer.clip_norm, 0.0);
  EXPECT_EQ(c.data.mode, TokenMode::kWord);
  EXPECT_EQ(c.run.seed, 9u);
  EXPECT_EQ(c.run.checkpoint_interval, 3);
  EXPECT_EQ(parse_run_config(dump_run_config(c)).model.layers, c.model.layers);
  EXPECT_EQ(dump_run_config(parse_run_config(dump_run_config(c))), dump_run_config(c));
}

TEST(RunConfig, UnknownKeysRejected) {
  EXPECT_THROW(parse_run_config(R"({"modle": {}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"optimizer": {"learning_rate": 0.2}})"), ConfigError);
  EXPECT_THROW(parse_run_config(
                   R"({"model": {"layers": [{"variant": "dense", "input_dim": 4,
                                             "cell_dim": 8, "group": 2}]}})"),
               ConfigError);
  try {
    parse_run_config(R"({"run": {"step": 5}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("run.step"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, BadValuesRejected) {
  EXPECT_THROW(parse_run_config("not json"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"run": {"steps": "many"}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"run": {"steps": -1}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"run": {"seed": -1}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"run": {"eval_interval": 0}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"optimizer": {"lr": 0}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"data": {"mode": "byte"}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"model": {"precision": "half"}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"model": {"layers": []}})"), ConfigError);
  // Structural violations surface before any training.
  EXPECT_THROW(parse_run_config(R"({"model": {"layers": [{"variant": "grouped",
      "input_dim": 6, "cell_dim": 12, "groups": 4}]}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"model": {"layers": [{"variant": "factorized",
      "input_dim": 4, "cell_dim": 8}]}})"), ConfigError);
}

TEST(RunConfig, RelativeCorpusResolvedAgainstConfigDirectory) {
  testing::TempDir dir;
  std::filesystem::create_directories(dir.path() / "cfg");
  testing::write_text(dir / "cfg/run.json", R"({"data": {"corpus": "../text.txt"}})");
  const RunConfig c = load_run_config(dir / "cfg/run.json");
  EXPECT_EQ(std::filesystem::path(c.data.corpus),
            (dir.path() / "text.txt").lexically_normal());
  EXPECT_THROW(load_run_config(dir / "missing.json"), IoError);
}

}  // namespace
}  // namespace rnnlab
