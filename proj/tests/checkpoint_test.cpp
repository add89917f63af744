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

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "test_support.hpp"

namespace rnnlab {
namespace {

ModelConfig small_config(Index cell_dim = 8) {
  ModelConfig c;
  c.vocab_size = 7;
  c.layers = {CellConfig::grouped(4, cell_dim, 2), CellConfig::factorized(4, cell_dim, 3)};
  c.unroll_length = 3;
  c.batch_size = 2;
  return c;
}

// A checkpoint whose every tensor holds distinct, non-default values.
template <typename Scalar>
Checkpoint<Scalar> populated(const ModelConfig& config) {
  Checkpoint<Scalar> ck{LanguageModel<Scalar>::init(config, 3),
                        AdagradState<Scalar>::init(
                            LanguageModel<Scalar>::init(config, 3), AdagradOptions{}),
                        zero_state<Scalar>(config, config.batch_size),
                        R"({"step": 12, "note": "x"})"};
  Rng rng(5);
  for (const auto& t : ck.optimizer.accumulators.tensors()) {
    for (Scalar& v : t.values()) v = static_cast<Scalar>(rng.uniform(0.1, 2.0));
  }
  for (LSTMState<Scalar>& s : ck.state) {
    s.h = testing::random_matrix<Scalar>(s.h.rows(), s.h.cols(), rng);
    s.c = testing::random_matrix<Scalar>(s.c.rows(), s.c.cols(), rng);
  }
  return ck;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

template <typename Scalar>
void expect_round_trip() {
  testing::TempDir dir;
  const ModelConfig config = small_config();
  const Checkpoint<Scalar> saved = populated<Scalar>(config);
  save_checkpoint(dir / "a.flm", saved);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.flm.tmp"));
  const Checkpoint<Scalar> loaded = load_checkpoint<Scalar>(dir / "a.flm", config);
  EXPECT_TRUE(testing::bitwise_equal(saved.model.tensors(), loaded.model.tensors()));
  EXPECT_TRUE(testing::bitwise_equal(saved.optimizer.accumulators.tensors(),
                                     loaded.optimizer.accumulators.tensors()));
  EXPECT_EQ(loaded.optimizer.options.learning_rate, saved.optimizer.options.learning_rate);
  EXPECT_EQ(loaded.optimizer.options.initial_accumulator,
            saved.optimizer.options.initial_accumulator);
  ASSERT_EQ(loaded.state.size(), saved.state.size());
  for (std::size_t l = 0; l < saved.state.size(); ++l) {
    EXPECT_TRUE(testing::bitwise_equal(saved.state[l].h, loaded.state[l].h));
    EXPECT_TRUE(testing::bitwise_equal(saved.state[l].c, loaded.state[l].c));
  }
  EXPECT_NE(loaded.metadata.find("\"note\""), std::string::npos);
  // Saving what was loaded reproduces the file byte for byte.
  save_checkpoint(dir / "b.flm", loaded);
  EXPECT_EQ(read_bytes(dir / "a.flm"), read_bytes(dir / "b.flm"));
}

TEST(Checkpoint, RoundTripFloatIsBitwise) { expect_round_trip<float>(); }
TEST(Checkpoint, RoundTripDoubleIsBitwise) { expect_round_trip<double>(); }

TEST(Checkpoint, TruncationAtAnyPointIsRejected) {
  testing::TempDir dir;
  const ModelConfig config = small_config();
  save_checkpoint(dir / "a.flm", populated<double>(config));
  const std::string bytes = read_bytes(dir / "a.flm");
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{6},
                          std::size_t{12}, std::size_t{40}, bytes.size() / 2,
                          bytes.size() - 8, bytes.size() - 1}) {
    testing::write_text(dir / "t.flm", bytes.substr(0, len));
    EXPECT_THROW(load_checkpoint<double>(dir / "t.flm", config), CheckpointError)
        << "length " << len;
  }
  testing::write_text(dir / "t.flm", bytes + "x");
  EXPECT_THROW(load_checkpoint<double>(dir / "t.flm", config), CheckpointError);
}

TEST(Checkpoint, BadHeaderIsRejected) {
  testing::TempDir dir;
  const ModelConfig config = small_config();
  save_checkpoint(dir / "a.flm", populated<double>(config));
  std::string bytes = read_bytes(dir / "a.flm");
  std::string bad_magic = bytes;
  bad_magic[3] = '2';
  testing::write_text(dir / "m.flm", bad_magic);
  EXPECT_THROW(load_checkpoint<double>(dir / "m.flm", config), CheckpointError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  testing::write_text(dir / "v.flm", bad_version);
  EXPECT_THROW(load_checkpoint<double>(dir / "v.flm", config), CheckpointError);
  EXPECT_THROW(load_checkpoint<double>(dir / "absent.flm", config), IoError);
  EXPECT_THROW(read_checkpoint_manifest(dir / "m.flm"), CheckpointError);
}

TEST(Checkpoint, ShapeMismatchNamesTensor) {
  testing::TempDir dir;
  save_checkpoint(dir / "a.flm", populated<double>(small_config(8)));
  try {
    load_checkpoint<double>(dir / "a.flm", small_config(12));
    FAIL() << "loaded a checkpoint with the wrong cell size";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("model/layers.0."), std::string::npos)
        << e.what();
    EXPECT_EQ(e.code(), ExitCode::kData);
  }
}

TEST(Checkpoint, DtypeMismatchIsRejected) {
  testing::TempDir dir;
  const ModelConfig config = small_config();
  save_checkpoint(dir / "a.flm", populated<float>(config));
  EXPECT_THROW(load_checkpoint<double>(dir / "a.flm", config), CheckpointError);
}

TEST(Checkpoint, ManifestListsTensorsInOrder) {
  testing::TempDir dir;
  const ModelConfig config = small_config();
  save_checkpoint(dir / "a.flm", populated<float>(config));
  const std::string manifest = read_checkpoint_manifest(dir / "a.flm");
  const auto embedding = manifest.find("\"model/embedding\"");
  const auto acc = manifest.find("\"adagrad/embedding\"");
  const auto state = manifest.find("\"state/1/c\"");
  ASSERT_NE(embedding, std::string::npos);
  ASSERT_NE(acc, std::string::npos);
  ASSERT_NE(state, std::string::npos);
  EXPECT_LT(embedding, acc);
  EXPECT_LT(acc, state);
  EXPECT_NE(manifest.find("\"f32\""), std::string::npos);
}

}  // namespace
}  // namespace rnnlab
