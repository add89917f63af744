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

// FLM1 checkpoint files.
//
//   bytes 0..3   "FLM1"
//   bytes 4..7   format version, uint32 little-endian
//   bytes 8..15  manifest length in bytes, uint64 little-endian
//   manifest     JSON: dtype, model config, caller metadata, and one entry
//                {name, shape, dtype, offset} per tensor; offsets count
//                from the first byte after the manifest
//   payload      raw little-endian IEEE-754 tensor data in manifest order
//
// Tensors are "model/<name>", "adagrad/<name>" and "state/<l>/h|c".

#ifndef RNNLAB_CHECKPOINT_HPP_
#define RNNLAB_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "rnnlab/model.hpp"
#include "rnnlab/optim.hpp"

namespace rnnlab {

inline constexpr char kCheckpointMagic[4] = {'F', 'L', 'M', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename Scalar>
struct Checkpoint {
  LanguageModel<Scalar> model;
  AdagradState<Scalar> optimizer;
  ModelState<Scalar> state;  // carried recurrent state, batch columns
  std::string metadata = "{}";  // JSON object, stored verbatim
};

/// Writes to a sibling temporary file and renames it into place, so an
/// interrupted save never leaves a half-written checkpoint at `path`.
template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint<Scalar>& checkpoint);

/// Loads a checkpoint that must match `expected` exactly: every tensor
/// present with the shape the config implies and the dtype of Scalar.
/// CheckpointError on bad magic or version, truncation, malformed manifest,
/// or a mismatch (the message names the tensor). Nothing is returned unless
/// the whole file validated.
template <typename Scalar>
Checkpoint<Scalar> load_checkpoint(const std::filesystem::path& path,
                                   const ModelConfig& expected);

/// The manifest's JSON text, for inspection tools.
std::string read_checkpoint_manifest(const std::filesystem::path& path);

}  // namespace rnnlab

#endif  // RNNLAB_CHECKPOINT_HPP_
