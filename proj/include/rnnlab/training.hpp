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

#ifndef RNNLAB_TRAINING_HPP_
#define RNNLAB_TRAINING_HPP_

#include "rnnlab/model.hpp"
#include "rnnlab/optim.hpp"

namespace rnnlab {

struct TrainStepOptions {
  double clip_norm = 1.0;  // <= 0 disables clipping
  ExecutionOptions execution;
};

struct TrainStepResult {
  double loss = 0.0;       // mean NLL of the batch before the update
  double grad_norm = 0.0;  // global norm before clipping
};

/// forward -> loss -> truncated BPTT -> clip -> Adagrad. `state` is the
/// carried recurrent state: read as the initial state and replaced by the
/// final state of the window.
///
/// The optimized objective is the window NLL summed over time and averaged
/// over the batch, i.e. T times the reported mean. With a per-token mean the
/// gradients sit far below sqrt(initial_accumulator) and Adagrad barely moves.
template <typename Scalar>
TrainStepResult train_step(LanguageModel<Scalar>& model,
                           AdagradState<Scalar>& optimizer,
                           const BatchSequence& batch,
                           ModelState<Scalar>& state,
                           const TrainStepOptions& options = {});

}  // namespace rnnlab

#endif  // RNNLAB_TRAINING_HPP_
