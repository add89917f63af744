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

// Projected LSTM cells with three parameterizations of the gate transform:
//
//   Dense       z = W [x; h] + b                      W: 4n x 2p
//   Factorized  z = W2 (W1 [x; h]) + b                W1: r x 2p, W2: 4n x r
//   Grouped     z^j = W_j [x^j; h^j] + b^j, j=1..k    W_j: (4n/k) x (2p/k)
//
// followed in every case by
//
//   i, f, o = sigmoid(z_i, z_f, z_o),  g = tanh(z_g)
//   c' = f * c + i * g
//   h' = P (o * tanh(c'))                             P: p x n
//
// Gate rows are laid out [i; f; o; g], n rows each. Under grouping each of
// those four blocks is the concatenation of the k group slices in group
// order, so gate row q*n + j*(n/k) + m belongs to gate q, group j. The
// projection P is shared by all groups and the bias is full length 4n.
//
// All functions operate on a batch: x is p x B and the state holds B
// columns. Each column is computed exactly as it would be alone.

#ifndef RNNLAB_CELLS_HPP_
#define RNNLAB_CELLS_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rnnlab/numerics.hpp"
#include "rnnlab/rng.hpp"
#include "rnnlab/tensor.hpp"

namespace rnnlab {

struct Dense {
  bool operator==(const Dense&) const = default;
};
struct Factorized {
  Index rank = 0;
  bool operator==(const Factorized&) const = default;
};
struct Grouped {
  Index groups = 1;
  bool operator==(const Grouped&) const = default;
};

using CellVariant = std::variant<Dense, Factorized, Grouped>;

enum class CellKind { kDense, kFactorized, kGrouped };

std::string to_string(CellKind kind);

struct CellConfig {
  Index input_dim = 0;  // p: input and projected output width
  Index cell_dim = 0;   // n: memory width
  CellVariant variant = Dense{};

  static CellConfig dense(Index p, Index n) { return {p, n, Dense{}}; }
  static CellConfig factorized(Index p, Index n, Index rank) {
    return {p, n, Factorized{rank}};
  }
  static CellConfig grouped(Index p, Index n, Index groups) {
    return {p, n, Grouped{groups}};
  }

  CellKind kind() const { return static_cast<CellKind>(variant.index()); }

  // Throws ConfigError naming the violated constraint: p, n >= 1, p <= n,
  // 1 <= r < p, k >= 1 dividing both p and n.
  void validate() const;

  // Short human-readable tag such as "dense", "F32" or "G4".
  std::string tag() const;

  bool operator==(const CellConfig&) const = default;
};

template <typename Scalar>
struct DenseWeights {
  Matrix<Scalar> w;  // 4n x 2p
};

template <typename Scalar>
struct FactorizedWeights {
  Matrix<Scalar> w1;  // r x 2p
  Matrix<Scalar> w2;  // 4n x r
};

template <typename Scalar>
struct GroupedWeights {
  std::vector<Matrix<Scalar>> blocks;  // k blocks, (4n/k) x (2p/k)
};

template <typename Scalar>
struct CellParams {
  std::variant<DenseWeights<Scalar>, FactorizedWeights<Scalar>,
               GroupedWeights<Scalar>>
      weights;
  Vector<Scalar> bias;        // 4n
  Matrix<Scalar> projection;  // p x n

  Index input_dim() const { return projection.rows(); }
  Index cell_dim() const { return projection.cols(); }
  CellKind kind() const { return static_cast<CellKind>(weights.index()); }

  // The configuration implied by the array shapes. Shapes are checked for
  // mutual consistency; the rank bound r < p is not enforced here.
  CellConfig config() const;

  // Same shapes, all zeros. Used as a gradient accumulator.
  CellParams zeros_like() const;

  // Arrays in canonical order: weights (W | W1, W2 | W_g0..W_g{k-1}), b, P.
  TensorList<Scalar> tensors(const std::string& prefix);
  TensorList<const Scalar> tensors(const std::string& prefix) const;

  std::int64_t scalar_count() const;
};

template <typename Scalar>
struct LSTMState {
  Matrix<Scalar> h;  // p x B
  Matrix<Scalar> c;  // n x B

  static LSTMState zeros(Index p, Index n, Index batch = 1) {
    return {Matrix<Scalar>::Zero(p, batch), Matrix<Scalar>::Zero(n, batch)};
  }
};

template <typename Scalar>
struct GateBundle {
  Matrix<Scalar> pre_activation;  // 4n x B, layout [i; f; o; g]
  Matrix<Scalar> activation;      // same layout after sigmoid/tanh

  Index cell_dim() const { return activation.rows() / 4; }
  auto i() const { return activation.topRows(cell_dim()); }
  auto f() const { return activation.middleRows(cell_dim(), cell_dim()); }
  auto o() const { return activation.middleRows(2 * cell_dim(), cell_dim()); }
  auto g() const { return activation.bottomRows(cell_dim()); }
};

// Everything the backward pass needs from one forward step.
template <typename Scalar>
struct StepCache {
  CellKind kind = CellKind::kDense;
  Matrix<Scalar> x;       // p x B
  Matrix<Scalar> h_prev;  // p x B
  Matrix<Scalar> c_prev;  // n x B
  GateBundle<Scalar> gates;
  Matrix<Scalar> c;            // n x B
  Matrix<Scalar> tanh_c;       // n x B
  Matrix<Scalar> projected_in;  // o * tanh(c), n x B
  Matrix<Scalar> factor;       // W1 [x; h], r x B (Factorized only)
};

template <typename Scalar>
struct StepOutput {
  LSTMState<Scalar> state;
  StepCache<Scalar> cache;
};

// Worker count for the per-group loops of the grouped cell. Groups are
// independent, so results are identical for every value.
struct ExecutionOptions {
  int threads = 1;
};

template <typename Scalar>
CellParams<Scalar> init_params(const CellConfig& config, Rng& rng);

/// Weights i.i.d. uniform on [-0.05, 0.05], biases zero.
template <typename Scalar>
CellParams<Scalar> init_params(const CellConfig& config, std::uint64_t seed);

template <typename Scalar>
StepOutput<Scalar> lstmp_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev);

template <typename Scalar>
StepOutput<Scalar> flstm_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev);

template <typename Scalar>
StepOutput<Scalar> glstm_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev,
                                 const ExecutionOptions& options = {});

/// Dispatches on the parameter variant.
template <typename Scalar>
StepOutput<Scalar> cell_forward(const CellParams<Scalar>& params,
                                const Matrix<Scalar>& x,
                                const LSTMState<Scalar>& prev,
                                const ExecutionOptions& options = {});

template <typename Scalar>
struct StepGradients {
  Matrix<Scalar> grad_x;            // p x B
  LSTMState<Scalar> grad_prev;      // d/dh_prev, d/dc_prev
};

/// Adds this step's parameter gradients into `grads` (which must have the
/// shapes of `params`) and returns the input and previous-state gradients.
template <typename Scalar>
StepGradients<Scalar> cell_backward_accumulate(
    const CellParams<Scalar>& params, const StepCache<Scalar>& cache,
    const Matrix<Scalar>& grad_h, const Matrix<Scalar>& grad_c,
    CellParams<Scalar>& grads, const ExecutionOptions& options = {});

template <typename Scalar>
struct CellBackward {
  CellParams<Scalar> param_grads;
  Matrix<Scalar> grad_x;
  LSTMState<Scalar> grad_prev;
};

template <typename Scalar>
CellBackward<Scalar> cell_backward(const CellParams<Scalar>& params,
                                   const StepCache<Scalar>& cache,
                                   const Matrix<Scalar>& grad_h,
                                   const Matrix<Scalar>& grad_c);

/// Closed-form parameter count of one layer:
///   gate weights  Dense 8np, Factorized 2pr + 4nr, Grouped 8np/k
///   bias          4n   (optional)
///   projection    np   (optional)
std::int64_t param_count(const CellConfig& config, bool include_projection,
                         bool include_bias);

}  // namespace rnnlab

#endif  // RNNLAB_CELLS_HPP_
