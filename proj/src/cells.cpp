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

#include "rnnlab/cells.hpp"

#include <sstream>
#include <type_traits>

#include "rnnlab/parallel.hpp"

namespace rnnlab {

namespace {

constexpr double kInitRange = 0.05;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename Scalar>
void fill_uniform(Matrix<Scalar>& m, Rng& rng) {
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(rng.uniform(-kInitRange, kInitRange));
  }
}

void expect_shape(const std::string& name, Index rows, Index cols,
                  Index want_rows, Index want_cols) {
  if (rows != want_rows || cols != want_cols) {
    throw ShapeError("cell parameter " + name + " is " +
                     shape_string(rows, cols) + ", expected " +
                     shape_string(want_rows, want_cols));
  }
}

template <typename Scalar>
void check_step_inputs(const char* who, const CellParams<Scalar>& params,
                       const Matrix<Scalar>& x, const LSTMState<Scalar>& prev) {
  const Index p = params.input_dim();
  const Index n = params.cell_dim();
  const Index batch = x.cols();
  if (x.rows() != p || prev.h.rows() != p || prev.h.cols() != batch ||
      prev.c.rows() != n || prev.c.cols() != batch) {
    throw ShapeError(std::string(who) + ": x (" + shape_string(x) +
                     "), h_prev (" + shape_string(prev.h) + "), c_prev (" +
                     shape_string(prev.c) + ") do not match p=" +
                     std::to_string(p) + ", n=" + std::to_string(n));
  }
  if (!x.allFinite() || !prev.h.allFinite() || !prev.c.allFinite()) {
    throw NumericError(std::string(who) + ": non-finite input or state");
  }
}

// z += W[:, :p] x + W[:, p:] h for a row block of a weight matrix whose
// first `p` columns act on x and next `p` columns act on h.
template <typename Scalar>
void accumulate_split_product(Index rows, Index p, Index batch,
                              const Scalar* w, Index ldw, const Scalar* x,
                              const Scalar* h, Scalar* z) {
  kernels::gemm_nn(rows, batch, p, w, ldw, x, batch, z, batch);
  kernels::gemm_nn(rows, batch, p, w + p, ldw, h, batch, z, batch);
}

template <typename Scalar>
Matrix<Scalar> dense_preactivation(const DenseWeights<Scalar>& dw, Index p,
                                   Index n, const Matrix<Scalar>& x,
                                   const Matrix<Scalar>& h) {
  const Index batch = x.cols();
  Matrix<Scalar> z = Matrix<Scalar>::Zero(4 * n, batch);
  accumulate_split_product(4 * n, p, batch, dw.w.data(), 2 * p, x.data(),
                           h.data(), z.data());
  return z;
}

template <typename Scalar>
Matrix<Scalar> grouped_preactivation(const GroupedWeights<Scalar>& gw, Index p,
                                     Index n, const Matrix<Scalar>& x,
                                     const Matrix<Scalar>& h,
                                     const ExecutionOptions& options) {
  const Index batch = x.cols();
  const Index k = static_cast<Index>(gw.blocks.size());
  const Index pk = p / k;
  const Index nk = n / k;
  Matrix<Scalar> z = Matrix<Scalar>::Zero(4 * n, batch);
  parallel_for(static_cast<int>(k), options.threads, [&](int jj) {
    const Index j = jj;
    const Matrix<Scalar>& block = gw.blocks[j];
    const Scalar* xj = x.data() + j * pk * batch;
    const Scalar* hj = h.data() + j * pk * batch;
    for (Index q = 0; q < 4; ++q) {
      accumulate_split_product(nk, pk, batch, block.data() + q * nk * 2 * pk,
                               2 * pk, xj, hj,
                               z.data() + (q * n + j * nk) * batch);
    }
  });
  return z;
}

// Gates, memory update and projection shared by every variant. `z` holds the
// gate pre-activations without bias.
template <typename Scalar>
StepOutput<Scalar> finish_step(const CellParams<Scalar>& params,
                               const Matrix<Scalar>& x,
                               const LSTMState<Scalar>& prev,
                               Matrix<Scalar> z) {
  const Index n = params.cell_dim();
  const Index p = params.input_dim();
  const Index batch = x.cols();
  for (Index r = 0; r < 4 * n; ++r) {
    const Scalar b = params.bias(r);
    Scalar* row = z.data() + r * batch;
    for (Index col = 0; col < batch; ++col) row[col] += b;
  }

  StepOutput<Scalar> out;
  StepCache<Scalar>& cache = out.cache;
  cache.kind = params.kind();
  cache.x = x;
  cache.h_prev = prev.h;
  cache.c_prev = prev.c;
  cache.gates.activation.resize(4 * n, batch);
  for (Index r = 0; r < 3 * n; ++r) {
    for (Index col = 0; col < batch; ++col) {
      cache.gates.activation(r, col) = sigmoid(z(r, col));
    }
  }
  for (Index r = 3 * n; r < 4 * n; ++r) {
    for (Index col = 0; col < batch; ++col) {
      cache.gates.activation(r, col) = rnnlab::tanh(z(r, col));
    }
  }
  cache.gates.pre_activation = std::move(z);

  const auto& act = cache.gates.activation;
  cache.c.resize(n, batch);
  cache.tanh_c.resize(n, batch);
  cache.projected_in.resize(n, batch);
  for (Index r = 0; r < n; ++r) {
    for (Index col = 0; col < batch; ++col) {
      const Scalar i = act(r, col);
      const Scalar f = act(n + r, col);
      const Scalar o = act(2 * n + r, col);
      const Scalar g = act(3 * n + r, col);
      const Scalar c = f * prev.c(r, col) + i * g;
      const Scalar tc = rnnlab::tanh(c);
      cache.c(r, col) = c;
      cache.tanh_c(r, col) = tc;
      cache.projected_in(r, col) = o * tc;
    }
  }

  out.state.c = cache.c;
  out.state.h = Matrix<Scalar>::Zero(p, batch);
  kernels::gemm_nn(p, batch, n, params.projection.data(), n,
                   cache.projected_in.data(), batch, out.state.h.data(),
                   batch);
  return out;
}

template <typename Scalar>
const char* variant_name(CellKind kind) {
  switch (kind) {
    case CellKind::kDense:
      return "dense";
    case CellKind::kFactorized:
      return "factorized";
    case CellKind::kGrouped:
      return "grouped";
  }
  return "?";
}

template <typename Scalar>
void require_kind(const char* who, const CellParams<Scalar>& params,
                  CellKind want) {
  if (params.kind() != want) {
    throw UsageError(std::string(who) + " requires " +
                     variant_name<Scalar>(want) + " parameters, got " +
                     variant_name<Scalar>(params.kind()));
  }
}

// dz = d(loss)/d(gate pre-activation), dc_prev, given the gradient arriving
// at the projection input (dy) and at the new memory (grad_c).
template <typename Scalar>
void gate_backward(const StepCache<Scalar>& cache, const Matrix<Scalar>& dy,
                   const Matrix<Scalar>& grad_c, Matrix<Scalar>& dz,
                   Matrix<Scalar>& dc_prev) {
  const auto& act = cache.gates.activation;
  const Index n = cache.c.rows();
  const Index batch = cache.c.cols();
  dz.resize(4 * n, batch);
  dc_prev.resize(n, batch);
  for (Index r = 0; r < n; ++r) {
    for (Index col = 0; col < batch; ++col) {
      const Scalar i = act(r, col);
      const Scalar f = act(n + r, col);
      const Scalar o = act(2 * n + r, col);
      const Scalar g = act(3 * n + r, col);
      const Scalar tc = cache.tanh_c(r, col);
      const Scalar dyv = dy(r, col);
      const Scalar dc = grad_c(r, col) + dyv * o * (Scalar(1) - tc * tc);
      dz(r, col) = dc * g * i * (Scalar(1) - i);
      dz(n + r, col) = dc * cache.c_prev(r, col) * f * (Scalar(1) - f);
      dz(2 * n + r, col) = dyv * tc * o * (Scalar(1) - o);
      dz(3 * n + r, col) = dc * i * (Scalar(1) - g * g);
      dc_prev(r, col) = dc * f;
    }
  }
}

// Row block of a weight matrix acting on [x; h] (first p columns on x, next
// p on h): accumulates its gradient and the gradients of x and h.
template <typename Scalar>
void split_product_backward(Index rows, Index p, Index batch, const Scalar* w,
                            Index ldw, const Scalar* x, const Scalar* h,
                            const Scalar* dz, Scalar* dw, Scalar* dx,
                            Scalar* dh) {
  kernels::gemm_nt(rows, p, batch, dz, batch, x, batch, dw, ldw);
  kernels::gemm_nt(rows, p, batch, dz, batch, h, batch, dw + p, ldw);
  kernels::gemm_tn(p, batch, rows, w, ldw, dz, batch, dx, batch);
  kernels::gemm_tn(p, batch, rows, w + p, ldw, dz, batch, dh, batch);
}

template <typename Scalar>
void check_same_structure(const CellParams<Scalar>& params,
                          const CellParams<Scalar>& grads) {
  if (grads.kind() != params.kind() || !(grads.config() == params.config())) {
    throw UsageError("cell_backward: gradient accumulator does not match the "
                     "parameter shapes");
  }
}

}  // namespace

std::string to_string(CellKind kind) {
  return variant_name<double>(kind);
}

void CellConfig::validate() const {
  auto fail = [&](const std::string& msg) {
    throw ConfigError("invalid cell config (" + tag() + ", p=" +
                      std::to_string(input_dim) +
                      ", n=" + std::to_string(cell_dim) + "): " + msg);
  };
  if (input_dim < 1) fail("input_dim p must be positive");
  if (cell_dim < 1) fail("cell_dim n must be positive");
  if (input_dim > cell_dim) fail("projection size p must not exceed n");
  if (const auto* f = std::get_if<Factorized>(&variant)) {
    if (f->rank < 1 || f->rank >= input_dim) {
      fail("factorization rank r must satisfy 1 <= r < p, got r=" +
           std::to_string(f->rank));
    }
  }
  if (const auto* g = std::get_if<Grouped>(&variant)) {
    if (g->groups < 1) fail("group count k must be at least 1");
    if (input_dim % g->groups != 0) {
      fail("group count k=" + std::to_string(g->groups) +
           " must divide p=" + std::to_string(input_dim));
    }
    if (cell_dim % g->groups != 0) {
      fail("group count k=" + std::to_string(g->groups) +
           " must divide n=" + std::to_string(cell_dim));
    }
  }
}

std::string CellConfig::tag() const {
  return std::visit(
      Overloaded{
          [](const Dense&) { return std::string("LSTMP"); },
          [](const Factorized& f) { return "F" + std::to_string(f.rank); },
          [](const Grouped& g) { return "G" + std::to_string(g.groups); }},
      variant);
}

template <typename Scalar>
CellConfig CellParams<Scalar>::config() const {
  const Index p = input_dim();
  const Index n = cell_dim();
  expect_shape("b", bias.rows(), bias.cols(), 4 * n, 1);
  return std::visit(
      Overloaded{
          [&](const DenseWeights<Scalar>& d) {
            expect_shape("W", d.w.rows(), d.w.cols(), 4 * n, 2 * p);
            return CellConfig::dense(p, n);
          },
          [&](const FactorizedWeights<Scalar>& f) {
            const Index r = f.w1.rows();
            expect_shape("W1", f.w1.rows(), f.w1.cols(), r, 2 * p);
            expect_shape("W2", f.w2.rows(), f.w2.cols(), 4 * n, r);
            return CellConfig::factorized(p, n, r);
          },
          [&](const GroupedWeights<Scalar>& g) {
            const Index k = static_cast<Index>(g.blocks.size());
            if (k < 1 || p % k != 0 || n % k != 0) {
              throw ShapeError("grouped cell with " + std::to_string(k) +
                               " blocks cannot partition p=" +
                               std::to_string(p) + ", n=" + std::to_string(n));
            }
            for (Index j = 0; j < k; ++j) {
              expect_shape("W_g" + std::to_string(j), g.blocks[j].rows(),
                           g.blocks[j].cols(), 4 * n / k, 2 * p / k);
            }
            return CellConfig::grouped(p, n, k);
          }},
      weights);
}

template <typename Scalar>
CellParams<Scalar> CellParams<Scalar>::zeros_like() const {
  CellParams out;
  out.weights = std::visit(
      Overloaded{
          [](const DenseWeights<Scalar>& d) -> decltype(weights) {
            return DenseWeights<Scalar>{
                Matrix<Scalar>::Zero(d.w.rows(), d.w.cols())};
          },
          [](const FactorizedWeights<Scalar>& f) -> decltype(weights) {
            return FactorizedWeights<Scalar>{
                Matrix<Scalar>::Zero(f.w1.rows(), f.w1.cols()),
                Matrix<Scalar>::Zero(f.w2.rows(), f.w2.cols())};
          },
          [](const GroupedWeights<Scalar>& g) -> decltype(weights) {
            GroupedWeights<Scalar> z;
            for (const auto& b : g.blocks) {
              z.blocks.push_back(Matrix<Scalar>::Zero(b.rows(), b.cols()));
            }
            return z;
          }},
      weights);
  out.bias = Vector<Scalar>::Zero(bias.size());
  out.projection = Matrix<Scalar>::Zero(projection.rows(), projection.cols());
  return out;
}

namespace {

template <typename Params>
auto collect_tensors(Params& params, const std::string& prefix) {
  using View = decltype(make_view(std::string(), params.projection));
  std::vector<View> out;
  std::visit(
      [&](auto& w) {
        if constexpr (requires { w.blocks; }) {
          for (std::size_t j = 0; j < w.blocks.size(); ++j) {
            out.push_back(
                make_view(prefix + "W_g" + std::to_string(j), w.blocks[j]));
          }
        } else if constexpr (requires { w.w1; }) {
          out.push_back(make_view(prefix + "W1", w.w1));
          out.push_back(make_view(prefix + "W2", w.w2));
        } else {
          out.push_back(make_view(prefix + "W", w.w));
        }
      },
      params.weights);
  out.push_back(make_view(prefix + "b", params.bias));
  out.push_back(make_view(prefix + "P", params.projection));
  return out;
}

}  // namespace

template <typename Scalar>
TensorList<Scalar> CellParams<Scalar>::tensors(const std::string& prefix) {
  return collect_tensors(*this, prefix);
}

template <typename Scalar>
TensorList<const Scalar> CellParams<Scalar>::tensors(
    const std::string& prefix) const {
  return collect_tensors(*this, prefix);
}

template <typename Scalar>
std::int64_t CellParams<Scalar>::scalar_count() const {
  std::int64_t total = 0;
  for (const auto& t : tensors("")) total += t.size();
  return total;
}

template <typename Scalar>
CellParams<Scalar> init_params(const CellConfig& config, Rng& rng) {
  config.validate();
  const Index p = config.input_dim;
  const Index n = config.cell_dim;
  CellParams<Scalar> params;
  std::visit(
      Overloaded{
          [&](const Dense&) {
            DenseWeights<Scalar> d{Matrix<Scalar>(4 * n, 2 * p)};
            fill_uniform(d.w, rng);
            params.weights = std::move(d);
          },
          [&](const Factorized& f) {
            FactorizedWeights<Scalar> fw{Matrix<Scalar>(f.rank, 2 * p),
                                         Matrix<Scalar>(4 * n, f.rank)};
            fill_uniform(fw.w1, rng);
            fill_uniform(fw.w2, rng);
            params.weights = std::move(fw);
          },
          [&](const Grouped& g) {
            GroupedWeights<Scalar> gw;
            for (Index j = 0; j < g.groups; ++j) {
              gw.blocks.emplace_back(4 * n / g.groups, 2 * p / g.groups);
              fill_uniform(gw.blocks.back(), rng);
            }
            params.weights = std::move(gw);
          }},
      config.variant);
  params.bias = Vector<Scalar>::Zero(4 * n);
  params.projection.resize(p, n);
  fill_uniform(params.projection, rng);
  return params;
}

template <typename Scalar>
CellParams<Scalar> init_params(const CellConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return init_params<Scalar>(config, rng);
}

template <typename Scalar>
StepOutput<Scalar> lstmp_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev) {
  require_kind("lstmp_forward", params, CellKind::kDense);
  params.config();
  check_step_inputs("lstmp_forward", params, x, prev);
  const auto& dw = std::get<DenseWeights<Scalar>>(params.weights);
  return finish_step(params, x, prev,
                     dense_preactivation(dw, params.input_dim(),
                                         params.cell_dim(), x, prev.h));
}

template <typename Scalar>
StepOutput<Scalar> flstm_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev) {
  require_kind("flstm_forward", params, CellKind::kFactorized);
  params.config();
  check_step_inputs("flstm_forward", params, x, prev);
  const auto& fw = std::get<FactorizedWeights<Scalar>>(params.weights);
  const Index p = params.input_dim();
  const Index n = params.cell_dim();
  const Index r = fw.w1.rows();
  const Index batch = x.cols();
  Matrix<Scalar> factor = Matrix<Scalar>::Zero(r, batch);
  accumulate_split_product(r, p, batch, fw.w1.data(), 2 * p, x.data(),
                           prev.h.data(), factor.data());
  Matrix<Scalar> z = Matrix<Scalar>::Zero(4 * n, batch);
  kernels::gemm_nn(4 * n, batch, r, fw.w2.data(), r, factor.data(), batch,
                   z.data(), batch);
  StepOutput<Scalar> out = finish_step(params, x, prev, std::move(z));
  out.cache.factor = std::move(factor);
  return out;
}

template <typename Scalar>
StepOutput<Scalar> glstm_forward(const CellParams<Scalar>& params,
                                 const Matrix<Scalar>& x,
                                 const LSTMState<Scalar>& prev,
                                 const ExecutionOptions& options) {
  require_kind("glstm_forward", params, CellKind::kGrouped);
  params.config();
  check_step_inputs("glstm_forward", params, x, prev);
  const auto& gw = std::get<GroupedWeights<Scalar>>(params.weights);
  return finish_step(params, x, prev,
                     grouped_preactivation(gw, params.input_dim(),
                                           params.cell_dim(), x, prev.h,
                                           options));
}

template <typename Scalar>
StepOutput<Scalar> cell_forward(const CellParams<Scalar>& params,
                                const Matrix<Scalar>& x,
                                const LSTMState<Scalar>& prev,
                                const ExecutionOptions& options) {
  switch (params.kind()) {
    case CellKind::kDense:
      return lstmp_forward(params, x, prev);
    case CellKind::kFactorized:
      return flstm_forward(params, x, prev);
    case CellKind::kGrouped:
      return glstm_forward(params, x, prev, options);
  }
  throw UsageError("cell_forward: unknown cell variant");
}

template <typename Scalar>
StepGradients<Scalar> cell_backward_accumulate(
    const CellParams<Scalar>& params, const StepCache<Scalar>& cache,
    const Matrix<Scalar>& grad_h, const Matrix<Scalar>& grad_c,
    CellParams<Scalar>& grads, const ExecutionOptions& options) {
  if (cache.kind != params.kind()) {
    throw UsageError(std::string("cell_backward: cache from a ") +
                     variant_name<Scalar>(cache.kind) +
                     " cell used with " + variant_name<Scalar>(params.kind()) +
                     " parameters");
  }
  check_same_structure(params, grads);
  const Index p = params.input_dim();
  const Index n = params.cell_dim();
  const Index batch = cache.x.cols();
  if (cache.x.rows() != p || cache.c.rows() != n || cache.c.cols() != batch) {
    throw UsageError("cell_backward: cache shapes do not match parameters");
  }
  if (grad_h.rows() != p || grad_h.cols() != batch || grad_c.rows() != n ||
      grad_c.cols() != batch) {
    throw ShapeError("cell_backward: upstream gradients (" +
                     shape_string(grad_h) + ", " + shape_string(grad_c) +
                     ") do not match p=" + std::to_string(p) +
                     ", n=" + std::to_string(n) +
                     ", batch=" + std::to_string(batch));
  }

  // h = P y
  kernels::gemm_nt(p, n, batch, grad_h.data(), batch,
                   cache.projected_in.data(), batch, grads.projection.data(),
                   n);
  Matrix<Scalar> dy = Matrix<Scalar>::Zero(n, batch);
  kernels::gemm_tn(n, batch, p, params.projection.data(), n, grad_h.data(),
                   batch, dy.data(), batch);

  StepGradients<Scalar> out;
  Matrix<Scalar> dz;
  gate_backward(cache, dy, grad_c, dz, out.grad_prev.c);

  for (Index r = 0; r < 4 * n; ++r) {
    Scalar acc = grads.bias(r);
    const Scalar* row = dz.data() + r * batch;
    for (Index col = 0; col < batch; ++col) acc += row[col];
    grads.bias(r) = acc;
  }

  out.grad_x = Matrix<Scalar>::Zero(p, batch);
  out.grad_prev.h = Matrix<Scalar>::Zero(p, batch);
  const Scalar* x = cache.x.data();
  const Scalar* h = cache.h_prev.data();
  Scalar* dx = out.grad_x.data();
  Scalar* dh = out.grad_prev.h.data();

  switch (params.kind()) {
    case CellKind::kDense: {
      const auto& w = std::get<DenseWeights<Scalar>>(params.weights).w;
      auto& dw = std::get<DenseWeights<Scalar>>(grads.weights).w;
      split_product_backward(4 * n, p, batch, w.data(), 2 * p, x, h,
                             dz.data(), dw.data(), dx, dh);
      break;
    }
    case CellKind::kFactorized: {
      const auto& fw = std::get<FactorizedWeights<Scalar>>(params.weights);
      auto& gw = std::get<FactorizedWeights<Scalar>>(grads.weights);
      const Index r = fw.w1.rows();
      kernels::gemm_nt(4 * n, r, batch, dz.data(), batch, cache.factor.data(),
                       batch, gw.w2.data(), r);
      Matrix<Scalar> dfactor = Matrix<Scalar>::Zero(r, batch);
      kernels::gemm_tn(r, batch, 4 * n, fw.w2.data(), r, dz.data(), batch,
                       dfactor.data(), batch);
      split_product_backward(r, p, batch, fw.w1.data(), 2 * p, x, h,
                             dfactor.data(), gw.w1.data(), dx, dh);
      break;
    }
    case CellKind::kGrouped: {
      const auto& blocks =
          std::get<GroupedWeights<Scalar>>(params.weights).blocks;
      auto& gblocks = std::get<GroupedWeights<Scalar>>(grads.weights).blocks;
      const Index k = static_cast<Index>(blocks.size());
      const Index pk = p / k;
      const Index nk = n / k;
      parallel_for(static_cast<int>(k), options.threads, [&](int jj) {
        const Index j = jj;
        for (Index q = 0; q < 4; ++q) {
          const Index offset = q * nk * 2 * pk;
          split_product_backward(
              nk, pk, batch, blocks[j].data() + offset, 2 * pk,
              x + j * pk * batch, h + j * pk * batch,
              dz.data() + (q * n + j * nk) * batch,
              gblocks[j].data() + offset, dx + j * pk * batch,
              dh + j * pk * batch);
        }
      });
      break;
    }
  }
  return out;
}

template <typename Scalar>
CellBackward<Scalar> cell_backward(const CellParams<Scalar>& params,
                                   const StepCache<Scalar>& cache,
                                   const Matrix<Scalar>& grad_h,
                                   const Matrix<Scalar>& grad_c) {
  CellBackward<Scalar> out;
  out.param_grads = params.zeros_like();
  StepGradients<Scalar> step =
      cell_backward_accumulate(params, cache, grad_h, grad_c, out.param_grads);
  out.grad_x = std::move(step.grad_x);
  out.grad_prev = std::move(step.grad_prev);
  return out;
}

std::int64_t param_count(const CellConfig& config, bool include_projection,
                         bool include_bias) {
  config.validate();
  const std::int64_t p = config.input_dim;
  const std::int64_t n = config.cell_dim;
  std::int64_t total = std::visit(
      Overloaded{
          [&](const Dense&) { return 8 * n * p; },
          [&](const Factorized& f) {
            return 2 * p * std::int64_t{f.rank} + 4 * n * std::int64_t{f.rank};
          },
          [&](const Grouped& g) { return 8 * n * p / std::int64_t{g.groups}; }},
      config.variant);
  if (include_bias) total += 4 * n;
  if (include_projection) total += n * p;
  return total;
}

#define RNNLAB_INSTANTIATE_CELLS(Scalar)                                       \
  template struct CellParams<Scalar>;                                          \
  template CellParams<Scalar> init_params<Scalar>(const CellConfig&, Rng&);    \
  template CellParams<Scalar> init_params<Scalar>(const CellConfig&,           \
                                                  std::uint64_t);              \
  template StepOutput<Scalar> lstmp_forward(                                   \
      const CellParams<Scalar>&, const Matrix<Scalar>&,                        \
      const LSTMState<Scalar>&);                                               \
  template StepOutput<Scalar> flstm_forward(                                   \
      const CellParams<Scalar>&, const Matrix<Scalar>&,                        \
      const LSTMState<Scalar>&);                                               \
  template StepOutput<Scalar> glstm_forward(                                   \
      const CellParams<Scalar>&, const Matrix<Scalar>&,                        \
      const LSTMState<Scalar>&, const ExecutionOptions&);                      \
  template StepOutput<Scalar> cell_forward(                                    \
      const CellParams<Scalar>&, const Matrix<Scalar>&,                        \
      const LSTMState<Scalar>&, const ExecutionOptions&);                      \
  template StepGradients<Scalar> cell_backward_accumulate(                     \
      const CellParams<Scalar>&, const StepCache<Scalar>&,                     \
      const Matrix<Scalar>&, const Matrix<Scalar>&, CellParams<Scalar>&,       \
      const ExecutionOptions&);                                                \
  template CellBackward<Scalar> cell_backward(                                 \
      const CellParams<Scalar>&, const StepCache<Scalar>&,                     \
      const Matrix<Scalar>&, const Matrix<Scalar>&);

RNNLAB_INSTANTIATE_CELLS(float)
RNNLAB_INSTANTIATE_CELLS(double)

#undef RNNLAB_INSTANTIATE_CELLS

}  // namespace rnnlab
