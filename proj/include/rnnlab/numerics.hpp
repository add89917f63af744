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

// Dense storage types and the small set of kernels every other module is
// built from.
//
// Storage is Eigen, row-major. Products do NOT go through Eigen's GEMM:
// every output element of every product here is accumulated as
//
//   c = 0; for t in 0..k-1: c += a[t] * b[t]
//
// in ascending t, independently of matrix sizes, blocking or how many
// columns are processed together. That makes a batched product bitwise equal
// to the same product taken one column at a time, and bitwise equal to a
// naive triple loop. The kernels are written so the innermost loop runs over
// independent output elements and therefore still vectorizes.

#ifndef RNNLAB_NUMERICS_HPP_
#define RNNLAB_NUMERICS_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "rnnlab/errors.hpp"

namespace rnnlab {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ConstMatrixRef =
    Eigen::Ref<const Matrix<Scalar>, 0, Eigen::OuterStride<>>;

template <typename Scalar>
using MatrixRef = Eigen::Ref<Matrix<Scalar>, 0, Eigen::OuterStride<>>;

/// "3x4"
inline std::string shape_string(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

template <typename Derived>
std::string shape_string(const Eigen::DenseBase<Derived>& m) {
  return shape_string(m.rows(), m.cols());
}

namespace kernels {

// 64-byte SIMD vector of Scalar (GCC/Clang vector extension). Spelled out
// per type because the attribute does not apply through an alias template.
template <typename Scalar>
struct PacketOf;
template <>
struct PacketOf<float> {
  typedef float type __attribute__((vector_size(64)));
};
template <>
struct PacketOf<double> {
  typedef double type __attribute__((vector_size(64)));
};
template <typename Scalar>
using Packet = typename PacketOf<Scalar>::type;

template <typename Scalar>
inline constexpr Index kLanes = 64 / static_cast<Index>(sizeof(Scalar));

template <typename Scalar>
inline Packet<Scalar> load_packet(const Scalar* p) {
  Packet<Scalar> v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

template <typename Scalar>
inline void store_packet(Scalar* p, const Packet<Scalar>& v) {
  std::memcpy(p, &v, sizeof(v));
}

// 4 rows x kVectors packets of C, held in registers while t runs 0..k-1.
template <typename Scalar, int kVectors>
inline void gemm_tile(Index k, const Scalar* a, Index row_stride,
                      Index col_stride, const Scalar* b, Index ldb, Scalar* c,
                      Index ldc) {
  constexpr Index kL = kLanes<Scalar>;
  Packet<Scalar> acc[4][kVectors];
#pragma GCC unroll 4
  for (int r = 0; r < 4; ++r) {
#pragma GCC unroll 2
    for (int v = 0; v < kVectors; ++v) {
      acc[r][v] = load_packet(c + r * ldc + v * kL);
    }
  }
  const Scalar* bt = b;
  Index at = 0;
  for (Index t = 0; t < k; ++t, bt += ldb, at += col_stride) {
    Packet<Scalar> bv[kVectors];
#pragma GCC unroll 2
    for (int v = 0; v < kVectors; ++v) bv[v] = load_packet(bt + v * kL);
#pragma GCC unroll 4
    for (int r = 0; r < 4; ++r) {
      const Scalar av = a[r * row_stride + at];
#pragma GCC unroll 2
      for (int v = 0; v < kVectors; ++v) {
        const Packet<Scalar> prod = av * bv[v];
        acc[r][v] += prod;
      }
    }
  }
#pragma GCC unroll 4
  for (int r = 0; r < 4; ++r) {
#pragma GCC unroll 2
    for (int v = 0; v < kVectors; ++v) {
      store_packet(c + r * ldc + v * kL, acc[r][v]);
    }
  }
}

// Register-blocked core shared by the product kernels. Computes
// C(m x n) += A' * B(k x n) where A' is addressed as a[i * row_stride +
// t * col_stride]. Each output still receives its k terms one at a time in
// ascending t, so blocking changes speed and never rounding. Multiplies and
// adds are separate vector operations (no FMA).
template <typename Scalar>
void gemm_core(Index m, Index n, Index k, const Scalar* a, Index row_stride,
               Index col_stride, const Scalar* b, Index ldb, Scalar* c,
               Index ldc) {
  constexpr Index kL = kLanes<Scalar>;
  const Index m_main = m - m % 4;
  const Index n_wide = n - n % (2 * kL);
  const Index n_main = n - n % kL;
  for (Index i0 = 0; i0 < m_main; i0 += 4) {
    const Scalar* ai = a + i0 * row_stride;
    Scalar* ci = c + i0 * ldc;
    for (Index j0 = 0; j0 < n_wide; j0 += 2 * kL) {
      gemm_tile<Scalar, 2>(k, ai, row_stride, col_stride, b + j0, ldb,
                           ci + j0, ldc);
    }
    if (n_wide < n_main) {
      gemm_tile<Scalar, 1>(k, ai, row_stride, col_stride, b + n_wide, ldb,
                           ci + n_wide, ldc);
    }
  }
  // Ragged edges: same per-element order, no blocking.
  const auto plain = [&](Index i_begin, Index i_end, Index j_begin,
                         Index j_end) {
    for (Index i = i_begin; i < i_end; ++i) {
      Scalar* __restrict ci = c + i * ldc;
      for (Index t = 0; t < k; ++t) {
        const Scalar av = a[i * row_stride + t * col_stride];
        const Scalar* __restrict bt = b + t * ldb;
        for (Index j = j_begin; j < j_end; ++j) ci[j] += av * bt[j];
      }
    }
  };
  if (n_main < n) plain(0, m_main, n_main, n);
  if (m_main < m) plain(m_main, m, 0, n);
}

/// C(m x n) += A(m x k) * B(k x n). Leading dimensions are row strides.
template <typename Scalar>
void gemm_nn(Index m, Index n, Index k, const Scalar* a, Index lda,
             const Scalar* b, Index ldb, Scalar* c, Index ldc) {
  gemm_core(m, n, k, a, lda, Index{1}, b, ldb, c, ldc);
}

/// C(m x n) += A^T * B where A is stored k x m and B is k x n.
template <typename Scalar>
void gemm_tn(Index m, Index n, Index k, const Scalar* a, Index lda,
             const Scalar* b, Index ldb, Scalar* c, Index ldc) {
  gemm_core(m, n, k, a, Index{1}, lda, b, ldb, c, ldc);
}

/// C(m x n) += A * B^T where A is m x k and B is stored n x k. B is
/// transposed into a scratch buffer first so the inner loop stays unit-stride.
template <typename Scalar>
void gemm_nt(Index m, Index n, Index k, const Scalar* a, Index lda,
             const Scalar* b, Index ldb, Scalar* c, Index ldc) {
  std::vector<Scalar> bt(static_cast<std::size_t>(k * n));
  for (Index j = 0; j < n; ++j)
    for (Index t = 0; t < k; ++t) bt[t * n + j] = b[j * ldb + t];
  gemm_nn(m, n, k, a, lda, bt.data(), n, c, ldc);
}

}  // namespace kernels

/// C += A * B on Eigen views.
template <typename Scalar>
void matmul_accumulate(ConstMatrixRef<Scalar> a, ConstMatrixRef<Scalar> b,
                       MatrixRef<Scalar> c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    throw ShapeError("matmul: cannot multiply (" + shape_string(a) + ") by (" +
                     shape_string(b) + ") into (" + shape_string(c) + ")");
  }
  kernels::gemm_nn<Scalar>(a.rows(), b.cols(), a.cols(), a.data(),
                           a.outerStride(), b.data(), b.outerStride(),
                           c.data(), c.outerStride());
}

/// C += A^T * B.
template <typename Scalar>
void matmul_tn_accumulate(ConstMatrixRef<Scalar> a, ConstMatrixRef<Scalar> b,
                          MatrixRef<Scalar> c) {
  if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) {
    throw ShapeError("matmul: cannot multiply (" + shape_string(a) +
                     ")^T by (" + shape_string(b) + ") into (" +
                     shape_string(c) + ")");
  }
  kernels::gemm_tn<Scalar>(a.cols(), b.cols(), a.rows(), a.data(),
                           a.outerStride(), b.data(), b.outerStride(),
                           c.data(), c.outerStride());
}

/// C += A * B^T.
template <typename Scalar>
void matmul_nt_accumulate(ConstMatrixRef<Scalar> a, ConstMatrixRef<Scalar> b,
                          MatrixRef<Scalar> c) {
  if (a.cols() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply (" + shape_string(a) + ") by (" +
                     shape_string(b) + ")^T into (" + shape_string(c) + ")");
  }
  kernels::gemm_nt<Scalar>(a.rows(), b.rows(), a.cols(), a.data(),
                           a.outerStride(), b.data(), b.outerStride(),
                           c.data(), c.outerStride());
}

template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedB::Scalar>);
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ: (" + shape_string(a) +
                     ") * (" + shape_string(b) + ")");
  }
  ConstMatrixRef<Scalar> lhs(a.derived());
  ConstMatrixRef<Scalar> rhs(b.derived());
  Matrix<Scalar> c = Matrix<Scalar>::Zero(a.rows(), b.cols());
  matmul_accumulate<Scalar>(lhs, rhs, c);
  return c;
}

/// W * x + bias, with `bias` broadcast over the columns of x. The product is
/// completed before the bias is added.
template <typename DerivedW, typename DerivedX, typename DerivedB>
Matrix<typename DerivedW::Scalar> affine(const Eigen::MatrixBase<DerivedW>& w,
                                         const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedB>& bias) {
  if (w.cols() != x.rows() || bias.rows() != w.rows() || bias.cols() != 1) {
    throw ShapeError("affine: W (" + shape_string(w) + "), x (" +
                     shape_string(x) + "), bias (" + shape_string(bias) +
                     ") do not conform");
  }
  Matrix<typename DerivedW::Scalar> out = matmul(w, x);
  out.colwise() += bias;
  return out;
}

/// Overflow-safe logistic: exp() is only ever called on a non-positive
/// argument.
template <typename Scalar>
inline Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
inline Scalar tanh(Scalar z) {
  return std::tanh(z);
}

enum class Elementwise { kSigmoid, kTanh, kMul, kAdd };

template <typename Derived>
Matrix<typename Derived::Scalar> elementwise(Elementwise kind,
                                             const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  switch (kind) {
    case Elementwise::kSigmoid:
      return a.unaryExpr([](Scalar z) { return sigmoid(z); });
    case Elementwise::kTanh:
      return a.unaryExpr([](Scalar z) { return rnnlab::tanh(z); });
    default:
      throw UsageError("elementwise: binary operation given one operand");
  }
}

template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> elementwise(
    Elementwise kind, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("elementwise: operands (" + shape_string(a) + ") and (" +
                     shape_string(b) + ") differ in shape");
  }
  switch (kind) {
    case Elementwise::kMul:
      return a.cwiseProduct(b);
    case Elementwise::kAdd:
      return a + b;
    default:
      throw UsageError("elementwise: unary operation given two operands");
  }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().allFinite();
}

}  // namespace rnnlab

#endif  // RNNLAB_NUMERICS_HPP_
