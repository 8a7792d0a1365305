/*
 * Copyright 2026 The rfalcf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFALCF_BASELINES_HPP
#define RFALCF_BASELINES_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "rfalcf/types.hpp"

namespace rfalcf {

/// Output of a reference factorization. `basis * representation^T`
/// approximates X; the trace records the Frobenius loss per iteration
/// (row 0 is the initialization).
struct BaselineResult {
  Matrix basis;           // d x R
  Matrix representation;  // N x R, >= 0
  std::vector<std::pair<int, double>> trace;
};

namespace detail {

inline Matrix random_uniform(Eigen::Index rows, Eigen::Index cols,
                             std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unif(gen);
  return m;
}

}  // namespace detail

/// Standard NMF with Frobenius multiplicative updates: X ~ B V^T, B, V >= 0.
inline BaselineResult nmf_fit(const DataMatrix& x, int rank, int iters,
                              std::uint64_t seed, double guard_eps = 1e-8) {
  if ((x.values.array() < 0.0).any())
    throw InvalidInputError("nmf_fit: input matrix must be nonnegative");
  if (rank < 1 || rank > x.samples())
    throw InvalidInputError("nmf_fit: rank must be in [1, N]");
  if (iters < 0) throw InvalidInputError("nmf_fit: iters must be >= 0");

  std::mt19937_64 gen(seed);
  BaselineResult out;
  out.basis = detail::random_uniform(x.dim(), rank, gen);
  out.representation = detail::random_uniform(x.samples(), rank, gen);

  const auto loss = [&]() {
    return (x.values - out.basis * out.representation.transpose()).norm();
  };
  out.trace.reserve(iters + 1);
  out.trace.emplace_back(0, loss());

  for (int t = 1; t <= iters; ++t) {
    Matrix& b = out.basis;
    Matrix& v = out.representation;
    // V <- V o (X^T B) / (V B^T B + guard)
    Matrix v_den = v * (b.transpose() * b);
    v_den.array() += guard_eps;
    v = v.cwiseProduct((x.values.transpose() * b).cwiseQuotient(v_den));
    // B <- B o (X V) / (B V^T V + guard)
    Matrix b_den = b * (v.transpose() * v);
    b_den.array() += guard_eps;
    b = b.cwiseProduct((x.values * v).cwiseQuotient(b_den));
    out.trace.emplace_back(t, loss());
  }
  return out;
}

/// Concept factorization with multiplicative updates on the kernel
/// K = X^T X: X ~ X W V^T with W, V >= 0. K is split by sign, so the rules
/// stay nonnegativity-preserving for signed data; on nonnegative data the
/// split is a no-op and the rules are the textbook ones.
inline BaselineResult cf_fit(const DataMatrix& x, int rank, int iters,
                             std::uint64_t seed, double guard_eps = 1e-8) {
  if (rank < 1 || rank > x.samples())
    throw InvalidInputError("cf_fit: rank must be in [1, N]");
  if (iters < 0) throw InvalidInputError("cf_fit: iters must be >= 0");

  const Matrix kernel = x.values.transpose() * x.values;
  const Matrix k_pos = kernel.cwiseMax(0.0);
  const Matrix k_neg = (-kernel).cwiseMax(0.0);

  std::mt19937_64 gen(seed);
  Matrix w = detail::random_uniform(x.samples(), rank, gen);
  Matrix v = detail::random_uniform(x.samples(), rank, gen);

  BaselineResult out;
  const auto loss = [&]() {
    return (x.values - (x.values * w) * v.transpose()).norm();
  };
  out.trace.reserve(iters + 1);
  const auto record = [&](int t) {
    out.basis = x.values * w;
    out.representation = v;
    out.trace.emplace_back(t, loss());
  };
  record(0);

  for (int t = 1; t <= iters; ++t) {
    // W <- W o (K+ V + K- W V^T V) / (K+ W V^T V + K- V + guard)
    {
      const Matrix wvv = w * (v.transpose() * v);
      Matrix num = k_pos * v;
      num.noalias() += k_neg * wvv;
      Matrix den = k_pos * wvv;
      den.noalias() += k_neg * v;
      den.array() += guard_eps;
      w = w.cwiseProduct(num.cwiseQuotient(den));
    }
    // V <- V o (K+ W + V (W^T K W)-) / (V (W^T K W)+ + K- W + guard)
    {
      const Matrix wkw = w.transpose() * (kernel * w);
      const Matrix wkw_pos = wkw.cwiseMax(0.0);
      const Matrix wkw_neg = (-wkw).cwiseMax(0.0);
      Matrix num = k_pos * w;
      num.noalias() += v * wkw_neg;
      Matrix den = v * wkw_pos;
      den.noalias() += k_neg * w;
      den.array() += guard_eps;
      v = v.cwiseProduct(num.cwiseQuotient(den));
    }
    record(t);
  }
  return out;
}

}  // namespace rfalcf

#endif  // RFALCF_BASELINES_HPP
