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

#ifndef RFALCF_TYPES_HPP
#define RFALCF_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfalcf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Arguments violate a documented precondition (dimensions, signs, ranges).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced non-finite values or a linear solve failed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending line or byte offset.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level read/write failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data matrix, one sample per column (d features x N samples).
struct DataMatrix {
  Matrix values;
  std::vector<int> labels;  // optional; empty or one class id per column

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }
};

/// Trade-off and control parameters of the factorization.
///
/// conv_eps is relative: the solver stops when ||V_{t+1} - V_t||_F falls
/// below conv_eps * ||V_0||_F.
struct Hyperparams {
  double alpha = 0.1;       // locality / sparsity weight
  double beta = 0.1;        // adaptive weighting term
  double gamma = 0.1;       // row-sparse projection penalty
  int rank = 2;             // factorization rank R
  double conv_eps = 1e-5;   // convergence tolerance, relative to ||V_0||_F
  double guard_eps = 1e-8;  // division / norm guard
  int max_iter = 500;
};

/// All optimization variables of the model.
struct FactorState {
  Matrix p;       // projection onto the clean data space, d x d
  Matrix w;       // concept mixing weights, N x R, >= 0
  Matrix v;       // sample representation, N x R, >= 0 (one row per sample)
  Matrix q;       // adaptive reconstruction weights, N x N, >= 0, zero diagonal
  Vector b;       // regression bias, d
  Vector m_diag;  // reweighting of residual rows, N, > 0
  Vector s_diag;  // reweighting of projection rows, d, > 0
};

/// The four additive objective terms and their total.
struct ObjectiveBreakdown {
  double residual_l21 = 0.0;    // sum of residual row norms
  double locality_f = 0.0;      // alpha-weighted local coordinate penalty
  double weighting_g = 0.0;     // beta-weighted reconstruction gap
  double projection_l21 = 0.0;  // gamma-weighted projection row norms
  double total = 0.0;
};

inline void validate_data(const DataMatrix& x) {
  if (x.values.rows() < 1 || x.values.cols() < 2)
    throw InvalidInputError("data matrix must be at least 1 x 2 (features x samples)");
  if (!x.values.allFinite())
    throw InvalidInputError("data matrix has non-finite entries");
  if (!x.labels.empty() &&
      static_cast<Eigen::Index>(x.labels.size()) != x.values.cols())
    throw InvalidInputError("label count does not match sample count");
}

inline void validate_hyperparams(const Hyperparams& p, Eigen::Index n_samples) {
  if (!(p.alpha >= 0.0) || !(p.beta >= 0.0) || !(p.gamma >= 0.0))
    throw InvalidInputError("alpha, beta, gamma must be finite and >= 0");
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma))
    throw InvalidInputError("alpha, beta, gamma must be finite and >= 0");
  if (p.rank < 1) throw InvalidInputError("rank must be >= 1");
  if (n_samples >= 0 && p.rank > n_samples)
    throw InvalidInputError("rank exceeds the number of samples");
  if (!(p.conv_eps > 0.0) || !std::isfinite(p.conv_eps))
    throw InvalidInputError("conv_eps must be finite and > 0");
  if (!(p.guard_eps > 0.0) || !std::isfinite(p.guard_eps))
    throw InvalidInputError("guard_eps must be finite and > 0");
  if (p.max_iter < 0) throw InvalidInputError("max_iter must be >= 0");
}

/// Checks every FactorState invariant against X; throws NumericError with the
/// first violated condition.
inline void check_state(const DataMatrix& x, const FactorState& s, int rank) {
  const Eigen::Index d = x.dim();
  const Eigen::Index n = x.samples();
  if (s.p.rows() != d || s.p.cols() != d) throw NumericError("state: P is not d x d");
  if (s.w.rows() != n || s.w.cols() != rank) throw NumericError("state: W is not N x R");
  if (s.v.rows() != n || s.v.cols() != rank) throw NumericError("state: V is not N x R");
  if (s.q.rows() != n || s.q.cols() != n) throw NumericError("state: Q is not N x N");
  if (s.b.size() != d) throw NumericError("state: b is not length d");
  if (s.m_diag.size() != n) throw NumericError("state: M diagonal is not length N");
  if (s.s_diag.size() != d) throw NumericError("state: S diagonal is not length d");
  if (!s.p.allFinite() || !s.w.allFinite() || !s.v.allFinite() ||
      !s.q.allFinite() || !s.b.allFinite() || !s.m_diag.allFinite() ||
      !s.s_diag.allFinite())
    throw NumericError("state: non-finite entries");
  if ((s.w.array() < 0.0).any()) throw NumericError("state: W has negative entries");
  if ((s.v.array() < 0.0).any()) throw NumericError("state: V has negative entries");
  if ((s.q.array() < 0.0).any()) throw NumericError("state: Q has negative entries");
  if ((s.q.diagonal().array() != 0.0).any())
    throw NumericError("state: Q diagonal is not exactly zero");
  if ((s.m_diag.array() <= 0.0).any()) throw NumericError("state: M has non-positive entries");
  if ((s.s_diag.array() <= 0.0).any()) throw NumericError("state: S has non-positive entries");
}

namespace detail {

/// splitmix64 step; used to derive independent sub-seeds deterministically.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(a) ^ b);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b) ^ c);
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

}  // namespace rfalcf

#endif  // RFALCF_TYPES_HPP
