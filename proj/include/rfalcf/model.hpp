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

#ifndef RFALCF_MODEL_HPP
#define RFALCF_MODEL_HPP

#include <cmath>
#include <string>

#include "rfalcf/types.hpp"

namespace rfalcf {

/// Derived matrices shared by the update rules. All are functions of
/// (X, state); none are mutated after construction.
struct AuxMatrices {
  Matrix centering;      // He = I - e eM^T / NM, N x N; He * ones = 0
  Matrix residual_gram;  // C = He^T M He, N x N, symmetric PSD
  Matrix graph_gap;      // G = (I - Q)(I - Q)^T, N x N, symmetric PSD
  Matrix stacked;        // H = [P^T X; W^T; V^T], (d + 2R) x N
  Matrix locality_gram;  // Xi = sum_i (1_i e_R^T - W) diag(|v_i|) (...)^T, N x N
  Matrix kernel;         // X^T X, N x N
  Matrix clean_kernel;   // X^T P P^T X, N x N
  double weight_sum = 0.0;  // sum of the M diagonal
  Vector weight_diag;       // copy of the M diagonal
};

/// Weighted centering operator He = I - ones * m^T / sum(m).
/// Annihilates the ones vector for every positive weight vector m.
inline Matrix weighted_centering(const Vector& m_diag) {
  if ((m_diag.array() <= 0.0).any() || !m_diag.allFinite())
    throw InvalidInputError("weighted_centering: weights must be finite and > 0");
  const Eigen::Index n = m_diag.size();
  const double total = m_diag.sum();
  Matrix he = Matrix::Identity(n, n);
  he.noalias() -= Vector::Ones(n) * (m_diag.transpose() / total);
  return he;
}

/// G = (I - Q)(I - Q)^T.
inline Matrix graph_gap_matrix(const Matrix& q) {
  Matrix gap = Matrix::Identity(q.rows(), q.cols()) - q;
  return gap * gap.transpose();
}

/// Per-sample locality quadratic
///   Xi = sum_i (1_i e_R^T - W) diag(|v_i|) (1_i e_R^T - W)^T,
/// evaluated in closed form:
///   diag(rowsum|V|) - |V| W^T - W |V|^T + W diag(colsum|V|) W^T.
inline Matrix locality_gram_matrix(const Matrix& w, const Matrix& v) {
  if (w.rows() != v.rows() || w.cols() != v.cols())
    throw InvalidInputError("locality_gram: W and V dimensions differ");
  const Matrix abs_v = v.cwiseAbs();
  Matrix xi = (abs_v.rowwise().sum()).asDiagonal();
  xi.noalias() -= abs_v * w.transpose();
  xi.noalias() -= w * abs_v.transpose();
  xi.noalias() += w * abs_v.colwise().sum().asDiagonal() * w.transpose();
  return xi;
}

/// H = [P^T X; W^T; V^T], the vertical stack the weighting term couples.
inline Matrix stacked_matrix(const DataMatrix& x, const FactorState& s) {
  const Eigen::Index d = x.dim();
  const Eigen::Index n = x.samples();
  const Eigen::Index r = s.w.cols();
  Matrix h(d + 2 * r, n);
  h.topRows(d).noalias() = s.p.transpose() * x.values;
  h.middleRows(d, r) = s.w.transpose();
  h.bottomRows(r) = s.v.transpose();
  return h;
}

namespace detail {

inline void check_state_dims(const DataMatrix& x, const FactorState& s) {
  const Eigen::Index d = x.dim();
  const Eigen::Index n = x.samples();
  if (s.p.rows() != d || s.p.cols() != d || s.w.rows() != n ||
      s.v.rows() != n || s.v.cols() != s.w.cols() || s.q.rows() != n ||
      s.q.cols() != n || s.b.size() != d || s.m_diag.size() != n ||
      s.s_diag.size() != d)
    throw InvalidInputError("state dimensions are inconsistent with the data matrix");
}

}  // namespace detail

/// Assembles every auxiliary matrix from the current state.
inline AuxMatrices build_aux(const DataMatrix& x, const FactorState& s) {
  detail::check_state_dims(x, s);
  AuxMatrices aux;
  aux.centering = weighted_centering(s.m_diag);
  aux.residual_gram.noalias() =
      aux.centering.transpose() * s.m_diag.asDiagonal() * aux.centering;
  aux.graph_gap = graph_gap_matrix(s.q);
  aux.stacked = stacked_matrix(x, s);
  aux.locality_gram = locality_gram_matrix(s.w, s.v);
  aux.kernel.noalias() = x.values.transpose() * x.values;
  const Matrix clean = s.p.transpose() * x.values;
  aux.clean_kernel.noalias() = clean.transpose() * clean;
  aux.weight_sum = s.m_diag.sum();
  aux.weight_diag = s.m_diag;
  return aux;
}

/// Flexible residue Y = X^T P + e b^T - V W^T X^T, one row per sample.
inline Matrix flexible_residual(const DataMatrix& x, const FactorState& s) {
  detail::check_state_dims(x, s);
  Matrix y = x.values.transpose() * s.p;
  y.rowwise() += s.b.transpose();
  y.noalias() -= s.v * (s.w.transpose() * x.values.transpose());
  return y;
}

/// Exact objective value, term by term. The L2,1 terms are computed from raw
/// row norms, never from the cached M/S majorizer weights.
inline ObjectiveBreakdown objective(const DataMatrix& x, const FactorState& s,
                                    const Hyperparams& params) {
  detail::check_state_dims(x, s);
  ObjectiveBreakdown out;

  const Matrix y = flexible_residual(x, s);
  out.residual_l21 = y.rowwise().norm().sum();
  if (!std::isfinite(out.residual_l21))
    throw NumericError("objective: residual_l21 is non-finite");

  // locality: sum_i sum_r |v_ir| * || P^T X w_r - P^T x_i ||^2
  const Matrix clean = s.p.transpose() * x.values;  // d x N
  const Matrix anchors = clean * s.w;               // d x R
  double f = 0.0;
  for (Eigen::Index i = 0; i < s.v.rows(); ++i)
    for (Eigen::Index r = 0; r < s.v.cols(); ++r)
      f += std::abs(s.v(i, r)) * (anchors.col(r) - clean.col(i)).squaredNorm();
  out.locality_f = params.alpha * f;
  if (!std::isfinite(out.locality_f))
    throw NumericError("objective: locality_f is non-finite");

  const Matrix h = stacked_matrix(x, s);
  out.weighting_g = params.beta * (h - h * s.q).squaredNorm();
  if (!std::isfinite(out.weighting_g))
    throw NumericError("objective: weighting_g is non-finite");

  out.projection_l21 = params.gamma * s.p.rowwise().norm().sum();
  if (!std::isfinite(out.projection_l21))
    throw NumericError("objective: projection_l21 is non-finite");

  out.total = out.residual_l21 + out.locality_f + out.weighting_g + out.projection_l21;
  return out;
}

}  // namespace rfalcf

#endif  // RFALCF_MODEL_HPP
