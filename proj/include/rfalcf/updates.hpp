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

#ifndef RFALCF_UPDATES_HPP
#define RFALCF_UPDATES_HPP

#include <algorithm>
#include <cmath>

#include "rfalcf/model.hpp"
#include "rfalcf/types.hpp"

namespace rfalcf {

/// Elementwise positive/negative parts: pos - neg == A exactly, both >= 0.
struct SignSplit {
  Matrix pos;
  Matrix neg;
};

inline SignSplit sign_split(const Matrix& a) {
  return {a.cwiseMax(0.0), (-a).cwiseMax(0.0)};
}

namespace detail {

/// Adds the sign-split expansion of L * mid * R to a multiplicative
/// numerator/denominator, where L and R are elementwise nonnegative and mid
/// carries both signs. Same-sign products land on `principal`, cross-sign
/// products on `opposite`; every routed piece is nonnegative by construction.
inline void fold_quadratic(const Matrix& left_pos, const Matrix& left_neg,
                           const Matrix& mid, const Matrix& right_pos,
                           const Matrix& right_neg, Matrix& principal,
                           Matrix& opposite) {
  principal.noalias() += left_pos * mid * right_pos;
  principal.noalias() += left_neg * mid * right_neg;
  opposite.noalias() += left_pos * mid * right_neg;
  opposite.noalias() += left_neg * mid * right_pos;
}

}  // namespace detail

/// M refresh: m_ii = 1 / (2 * max(||y^i||, guard)). The guard absorbs zero
/// residual rows, so every weight stays finite and positive.
inline Vector refresh_m(const Matrix& y, double guard_eps) {
  Vector m(y.rows());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    m(i) = 1.0 / (2.0 * std::max(y.row(i).norm(), guard_eps));
  return m;
}

/// S refresh: s_ii = 1 / (2 * max(||P^i||, guard)), the reciprocal form that
/// satisfies ||P||_{2,1} = 2 tr(P^T S P).
inline Vector refresh_s(const Matrix& p, double guard_eps) {
  Vector s(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    s(i) = 1.0 / (2.0 * std::max(p.row(i).norm(), guard_eps));
  return s;
}

/// Closed-form bias b = (X W V^T M e - P^T X M e) / sum(M); the unique
/// minimizer of tr(Y^T M Y) over b with everything else fixed.
inline Vector solve_b(const DataMatrix& x, const Matrix& p, const Matrix& w,
                      const Matrix& v, const Vector& m_diag) {
  const double total = m_diag.sum();
  if (!(total > 0.0))
    throw InvalidInputError("solve_b: weight sum must be positive");
  Vector recon = x.values * (w * (v.transpose() * m_diag));
  Vector projected = p.transpose() * (x.values * m_diag);
  return (recon - projected) / total;
}

/// Multiplicative W step. Gradient of the trace surrogate:
///   grad/2 = K W S - T1 + a (Kc W La - Kc |V|) + b G W
/// with K = X^T X, S = V^T C V, T1 = X^T P^T X C V, Kc = X^T P P^T X and
/// La = diag(colsum|V|). The sign-indefinite matrices (K, S, T1, Kc, G) are
/// split and their negative parts moved across the fraction, so numerator and
/// denominator stay elementwise nonnegative and zeros are absorbing.
inline Matrix update_w(const DataMatrix& x, const FactorState& s,
                       const AuxMatrices& aux, const Hyperparams& params) {
  detail::check_state_dims(x, s);
  const Eigen::Index n = s.w.rows();
  const Eigen::Index r = s.w.cols();

  const Matrix clean = s.p.transpose() * x.values;          // P^T X
  const Matrix cross = x.values.transpose() * clean;        // X^T P^T X
  const Matrix cv = aux.residual_gram * s.v;                // C V
  const Matrix linear = cross * cv;                         // T1
  const Matrix quad = s.v.transpose() * cv;                 // S = V^T C V

  const SignSplit kernel = sign_split(aux.kernel);
  const SignSplit quad_split = sign_split(quad);

  Matrix num = linear.cwiseMax(0.0);
  Matrix den = (-linear).cwiseMax(0.0);
  detail::fold_quadratic(kernel.pos, kernel.neg, s.w, quad_split.pos,
                         quad_split.neg, den, num);

  if (params.alpha > 0.0) {
    const Matrix abs_v = s.v.cwiseAbs();
    const Matrix col_mass = abs_v.colwise().sum().asDiagonal();  // La >= 0
    const SignSplit ck = sign_split(params.alpha * aux.clean_kernel);
    num.noalias() += ck.neg * s.w * col_mass;
    num.noalias() += ck.pos * abs_v;
    den.noalias() += ck.pos * s.w * col_mass;
    den.noalias() += ck.neg * abs_v;
  }
  if (params.beta > 0.0) {
    const SignSplit gap = sign_split(params.beta * aux.graph_gap);
    num.noalias() += gap.neg * s.w;
    den.noalias() += gap.pos * s.w;
  }

  den.array() += params.guard_eps;
  return s.w.cwiseProduct(num.cwiseQuotient(den));
}

/// Multiplicative V step (consumes the current W, which the solver refreshes
/// first). Gradient of the trace surrogate:
///   grad = 2 C V Gw - 2 C R1 + a (U4 - 2 Kc W) + 2 b G V
/// with Gw = W^T X^T X W, R1 = X^T P X W and
/// U4(i,r) = Kc_ii + Gw'_rr (Gw' = W^T Kc W), which is nonnegative. The
/// sign-indefinite matrices (C, Gw, R1, Kc, G) are split as in update_w.
inline Matrix update_v(const DataMatrix& x, const FactorState& s,
                       const AuxMatrices& aux, const Hyperparams& params) {
  detail::check_state_dims(x, s);
  const Eigen::Index n = s.v.rows();
  const Eigen::Index r = s.v.cols();

  const Matrix clean = s.p.transpose() * x.values;              // P^T X
  const Matrix linear = 2.0 * (clean.transpose() * (x.values * s.w));  // 2 R1
  const Matrix quad = 2.0 * (s.w.transpose() * (aux.kernel * s.w));    // 2 Gw

  const SignSplit gram = sign_split(aux.residual_gram);
  const SignSplit linear_split = sign_split(linear);
  const SignSplit quad_split = sign_split(quad);

  // descent: 2 C R1 (same-sign products feed the numerator)
  Matrix num = gram.pos * linear_split.pos;
  num.noalias() += gram.neg * linear_split.neg;
  Matrix den = gram.pos * linear_split.neg;
  den.noalias() += gram.neg * linear_split.pos;
  // ascent: 2 C V Gw
  detail::fold_quadratic(gram.pos, gram.neg, s.v, quad_split.pos, quad_split.neg,
                         den, num);

  if (params.alpha > 0.0) {
    const Matrix ckw = aux.clean_kernel * s.w;
    const SignSplit cross = sign_split(2.0 * params.alpha * ckw);
    num += cross.pos;
    den += cross.neg;
    const Vector sample_sq = aux.clean_kernel.diagonal();         // ||P^T x_i||^2
    const Vector anchor_sq = (s.w.transpose() * ckw).diagonal();  // ||P^T X w_r||^2
    den.noalias() += params.alpha *
                     (sample_sq.replicate(1, r) +
                      anchor_sq.transpose().replicate(n, 1)).cwiseMax(0.0);
  }
  if (params.beta > 0.0) {
    const SignSplit gap = sign_split(2.0 * params.beta * aux.graph_gap);
    num.noalias() += gap.neg * s.v;
    den.noalias() += gap.pos * s.v;
  }

  den.array() += params.guard_eps;
  return s.v.cwiseProduct(num.cwiseQuotient(den));
}

/// Multiplicative Q step with the Gram matrix of the stack split by sign:
///   Q' = Q o (pos(H^T H) + neg(H^T H) Q) / (pos(H^T H) Q + neg(H^T H) + guard),
/// then the diagonal is forced back to exactly zero.
inline Matrix update_q(const Matrix& h, const Matrix& q, double guard_eps) {
  if (h.cols() != q.rows() || q.rows() != q.cols())
    throw InvalidInputError("update_q: H columns must match the Q dimension");
  const Matrix gram = h.transpose() * h;
  const SignSplit split = sign_split(gram);
  Matrix num = split.pos;
  num.noalias() += split.neg * q;
  Matrix den = split.neg;
  den.noalias() += split.pos * q;
  den.array() += guard_eps;
  Matrix out = q.cwiseProduct(num.cwiseQuotient(den));
  out.diagonal().setZero();
  return out;
}

/// Linear solve for the projection:
///   (X (C + a Xi + b G) X^T + g S) P = X C V W^T X^T.
/// A numerically singular system gets a diagonal jitter of 1e-10 * trace / d,
/// retried at most 3 times with the jitter growing 100x; still failing is a
/// NumericError. The residual gate is the backward-stable measure
/// ||sys P - rhs|| / (||sys|| ||P|| + ||rhs||) <= 1e-10.
inline Matrix solve_p(const DataMatrix& x, const FactorState& s,
                      const AuxMatrices& aux, const Hyperparams& params) {
  detail::check_state_dims(x, s);
  const Eigen::Index d = x.dim();

  Matrix inner = aux.residual_gram;
  if (params.alpha > 0.0) inner += params.alpha * aux.locality_gram;
  if (params.beta > 0.0) inner += params.beta * aux.graph_gap;

  Matrix sys = x.values * inner * x.values.transpose();
  sys += (params.gamma * s.s_diag).asDiagonal();

  Matrix rhs = x.values * (aux.residual_gram * s.v) *
               (x.values * s.w).transpose();
  if (rhs.isZero(0.0)) return Matrix::Zero(d, d);

  const double sys_norm = sys.norm();
  const double rhs_norm = rhs.norm();
  double jitter = 1e-10 * sys.trace() / static_cast<double>(d);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Matrix attempt_sys = sys;
    if (attempt > 0) {
      attempt_sys.diagonal().array() += jitter;
      jitter *= 100.0;
    }
    Matrix p = attempt_sys.ldlt().solve(rhs);
    if (!p.allFinite()) continue;
    const double rel = (sys * p - rhs).norm() / (sys_norm * p.norm() + rhs_norm);
    if (rel <= 1e-10) return p;
  }
  throw NumericError("solve_p: projection system is singular after jitter retries");
}

}  // namespace rfalcf

#endif  // RFALCF_UPDATES_HPP
