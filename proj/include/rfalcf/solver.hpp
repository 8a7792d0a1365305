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

#ifndef RFALCF_SOLVER_HPP
#define RFALCF_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rfalcf/model.hpp"
#include "rfalcf/types.hpp"
#include "rfalcf/updates.hpp"

namespace rfalcf {

struct TraceRow {
  int iter = 0;
  ObjectiveBreakdown breakdown;
  double delta_v = 0.0;  // ||V_t - V_{t-1}||_F; +inf on the initial row
  double elapsed_ms = 0.0;
};

struct FitTrace {
  std::vector<TraceRow> rows;
};

struct FitResult {
  FactorState state;
  FitTrace trace;
  bool converged = false;
  int iterations_run = 0;
  double conv_eps_abs = 0.0;  // absolute threshold actually applied
};

/// Observer invoked after every completed iteration (and once for the initial
/// state with iter = 0); used by invariant audits and progress reporting.
using FitObserver = std::function<void(int iter, const FactorState&)>;

/// Initial state: Q from clamped cosine similarity (zero diagonal), W and V
/// i.i.d. uniform on (0,1) from the seeded generator, P = I, M = S = I, and b
/// solved in closed form from those values.
inline FactorState init_state(const DataMatrix& x, const Hyperparams& params,
                              std::uint64_t seed) {
  validate_data(x);
  validate_hyperparams(params, x.samples());

  const Eigen::Index d = x.dim();
  const Eigen::Index n = x.samples();
  const Eigen::Index r = params.rank;

  FactorState s;
  s.q = Matrix::Zero(n, n);
  const Vector col_norms = x.values.colwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double denom = col_norms(i) * col_norms(j);
      // zero columns get cosine 0 against everything
      const double cos_ij =
          denom > 0.0 ? x.values.col(i).dot(x.values.col(j)) / denom : 0.0;
      const double clamped = std::max(0.0, cos_ij);
      s.q(i, j) = clamped;
      s.q(j, i) = clamped;
    }
  }

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  s.w = Matrix(n, r);
  s.v = Matrix(n, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) s.w(i, j) = unif(gen);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) s.v(i, j) = unif(gen);

  s.p = Matrix::Identity(d, d);
  s.m_diag = Vector::Ones(n);
  s.s_diag = Vector::Ones(d);
  s.b = solve_b(x, s.p, s.w, s.v, s.m_diag);
  return s;
}

/// Alternating optimization. Each iteration, in order: refresh M (from the
/// current residual) and S (from the current P), recompute b and the
/// auxiliary matrices, update W then V (the V step sees the fresh W), rebuild
/// the stack and update Q, solve P against the refreshed G and Xi, record a
/// trace row, and stop once ||V_t - V_{t-1}||_F <= conv_eps * ||V_0||_F.
inline FitResult fit(const DataMatrix& x, const Hyperparams& params,
                     std::uint64_t seed, const FitObserver& observer = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start]() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  FitResult result;
  result.state = init_state(x, params, seed);
  result.conv_eps_abs = params.conv_eps * result.state.v.norm();

  result.trace.rows.push_back({0, objective(x, result.state, params),
                               std::numeric_limits<double>::infinity(), elapsed_ms()});
  if (observer) observer(0, result.state);

  FactorState& s = result.state;
  for (int t = 1; t <= params.max_iter; ++t) {
    try {
      const Matrix y = flexible_residual(x, s);
      s.m_diag = refresh_m(y, params.guard_eps);
      s.s_diag = refresh_s(s.p, params.guard_eps);
      s.b = solve_b(x, s.p, s.w, s.v, s.m_diag);

      AuxMatrices aux = build_aux(x, s);
      const Matrix v_prev = s.v;
      s.w = update_w(x, s, aux, params);
      s.v = update_v(x, s, aux, params);

      const Matrix h = stacked_matrix(x, s);
      s.q = update_q(h, s.q, params.guard_eps);

      // the P solve must see the just-updated Q, W and V
      aux.graph_gap = graph_gap_matrix(s.q);
      aux.locality_gram = locality_gram_matrix(s.w, s.v);
      aux.stacked = h;
      s.p = solve_p(x, s, aux, params);

      const double delta_v = (s.v - v_prev).norm();
      const ObjectiveBreakdown bd = objective(x, s, params);
      result.trace.rows.push_back({t, bd, delta_v, elapsed_ms()});
      result.iterations_run = t;

#ifndef NDEBUG
      check_state(x, s, params.rank);
#endif
      if (observer) observer(t, s);

      if (delta_v <= result.conv_eps_abs) {
        result.converged = true;
        break;
      }
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(t) + ": " + e.what());
    }
  }
  return result;
}

/// Writes the per-iteration trace as CSV. Doubles are printed with enough
/// digits to round-trip exactly.
inline void export_trace(const FitTrace& trace, std::ostream& out) {
  out << "iter,residual_l21,locality_f,weighting_g,projection_l21,total,"
         "delta_v,elapsed_ms\n";
  for (const TraceRow& row : trace.rows) {
    const ObjectiveBreakdown& bd = row.breakdown;
    out << row.iter << ',' << detail::format_double(bd.residual_l21) << ','
        << detail::format_double(bd.locality_f) << ','
        << detail::format_double(bd.weighting_g) << ','
        << detail::format_double(bd.projection_l21) << ','
        << detail::format_double(bd.total) << ','
        << detail::format_double(row.delta_v) << ','
        << detail::format_double(row.elapsed_ms) << '\n';
  }
  if (!out) throw IoError("export_trace: write failed");
}

}  // namespace rfalcf

#endif  // RFALCF_SOLVER_HPP
