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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "rfalcf/model.hpp"
#include "rfalcf/updates.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

using namespace rfalcf;
using testsupport::random_data;
using testsupport::random_state;
using testsupport::uniform_matrix;

namespace {

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("weighted_centering with uniform weights is the centering matrix") {
  const Matrix he = weighted_centering(Vector::Ones(3));
  const Matrix expected = Matrix::Identity(3, 3) - Matrix::Constant(3, 3, 1.0 / 3.0);
  REQUIRE((he - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("weighted_centering matches direct scalar evaluation for diag(1,3)") {
  Vector m(2);
  m << 1.0, 3.0;
  const Matrix he = weighted_centering(m);
  REQUIRE(he(0, 0) == Catch::Approx(1.0 - 1.0 / 4.0).epsilon(1e-14));
  REQUIRE(he(0, 1) == Catch::Approx(-3.0 / 4.0).epsilon(1e-14));
  REQUIRE(he(1, 0) == Catch::Approx(-1.0 / 4.0).epsilon(1e-14));
  REQUIRE(he(1, 1) == Catch::Approx(1.0 - 3.0 / 4.0).epsilon(1e-14));
}

TEST_CASE("weighted_centering annihilates the ones vector for any valid weights") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 9;
    const Vector m = uniform_matrix(gen, n, 1, 0.05, 3.0).col(0);
    const Matrix he = weighted_centering(m);
    REQUIRE((he * Vector::Ones(n)).cwiseAbs().maxCoeff() <=
            1e-12 * static_cast<double>(n));
  }
}

TEST_CASE("weighted_centering rejects non-positive weights") {
  Vector m(3);
  m << 1.0, 0.0, 2.0;
  REQUIRE_THROWS_AS(weighted_centering(m), InvalidInputError);
  m << 1.0, -0.5, 2.0;
  REQUIRE_THROWS_AS(weighted_centering(m), InvalidInputError);
}

TEST_CASE("build_aux: zero coordinates make the locality gram vanish") {
  std::mt19937_64 gen(11);
  const DataMatrix x = random_data(gen, 3, 5);
  FactorState s = random_state(gen, 3, 5, 2);
  s.v.setZero();
  const AuxMatrices aux = build_aux(x, s);
  REQUIRE(aux.locality_gram.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_aux: zero Q gives the identity graph gap") {
  std::mt19937_64 gen(12);
  const DataMatrix x = random_data(gen, 3, 4);
  FactorState s = random_state(gen, 3, 4, 2);
  s.q.setZero();
  const AuxMatrices aux = build_aux(x, s);
  REQUIRE((aux.graph_gap - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("build_aux locality gram equals the per-sample brute-force sum") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const DataMatrix x = random_data(gen, 3, 4);
    const FactorState s = random_state(gen, 3, 4, 2);
    const AuxMatrices aux = build_aux(x, s);
    const Matrix expected = oracle::xi_bruteforce(s.w, s.v);
    REQUIRE((aux.locality_gram - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("build_aux invariants: symmetry and positive semidefiniteness") {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const Eigen::Index n = 3 + trial % 7;
    const Eigen::Index r = 1 + trial % 3;
    const DataMatrix x = random_data(gen, d, n);
    const FactorState s = random_state(gen, d, n, r);
    const AuxMatrices aux = build_aux(x, s);

    const auto sym_defect = [](const Matrix& m) {
      return (m - m.transpose()).cwiseAbs().maxCoeff() /
             std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    };
    REQUIRE(sym_defect(aux.residual_gram) < 1e-10);
    REQUIRE(sym_defect(aux.graph_gap) < 1e-10);
    REQUIRE(sym_defect(aux.locality_gram) < 1e-10);

    const auto min_eig = [](const Matrix& m) {
      return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
    };
    REQUIRE(min_eig(aux.residual_gram) >= -1e-8 * aux.residual_gram.norm());
    REQUIRE(min_eig(aux.graph_gap) >= -1e-8 * aux.graph_gap.norm());

    REQUIRE(aux.weight_sum > 0.0);
  }
}

TEST_CASE("build_aux rejects inconsistent dimensions") {
  std::mt19937_64 gen(15);
  const DataMatrix x = random_data(gen, 3, 5);
  FactorState s = random_state(gen, 3, 5, 2);
  s.w = uniform_matrix(gen, 4, 2);  // wrong sample count
  REQUIRE_THROWS_AS(build_aux(x, s), InvalidInputError);
}

TEST_CASE("flexible_residual vanishes at exact reconstruction") {
  std::mt19937_64 gen(16);
  const Eigen::Index n = 4;
  DataMatrix x = random_data(gen, 3, n);
  FactorState s;
  s.p = Matrix::Identity(3, 3);
  s.w = Matrix::Identity(n, n);  // R = N, X W V^T = X
  s.v = Matrix::Identity(n, n);
  s.q = Matrix::Zero(n, n);
  s.b = Vector::Zero(3);
  s.m_diag = Vector::Ones(n);
  s.s_diag = Vector::Ones(3);
  REQUIRE(flexible_residual(x, s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("flexible_residual is zero when every variable is zero") {
  std::mt19937_64 gen(17);
  const DataMatrix x = random_data(gen, 3, 4);
  FactorState s = random_state(gen, 3, 4, 2);
  s.p.setZero();
  s.w.setZero();
  s.v.setZero();
  s.b.setZero();
  REQUIRE(flexible_residual(x, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flexible_residual matches independent entrywise recomputation") {
  std::mt19937_64 gen(18);
  const DataMatrix x = random_data(gen, 3, 5);
  const FactorState s = random_state(gen, 3, 5, 2);
  const Matrix y = flexible_residual(x, s);
  const Matrix expected = oracle::residual_scalar(x, s);
  REQUIRE((y - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("objective reduces to the residual term when trade-offs are zero") {
  std::mt19937_64 gen(19);
  const DataMatrix x = random_data(gen, 4, 6);
  const FactorState s = random_state(gen, 4, 6, 2);
  Hyperparams params;
  params.alpha = params.beta = params.gamma = 0.0;
  const ObjectiveBreakdown bd = objective(x, s, params);
  REQUIRE(bd.locality_f == 0.0);
  REQUIRE(bd.weighting_g == 0.0);
  REQUIRE(bd.projection_l21 == 0.0);
  REQUIRE(bd.total == bd.residual_l21);
  REQUIRE(bd.residual_l21 ==
          Catch::Approx(flexible_residual(x, s).rowwise().norm().sum()));
}

TEST_CASE("objective isolates the weighting term") {
  std::mt19937_64 gen(20);
  const DataMatrix x = random_data(gen, 3, 5);
  FactorState s = random_state(gen, 3, 5, 2);
  s.p.setZero();
  s.v.setZero();
  s.q.setZero();
  s.b.setZero();
  Hyperparams params;
  params.alpha = 1.0;
  params.beta = 0.7;
  params.gamma = 1.0;
  const ObjectiveBreakdown bd = objective(x, s, params);
  REQUIRE(bd.residual_l21 == 0.0);
  REQUIRE(bd.locality_f == 0.0);
  REQUIRE(bd.projection_l21 == 0.0);
  REQUIRE(bd.weighting_g == Catch::Approx(0.7 * s.w.squaredNorm()).epsilon(1e-12));
  REQUIRE(bd.total == bd.weighting_g);
}

TEST_CASE("objective matches the scalar-loop oracle") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    const Eigen::Index n = 3 + trial % 5;
    const DataMatrix x = random_data(gen, d, n);
    const FactorState s = random_state(gen, d, n, 2);
    Hyperparams params;
    params.alpha = 0.3;
    params.beta = 0.9;
    params.gamma = 0.4;
    const ObjectiveBreakdown bd = objective(x, s, params);
    const double expected = oracle::objective_scalar(x, s, params);
    REQUIRE(rel_diff(bd.total, expected) < 1e-10);
  }
}

TEST_CASE("objective terms are nonnegative and sum to the total") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const DataMatrix x = random_data(gen, 4, 6);
    const FactorState s = random_state(gen, 4, 6, 3);
    Hyperparams params;
    params.alpha = 0.5;
    params.beta = 0.2;
    params.gamma = 0.8;
    const ObjectiveBreakdown bd = objective(x, s, params);
    REQUIRE(bd.residual_l21 >= 0.0);
    REQUIRE(bd.locality_f >= 0.0);
    REQUIRE(bd.weighting_g >= 0.0);
    REQUIRE(bd.projection_l21 >= 0.0);
    const double sum =
        bd.residual_l21 + bd.locality_f + bd.weighting_g + bd.projection_l21;
    REQUIRE(rel_diff(bd.total, sum) < 1e-12);
  }
}

TEST_CASE("objective terms scale linearly in their trade-off parameter") {
  std::mt19937_64 gen(23);
  const DataMatrix x = random_data(gen, 4, 6);
  const FactorState s = random_state(gen, 4, 6, 2);
  Hyperparams params;
  params.alpha = 0.37;
  params.beta = 0.53;
  params.gamma = 0.71;
  const ObjectiveBreakdown base = objective(x, s, params);
  Hyperparams doubled = params;
  doubled.alpha *= 2.0;
  doubled.beta *= 2.0;
  doubled.gamma *= 2.0;
  const ObjectiveBreakdown twice = objective(x, s, doubled);
  REQUIRE(twice.locality_f == 2.0 * base.locality_f);
  REQUIRE(twice.weighting_g == 2.0 * base.weighting_g);
  REQUIRE(twice.projection_l21 == 2.0 * base.projection_l21);
}

TEST_CASE("objective names the non-finite term") {
  std::mt19937_64 gen(24);
  const DataMatrix x = random_data(gen, 3, 4);
  Hyperparams params;

  FactorState bad_bias = random_state(gen, 3, 4, 2);
  bad_bias.b(0) = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_WITH(objective(x, bad_bias, params),
                      Catch::Matchers::ContainsSubstring("residual_l21"));

  FactorState bad_q = random_state(gen, 3, 4, 2);
  bad_q.q(0, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_WITH(objective(x, bad_q, params),
                      Catch::Matchers::ContainsSubstring("weighting_g"));
}

TEST_CASE("L2,1 surrogate identity holds with weights refreshed from the residual") {
  std::mt19937_64 gen(25);
  for (int trial = 0; trial < 10; ++trial) {
    const DataMatrix x = random_data(gen, 4, 6);
    FactorState s = random_state(gen, 4, 6, 2);
    const Matrix y = flexible_residual(x, s);
    s.m_diag = refresh_m(y, 1e-8);
    const double l21 = y.rowwise().norm().sum();
    const double surrogate =
        2.0 * (y.transpose() * s.m_diag.asDiagonal() * y).trace();
    REQUIRE(rel_diff(l21, surrogate) < 1e-10);
  }
}

TEST_CASE("bias elimination identity: residual equals its centered form") {
  std::mt19937_64 gen(26);
  for (int trial = 0; trial < 10; ++trial) {
    const DataMatrix x = random_data(gen, 4, 6);
    FactorState s = random_state(gen, 4, 6, 2);
    s.b = solve_b(x, s.p, s.w, s.v, s.m_diag);
    const Matrix y = flexible_residual(x, s);

    const Matrix he = weighted_centering(s.m_diag);
    const Matrix centered =
        he * x.values.transpose() * s.p -
        he * s.v * s.w.transpose() * x.values.transpose();
    REQUIRE((y - centered).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, y.cwiseAbs().maxCoeff()));
  }
}
