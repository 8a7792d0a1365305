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

#include <random>

#include "rfalcf/baselines.hpp"

#include "test_support.hpp"

using namespace rfalcf;
using testsupport::random_data;
using testsupport::uniform_matrix;

TEST_CASE("nmf_fit recovers a planted rank-1 product") {
  std::mt19937_64 gen(80);
  const Matrix w = uniform_matrix(gen, 6, 1, 0.2, 1.0);
  const Matrix v = uniform_matrix(gen, 9, 1, 0.2, 1.0);
  DataMatrix x;
  x.values = w * v.transpose();
  const BaselineResult result = nmf_fit(x, 1, 500, 7);
  REQUIRE(result.trace.back().second <= 1e-6 * x.values.norm());
}

TEST_CASE("nmf_fit on the zero matrix reaches zero loss after one update") {
  DataMatrix x;
  x.values = Matrix::Zero(4, 5);
  const BaselineResult result = nmf_fit(x, 2, 10, 3);
  REQUIRE(result.trace[1].second == 0.0);
  REQUIRE(result.trace.back().second == 0.0);
  REQUIRE(result.basis.allFinite());
  REQUIRE((result.representation.array() >= 0.0).all());
}

TEST_CASE("nmf_fit rejects negative inputs") {
  DataMatrix x;
  x.values = Matrix::Constant(3, 4, -1.0);
  REQUIRE_THROWS_AS(nmf_fit(x, 2, 10, 1), InvalidInputError);
}

TEST_CASE("nmf_fit is deterministic per seed") {
  std::mt19937_64 gen(81);
  const DataMatrix x = random_data(gen, 5, 8);
  const BaselineResult a = nmf_fit(x, 3, 50, 11);
  const BaselineResult b = nmf_fit(x, 3, 50, 11);
  REQUIRE(a.basis == b.basis);
  REQUIRE(a.representation == b.representation);
}

TEST_CASE("cf_fit recovers planted duplicated columns") {
  std::mt19937_64 gen(82);
  const Matrix prototypes = uniform_matrix(gen, 7, 3, 0.2, 1.0);
  DataMatrix x;
  x.values.resize(7, 12);
  for (int j = 0; j < 12; ++j) x.values.col(j) = prototypes.col(j % 3);
  const BaselineResult result = cf_fit(x, 3, 2000, 5);
  REQUIRE(result.trace.back().second <= 1e-4 * x.values.norm());
}

TEST_CASE("cf_fit with zero iterations returns the initialization") {
  std::mt19937_64 gen(83);
  const DataMatrix x = random_data(gen, 4, 6);
  const BaselineResult result = cf_fit(x, 2, 0, 9);
  REQUIRE(result.trace.size() == 1);
  REQUIRE(result.trace[0].first == 0);
  REQUIRE((result.representation.array() > 0.0).all());
}

TEST_CASE("cf_fit is deterministic per seed") {
  std::mt19937_64 gen(84);
  const DataMatrix x = random_data(gen, 4, 7);
  const BaselineResult a = cf_fit(x, 2, 40, 13);
  const BaselineResult b = cf_fit(x, 2, 40, 13);
  REQUIRE(a.representation == b.representation);
  REQUIRE(a.basis == b.basis);
}

TEST_CASE("cf_fit validates the rank against the sample count") {
  std::mt19937_64 gen(85);
  const DataMatrix x = random_data(gen, 3, 4);
  REQUIRE_THROWS_AS(cf_fit(x, 5, 10, 1), InvalidInputError);
}

TEST_CASE("baseline losses are monotone non-increasing and factors nonnegative") {
  std::mt19937_64 gen(86);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 4 + trial % 6;
    const Eigen::Index n = 6 + trial % 8;
    const int rank = 1 + trial % 4;
    const DataMatrix x = random_data(gen, d, n);

    const BaselineResult nmf = nmf_fit(x, rank, 100, 200 + trial);
    for (std::size_t i = 1; i < nmf.trace.size(); ++i)
      REQUIRE(nmf.trace[i].second <= nmf.trace[i - 1].second + 1e-12);
    REQUIRE((nmf.representation.array() >= 0.0).all());
    REQUIRE((nmf.basis.array() >= 0.0).all());

    const BaselineResult cf = cf_fit(x, rank, 100, 300 + trial);
    for (std::size_t i = 1; i < cf.trace.size(); ++i)
      REQUIRE(cf.trace[i].second <= cf.trace[i - 1].second + 1e-12);
    REQUIRE((cf.representation.array() >= 0.0).all());
  }
}

TEST_CASE("cf_fit keeps factors nonnegative on signed data") {
  std::mt19937_64 gen(87);
  const DataMatrix x = random_data(gen, 5, 8, -1.0, 1.0);
  const BaselineResult result = cf_fit(x, 3, 60, 17);
  REQUIRE((result.representation.array() >= 0.0).all());
  REQUIRE(result.representation.allFinite());
}
