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

#include <sstream>

#include "rfalcf/run_config.hpp"

using namespace rfalcf;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

}  // namespace

TEST_CASE("run config parses every known key") {
  const RunConfig cfg = parse(
      "alpha = 0.25\n"
      "beta=0.5\n"
      "gamma = 1.0\n"
      "rank = 4\n"
      "conv_eps = 1e-6\n"
      "guard_eps = 1e-9\n"
      "max_iter = 123\n"
      "k_range = 2..5\n"
      "restarts = 7\n"
      "subset_draws = 3\n"
      "seed = 99\n"
      "method = cf\n"
      "# trailing comment\n");
  REQUIRE(cfg.params.alpha == 0.25);
  REQUIRE(cfg.params.beta == 0.5);
  REQUIRE(cfg.params.gamma == 1.0);
  REQUIRE(cfg.params.rank == 4);
  REQUIRE(cfg.params.conv_eps == 1e-6);
  REQUIRE(cfg.params.guard_eps == 1e-9);
  REQUIRE(cfg.params.max_iter == 123);
  REQUIRE(cfg.k_min == 2);
  REQUIRE(cfg.k_max == 5);
  REQUIRE(cfg.restarts == 7);
  REQUIRE(cfg.subset_draws == 3);
  REQUIRE(cfg.seed == 99);
  REQUIRE(cfg.method == "cf");
}

TEST_CASE("run config defaults survive an empty file") {
  const RunConfig cfg = parse("");
  REQUIRE(cfg.method == "rfa-lcf");
  REQUIRE(cfg.k_min == 2);
  REQUIRE(cfg.k_max == 10);
  REQUIRE(cfg.restarts == 30);
  REQUIRE(cfg.subset_draws == 10);
  REQUIRE(cfg.params.max_iter == 500);
}

TEST_CASE("run config accepts a single-valued k_range") {
  const RunConfig cfg = parse("k_range = 3\n");
  REQUIRE(cfg.k_min == 3);
  REQUIRE(cfg.k_max == 3);
}

TEST_CASE("run config rejects unknown keys") {
  REQUIRE_THROWS_WITH(parse("alhpa = 0.1\n"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
}

TEST_CASE("run config rejects invalid values") {
  REQUIRE_THROWS_AS(parse("rank = 0\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("alpha = -1\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("conv_eps = 0\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("max_iter = 0\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("method = magic\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("k_range = 5..2\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("alpha = abc\n"), InvalidInputError);
  REQUIRE_THROWS_AS(parse("just a line\n"), InvalidInputError);
}
