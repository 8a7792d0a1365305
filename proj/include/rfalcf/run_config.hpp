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

#ifndef RFALCF_RUN_CONFIG_HPP
#define RFALCF_RUN_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "rfalcf/types.hpp"

namespace rfalcf {

/// Plain-text key=value run configuration; '#' starts a comment. Unknown keys
/// are rejected. Keys: alpha, beta, gamma, rank, conv_eps, guard_eps,
/// max_iter, k_range (e.g. "2..10" or "3"), restarts, subset_draws, seed,
/// method (rfa-lcf | cf | nmf).
struct RunConfig {
  Hyperparams params;
  int k_min = 2;
  int k_max = 10;
  int restarts = 30;
  int subset_draws = 10;
  std::uint64_t seed = 0;
  std::string method = "rfa-lcf";
};

namespace detail {

inline double config_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError("config: bad numeric value for " + key + ": '" + value + "'");
  }
}

inline long long config_int(const std::string& key, const std::string& value) {
  long long v = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidInputError("config: bad integer value for " + key + ": '" + value + "'");
  return v;
}

inline std::string config_trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::config_trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInputError("config line " + std::to_string(line_no) +
                              ": expected key=value");
    const std::string key = detail::config_trim(line.substr(0, eq));
    const std::string value = detail::config_trim(line.substr(eq + 1));

    if (key == "alpha") {
      cfg.params.alpha = detail::config_double(key, value);
    } else if (key == "beta") {
      cfg.params.beta = detail::config_double(key, value);
    } else if (key == "gamma") {
      cfg.params.gamma = detail::config_double(key, value);
    } else if (key == "rank") {
      cfg.params.rank = static_cast<int>(detail::config_int(key, value));
    } else if (key == "conv_eps") {
      cfg.params.conv_eps = detail::config_double(key, value);
    } else if (key == "guard_eps") {
      cfg.params.guard_eps = detail::config_double(key, value);
    } else if (key == "max_iter") {
      cfg.params.max_iter = static_cast<int>(detail::config_int(key, value));
    } else if (key == "k_range") {
      const auto dots = value.find("..");
      if (dots == std::string::npos) {
        cfg.k_min = cfg.k_max = static_cast<int>(detail::config_int(key, value));
      } else {
        cfg.k_min = static_cast<int>(detail::config_int(key, value.substr(0, dots)));
        cfg.k_max = static_cast<int>(detail::config_int(key, value.substr(dots + 2)));
      }
      if (cfg.k_min < 1 || cfg.k_max < cfg.k_min)
        throw InvalidInputError("config: k_range must satisfy 1 <= k_min <= k_max");
    } else if (key == "restarts") {
      cfg.restarts = static_cast<int>(detail::config_int(key, value));
      if (cfg.restarts < 1) throw InvalidInputError("config: restarts must be >= 1");
    } else if (key == "subset_draws") {
      cfg.subset_draws = static_cast<int>(detail::config_int(key, value));
      if (cfg.subset_draws < 1)
        throw InvalidInputError("config: subset_draws must be >= 1");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::config_int(key, value));
    } else if (key == "method") {
      if (value != "rfa-lcf" && value != "cf" && value != "nmf")
        throw InvalidInputError("config: method must be rfa-lcf, cf or nmf, got '" +
                                value + "'");
      cfg.method = value;
    } else {
      throw InvalidInputError("config line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
    }
  }
  // validate against the Hyperparams invariants (rank vs N is checked at fit time)
  validate_hyperparams(cfg.params, -1);
  if (cfg.params.max_iter < 1)
    throw InvalidInputError("config: max_iter must be >= 1");
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("config file not found: '" + path + "'");
  return parse_run_config(in);
}

}  // namespace rfalcf

#endif  // RFALCF_RUN_CONFIG_HPP
