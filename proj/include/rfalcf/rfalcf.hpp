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

#ifndef RFALCF_RFALCF_HPP
#define RFALCF_RFALCF_HPP

#include "rfalcf/baselines.hpp"
#include "rfalcf/clustering.hpp"
#include "rfalcf/data.hpp"
#include "rfalcf/model.hpp"
#include "rfalcf/run_config.hpp"
#include "rfalcf/solver.hpp"
#include "rfalcf/types.hpp"
#include "rfalcf/updates.hpp"

#endif  // RFALCF_RFALCF_HPP
