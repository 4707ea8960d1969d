/*
 * Copyright 2026 The OPE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OPE_SIMULATE_HPP_
#define OPE_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>

#include "ope/environment.hpp"
#include "ope/types.hpp"

namespace ope {

// Simulates `rounds` rounds of logging in `batches` batches of ceil(T/B)
// rounds. Each round draws a context from q, a probability vector p_t from
// the batch's logging distribution, an action from p_t and a reward from the
// chosen arm. Every record stores p_t as the realized propensity and the
// mixture mean p0(x) for its batch as the true propensity.
//
// Batched rules freeze their estimates at each batch start. Identical
// arguments always produce a bit-identical log.
BanditLog RunLogging(const SyntheticEnv& env, std::size_t rounds, int batches,
                     std::uint64_t seed);

}  // namespace ope

#endif  // OPE_SIMULATE_HPP_
