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

#ifndef OPE_RANDOM_HPP_
#define OPE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace ope {

// Seedable random source with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard.
// The standard library's distributions are implementation-defined, so every
// transform below is written out explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();

  // Standard normal via the Marsaglia polar method (no cached second draw).
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

  // Index drawn from the (not necessarily normalized) nonnegative weights.
  int Categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace ope

#endif  // OPE_RANDOM_HPP_
