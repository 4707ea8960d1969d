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

#ifndef OPE_NUMERIC_HPP_
#define OPE_NUMERIC_HPP_

#include <span>
#include <vector>

namespace ope {

// Pairwise (cascade) summation. The reduction tree depends only on the input
// length, so results are bit-stable for a fixed ordering.
double PairwiseSum(std::span<const double> values);

// Arithmetic mean via PairwiseSum. Requires a non-empty input.
double Mean(std::span<const double> values);

// Unbiased sample variance (n - 1 denominator). Requires n >= 2.
double SampleVariance(std::span<const double> values);

// Standard normal cumulative distribution function.
double NormalCdf(double x);

// Inverse of NormalCdf for p in (0, 1). Acklam's rational approximation
// followed by one Halley refinement step; absolute error below 1e-12 over
// the open unit interval.
double NormalQuantile(double p);

}  // namespace ope

#endif  // OPE_NUMERIC_HPP_
