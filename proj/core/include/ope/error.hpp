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

#ifndef OPE_ERROR_HPP_
#define OPE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ope {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad logs, inconsistent configuration, unsupported requests.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed: singular design, non-convergence, separation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An iterative fit stopped at its iteration cap.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double gradient_norm)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        gradient_norm_(gradient_norm) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  std::vector<double> last_iterate_;
  double gradient_norm_;
};

}  // namespace ope

#endif  // OPE_ERROR_HPP_
