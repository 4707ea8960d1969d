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

#ifndef OPE_SRC_LOGIT_SOLVER_HPP_
#define OPE_SRC_LOGIT_SOLVER_HPP_

#include <Eigen/Dense>

namespace ope::internal {

// Penalized multinomial logit with class 0 as the base category:
//
//   maximize  sum_t sum_c Y_tc log p_c(x_t) - lambda * sum_{c>=1} sum_j w_j beta_jc^2
//
// Targets may be fractional (rows of Y sum to one), which covers binary
// logistic regression on rewards in [0, 1].
struct LogitProblem {
  const Eigen::MatrixXd* design = nullptr;   // n x k
  const Eigen::MatrixXd* targets = nullptr;  // n x C
  Eigen::VectorXd penalty_weights;           // k; 0 leaves a column unpenalized
  double lambda = 0.0;
  int max_iter = 200;
  double tol = 1e-8;  // On the infinity norm of the gradient divided by n.
};

struct LogitFit {
  Eigen::MatrixXd coefficients;  // k x C; column 0 is identically zero
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Damped Newton with step halving; falls back to a gradient step when the
// Hessian system cannot be solved. Throws ConvergenceError at max_iter and
// NumericalError when the data are separated (the optimum is at infinity).
LogitFit FitMultinomialLogit(const LogitProblem& problem);

// Row-wise softmax of design * coefficients.
Eigen::MatrixXd LogitProbabilities(const Eigen::MatrixXd& design,
                                   const Eigen::MatrixXd& coefficients);

}  // namespace ope::internal

#endif  // OPE_SRC_LOGIT_SOLVER_HPP_
