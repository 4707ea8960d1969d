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

#include "logit_solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ope/error.hpp"

namespace ope::internal {
namespace {

constexpr double kSeparationNorm = 1e3;
// A converged fit whose next Newton step would still move a coefficient by
// this much is sitting on a flat ridge toward infinity.
constexpr double kSeparationStep = 0.5;
constexpr int kMaxHalvings = 50;

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd Unpack(const VectorXd& theta, Index k, Index classes) {
  MatrixXd beta = MatrixXd::Zero(k, classes);
  for (Index c = 1; c < classes; ++c) beta.col(c) = theta.segment((c - 1) * k, k);
  return beta;
}

double Objective(const LogitProblem& pr, const MatrixXd& beta) {
  const MatrixXd eta = (*pr.design) * beta;
  double ll = 0.0;
  for (Index t = 0; t < eta.rows(); ++t) {
    const double mx = eta.row(t).maxCoeff();
    const double lse = mx + std::log((eta.row(t).array() - mx).exp().sum());
    for (Index c = 0; c < eta.cols(); ++c) {
      const double y = (*pr.targets)(t, c);
      if (y != 0.0) ll += y * (eta(t, c) - lse);
    }
  }
  double pen = 0.0;
  for (Index c = 1; c < beta.cols(); ++c) {
    pen += (pr.penalty_weights.array() * beta.col(c).array().square()).sum();
  }
  return ll - pr.lambda * pen;
}

std::vector<double> ToStd(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

MatrixXd LogitProbabilities(const MatrixXd& design, const MatrixXd& coefficients) {
  MatrixXd eta = design * coefficients;
  for (Index t = 0; t < eta.rows(); ++t) {
    const double mx = eta.row(t).maxCoeff();
    eta.row(t) = (eta.row(t).array() - mx).exp();
    eta.row(t) /= eta.row(t).sum();
  }
  return eta;
}

LogitFit FitMultinomialLogit(const LogitProblem& pr) {
  const MatrixXd& x = *pr.design;
  const MatrixXd& y = *pr.targets;
  const Index n = x.rows();
  const Index k = x.cols();
  const Index classes = y.cols();
  if (n == 0) throw ValidationError("logit fit on an empty sample");
  if (classes < 2) throw ValidationError("logit fit needs at least two classes");
  const Index dim = k * (classes - 1);
  const double scale = 1.0 / static_cast<double>(n);

  VectorXd theta = VectorXd::Zero(dim);
  MatrixXd beta = Unpack(theta, k, classes);
  double obj = Objective(pr, beta);

  LogitFit fit;
  for (int iter = 0; iter <= pr.max_iter; ++iter) {
    const MatrixXd p = LogitProbabilities(x, beta);
    VectorXd grad(dim);
    for (Index c = 1; c < classes; ++c) {
      grad.segment((c - 1) * k, k) =
          x.transpose() * (y.col(c) - p.col(c)) -
          2.0 * pr.lambda * pr.penalty_weights.cwiseProduct(beta.col(c));
    }
    // Negative Hessian.
    MatrixXd info = MatrixXd::Zero(dim, dim);
    for (Index c = 1; c < classes; ++c) {
      for (Index d = c; d < classes; ++d) {
        VectorXd w = (c == d) ? VectorXd(p.col(c).array() * (1.0 - p.col(c).array()))
                              : VectorXd(-p.col(c).array() * p.col(d).array());
        const MatrixXd block = x.transpose() * w.asDiagonal() * x;
        info.block((c - 1) * k, (d - 1) * k, k, k) = block;
        if (c != d) info.block((d - 1) * k, (c - 1) * k, k, k) = block.transpose();
      }
      info.block((c - 1) * k, (c - 1) * k, k, k).diagonal() +=
          2.0 * pr.lambda * pr.penalty_weights;
    }

    Eigen::LDLT<MatrixXd> ldlt(info);
    VectorXd step;
    bool newton = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (newton) {
      step = ldlt.solve(grad);
      newton = step.allFinite() && grad.dot(step) > 0.0;
    }
    if (!newton) {
      // Gradient ascent with a conservative curvature bound.
      const double lipschitz = 0.5 * x.squaredNorm() + 2.0 * pr.lambda * pr.penalty_weights.maxCoeff() + 1e-12;
      step = grad / lipschitz;
    }

    fit.gradient_norm = grad.cwiseAbs().maxCoeff() * scale;
    fit.iterations = iter;
    if (fit.gradient_norm < pr.tol) {
      if (newton && step.cwiseAbs().maxCoeff() > kSeparationStep) {
        throw NumericalError(
            "perfect separation detected in logit fit (fitted probabilities "
            "degenerate); use ridge-logistic with lambda > 0 instead");
      }
      fit.coefficients = beta;
      return fit;
    }
    if (iter == pr.max_iter) break;

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const VectorXd cand = theta + t * step;
      const MatrixXd cand_beta = Unpack(cand, k, classes);
      const double cand_obj = Objective(pr, cand_beta);
      if (std::isfinite(cand_obj) && cand_obj >= obj - 1e-12 * std::abs(obj)) {
        theta = cand;
        beta = cand_beta;
        obj = cand_obj;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("logit line search failed at iteration " + std::to_string(iter) +
                                 " (gradient norm " + std::to_string(fit.gradient_norm) + ")",
                             ToStd(theta), fit.gradient_norm);
    }
    if (theta.cwiseAbs().maxCoeff() > kSeparationNorm) {
      throw NumericalError(
          "perfect separation detected in logit fit (coefficient norm > 1e3); "
          "use ridge-logistic with lambda > 0 instead");
    }
  }
  throw ConvergenceError("logit fit did not converge in " + std::to_string(pr.max_iter) +
                             " iterations (gradient norm " + std::to_string(fit.gradient_norm) +
                             ")",
                         ToStd(theta), fit.gradient_norm);
}

}  // namespace ope::internal
