// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Structured sparse recovery from sketches z = M alpha + noise, where
// M = A Psi is the effective sensing matrix.
//
// Solvers:
//   omp_structured       greedy OMP restricted to the feasible family
//   prox_group_lasso     monotone accelerated proximal gradient on
//                        1/2|z - M a|^2 + l1 |a|_1 + lG sum_g |a_g|_2
//                                       + gamma |a - a_prev|^2
//   recover_incremental  refit on the previous support, then a bounded
//                        add/drop update
//
// All solvers are deterministic and single threaded.

#ifndef DYNSENSE_RECOVERY_H_
#define DYNSENSE_RECOVERY_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynsense/dictionary.h"
#include "dynsense/sensing.h"

namespace dynsense {

struct RecoveryConfig {
  double lambda1 = 0.0;
  double lambda_group = 0.0;
  double gamma_temporal = 0.0;
  double tau = 0.0;
  int max_iterations = 500;
  double tolerance = 1e-8;
  FeasibleFamily family;
  // Group structure for the group penalty; empty means singleton groups.
  Groups groups;

  void validate() const;
};

struct RecoveryResult {
  Eigen::VectorXd alpha_hat;
  SupportSet support;
  double residual_norm = 0.0;
  int iterations = 0;
  int measurements_used = 0;
  std::vector<double> objective_trace;
  // Set when a least-squares refit fell back to the minimum-norm solution.
  bool rank_deficient = false;
  // Incremental recovery: the refit on the previous support was accepted.
  bool early_exit = false;
};

Eigen::MatrixXd effective_matrix(const MeasurementOperator& A, const StructuredDictionary& Psi);

struct LeastSquaresFit {
  Eigen::VectorXd coefficients;  // one per support member, in support order
  Eigen::VectorXd residual;
  bool rank_deficient = false;
};

// Least squares restricted to the columns in `support`; minimum-norm when the
// column submatrix is rank deficient.
LeastSquaresFit least_squares_on_support(const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
                                         const SupportSet& support);

// Greedy selection of up to k_max atoms. The objective trace holds the
// residual norm after each accepted atom, starting with |z|.
RecoveryResult omp_structured(const Sketch& z, const Eigen::MatrixXd& M, int k_max,
                              const FeasibleFamily& family);

// Minimum-residual admissible support of the largest feasible size <= k_max,
// found by enumeration (ties go to the lexicographically first support).
// Throws CapacityError past 1e6 candidate supports.
RecoveryResult best_subset_recovery(const Sketch& z, const Eigen::MatrixXd& M, int k_max,
                                    const FeasibleFamily& family);

double sparse_group_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& z,
                              const Eigen::MatrixXd& M, const RecoveryConfig& config,
                              const std::optional<Eigen::VectorXd>& previous_alpha = std::nullopt);

// lambda1 |a|_1 + lambda_group sum_g |a_g|_2 under the config's groups.
double structured_norm(const Eigen::VectorXd& alpha, const RecoveryConfig& config);

RecoveryResult prox_group_lasso(const Sketch& z, const Eigen::MatrixXd& M, const RecoveryConfig& config,
                                const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                                const std::optional<Eigen::VectorXd>& previous_alpha = std::nullopt);

// Keeps |alpha_g| > tau, then projects onto config.family among the survivors.
SupportSet threshold_support(const Eigen::VectorXd& alpha, const RecoveryConfig& config);

// Two-stage update from a previous result. Changes at most 2 * delta_max
// support members.
RecoveryResult recover_incremental(const Sketch& z, const Eigen::MatrixXd& M, const RecoveryResult& previous,
                                   int delta_max, const RecoveryConfig& config);

// Nonincreasing fit of mean recovery error against measurement budget.
class ErrorCurve {
 public:
  ErrorCurve(std::vector<int> budgets, std::vector<double> means, std::vector<double> fitted);

  const std::vector<int>& budgets() const { return budgets_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& fitted() const { return fitted_; }

  // Piecewise-linear interpolation of the fitted values, constant outside.
  double evaluate(double m) const;
  // Centered secant through the neighbouring grid points (one-sided at the
  // ends). Always <= 0.
  double slope_at(double m) const;

 private:
  std::vector<int> budgets_;
  std::vector<double> means_;
  std::vector<double> fitted_;
};

struct ErrorCurveFit {
  ErrorCurve curve;
  double slope = 0.0;
};

// Trials are (m, recovery_error) pairs; needs at least three distinct m.
ErrorCurveFit fit_error_curve(std::span<const std::pair<int, double>> trials, double m_base);

}  // namespace dynsense

#endif  // DYNSENSE_RECOVERY_H_
