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

// Joint prompt/model budget allocation.
//
// A binary retention vector r selects prompt tokens. Retention shapes the
// latent features and the effective noise:
//
//   u_t(r)    = Psi alpha*_t - sum_{i dropped} c_i
//   sigma(r)  = sigma0 + c_faith * (importance dropped)
//
// and the allocator minimizes
//
//   J = mean_t |alpha_t - alpha*_t|        (task-loss stand-in)
//     + lambda_p * sum_i r_i
//     + lambda_m * sum_t structured_norm(alpha_t)
//     + beta_tau * latency(r, {S_t})
//     + beta_f   * dropped importance
//     + beta_c   * sum_t |S_t xor S_{t-1}|
//
// by alternating per-step recovery with greedy single-bit flips of r.

#ifndef DYNSENSE_ALLOCATOR_H_
#define DYNSENSE_ALLOCATOR_H_

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "dynsense/controller.h"
#include "dynsense/csv.h"
#include "dynsense/dictionary.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"

namespace dynsense {

using Retention = std::vector<std::uint8_t>;

int retained_count(const Retention& r);

struct PromptInstance {
  Eigen::VectorXd importance;     // length n
  Eigen::MatrixXd contributions;  // n x D, row i is c_i
  int min_retained = 1;

  int n() const { return static_cast<int>(importance.size()); }
  void validate() const;
};

struct LatencyTable {
  std::map<int, double> unit_costs;
  double prefill_cost_per_token = 0.0;
  double decode_base = 0.0;

  void validate() const;
};

struct JointConfig {
  double lambda_p = 0.0;
  double lambda_m = 0.0;
  double beta_tau = 0.0;
  double beta_f = 0.0;
  double beta_c = 0.0;
  double sigma0 = 0.0;
  double c_faith = 0.0;

  void validate() const;
};

// Per-step recovery problems sharing one dictionary.
struct JointProblem {
  StructuredDictionary dictionary;
  std::vector<Eigen::VectorXd> truths;             // alpha*_t
  std::vector<MeasurementOperator> operators;      // A_t
  RecoveryConfig recovery;                         // family + structured-norm weights
  int k_max = 1;
  // Per-step support search: greedy (OMP) by default, or exhaustive
  // minimum-residual enumeration for small instances.
  bool exhaustive_support = false;

  int T() const { return static_cast<int>(truths.size()); }
  void validate() const;
};

struct LatencyBreakdown {
  double prefill = 0.0;
  double decode = 0.0;
  double total() const { return prefill + decode; }
};

// Weighted contributions of each objective term.
struct ObjectiveBreakdown {
  double task_loss = 0.0;
  double token_penalty = 0.0;
  double support_penalty = 0.0;
  double latency = 0.0;
  double faithfulness = 0.0;
  double consistency = 0.0;

  double total() const {
    return task_loss + token_penalty + support_penalty + latency + faithfulness + consistency;
  }
};

struct JointSolution {
  Retention r;
  std::vector<RecoveryResult> recoveries;
  double objective_value = 0.0;
  ObjectiveBreakdown breakdown;
  LatencyBreakdown latency;
  double mean_f1 = 0.0;
  std::vector<double> objective_trace;
};

double faithfulness_penalty(const Retention& r, const Eigen::VectorXd& importance);

// prefill = cost_per_token * |r|; decode = sum_t (decode_base + sum_{g in S_t} cost_g).
LatencyBreakdown latency_surrogate(const Retention& r, const std::vector<SupportSet>& supports,
                                   const LatencyTable& table, int T);

// sum_{t >= 1} |S_t xor S_{t-1}|.
double consistency_penalty(const std::vector<SupportSet>& supports);

double retention_coupling(const Retention& r, const PromptInstance& instance, const JointConfig& config);

// u_t(r) for one step.
Eigen::VectorXd retained_features(const Retention& r, const PromptInstance& instance,
                                  const Eigen::VectorXd& clean_features);

// Recomputes every term from the solution's retention and recoveries.
ObjectiveBreakdown joint_objective(const JointSolution& solution, const PromptInstance& instance,
                                   const JointProblem& problem, const LatencyTable& table,
                                   const JointConfig& config);

// Runs the per-step recovery pipeline under retention r and scores it.
JointSolution evaluate_retention(const Retention& r, const PromptInstance& instance, const JointProblem& problem,
                                 const LatencyTable& table, const JointConfig& config, std::uint64_t seed);

// Keeps the `count` most important tokens (lowest index on ties).
Retention importance_prefix(const PromptInstance& instance, int count);

// Compress-then-recover: importance_prefix(count), then recovery.
JointSolution sequential_baseline(const PromptInstance& instance, const JointProblem& problem,
                                  const LatencyTable& table, const JointConfig& config, int count,
                                  std::uint64_t seed);

// Alternating minimization. Starts from the best importance-ordered
// retention, then applies the best improving single-bit flip until none
// improves or budget_iters rounds have run. objective_trace is nonincreasing.
JointSolution optimize_joint(const PromptInstance& instance, const JointProblem& problem,
                             const LatencyTable& table, const JointConfig& config, int budget_iters,
                             std::uint64_t seed);

struct SyntheticJointSpec {
  int n = 6;
  int D = 8;
  int G = 8;
  int k = 2;
  int T = 3;
  int m = 6;
  int min_retained = 1;
  double alpha_min = 1.0;
  double contribution_scale = 0.3;
  SensingEnsemble ensemble = SensingEnsemble::kGaussian;
  bool exhaustive_support = false;
};

struct SyntheticJoint {
  PromptInstance instance;
  JointProblem problem;
  LatencyTable table;
};

// Random instance: identity-padded dictionary, drifting k-sparse truths,
// importances normalized to sum to 1, contributions scaled by importance.
SyntheticJoint make_synthetic_joint(const SyntheticJointSpec& spec, std::uint64_t seed);

// Header: lambda_p,beta_tau,retained,mean_f1,tau_prefill,tau_decode,theta_total,objective
CsvTable joint_pareto(const PromptInstance& instance, const JointProblem& problem, const LatencyTable& table,
                      const JointConfig& base, const ControllerConfig& sensing,
                      const std::vector<double>& lambda_p_grid, const std::vector<double>& beta_tau_grid,
                      int budget_iters, std::uint64_t seed);

}  // namespace dynsense

#endif  // DYNSENSE_ALLOCATOR_H_
