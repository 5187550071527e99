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

// Synthetic ground truth and the closed sense -> recover -> execute ->
// entropy loop.
//
// Each step t:
//   m_t   = adapt_budget(H_{t-1})            (H_{-1} = H_base)
//   A_t   = fresh m_t-row draw from the family's measurement bank
//   z_t   = A_t Psi alpha*_t + eps_t
//   alpha = recovery (incremental or proximal + threshold)
//   e_t   = |alpha - alpha*_t|_2
//   H_t   = clip(H_base + L_H e_t + noise, 0, H_cap)
//
// A step whose solver throws keeps the previous support and is flagged.

#ifndef DYNSENSE_SIMULATOR_H_
#define DYNSENSE_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "dynsense/controller.h"
#include "dynsense/dictionary.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"

namespace dynsense {

// A prompt family localizes the admissible supports. An empty pool means
// the universal family of all k-subsets.
struct PromptFamily {
  int family_id = 0;
  std::vector<SupportSet> pool;
  // Categorical weights over the pool; empty means uniform.
  std::vector<double> distribution;
  std::uint64_t measurement_bank_seed = 0;

  bool universal() const { return pool.empty(); }
  void validate(int G) const;
  // Recovery search space: the pool as a motif library, or unconstrained_k.
  FeasibleFamily recovery_family(int k) const;
};

// `pool_size` distinct random k-subsets of [0, G).
PromptFamily random_prompt_family(int family_id, int G, int k, int pool_size, std::uint64_t seed);

struct GroundTruthProcess {
  int G = 64;
  int D = 64;
  int k = 4;
  double alpha_min = 1.0;
  double drift_rate = 0.0;
  double noise_sigma = 0.0;
  PromptFamily family;
  int horizon = 20;
  std::uint64_t seed = 0;
  // Bounded off-support coefficient energy added to u_t (dictionary mismatch).
  double mismatch_amplitude = 0.0;
  DictionaryEnsemble dictionary_ensemble = DictionaryEnsemble::kIdentityPadded;
  int group_size = 1;

  void validate() const;
};

struct GroundTruthStep {
  SupportSet support;
  Eigen::VectorXd alpha;
};

// Universal families swap each atom independently with probability
// drift_rate for a uniform unused unit. Explicit pools move to a different
// motif with probability drift_rate. Persistent atoms keep their
// coefficients; fresh atoms draw |alpha| ~ U[alpha_min, 2 alpha_min] with a
// random sign.
std::vector<GroundTruthStep> generate_ground_truth(const GroundTruthProcess& process);

StructuredDictionary process_dictionary(const GroundTruthProcess& process);

struct EntropyChannel {
  double H_base = 0.0;
  double entropy_sensitivity = 1.0;  // L_H
  double H_cap = 6.907755278982137;  // ln 1000
  double noise_amplitude = 0.0;

  void validate() const;
};

double synth_entropy(double error, const EntropyChannel& channel, std::uint64_t seed, int t);

struct StepRecord {
  int step = 0;
  SupportSet true_support;
  SupportSet estimated_support;
  int m = 0;
  double entropy = 0.0;
  double error = 0.0;
  double drift = 0.0;
  SupportScores scores;
  double sensing_cost = 0.0;
  std::int64_t cumulative_measurements = 0;
  bool fallback = false;
};

struct SimulationTrace {
  std::vector<StepRecord> steps;
};

struct LoopOptions {
  SensingEnsemble ensemble = SensingEnsemble::kGaussian;
  bool incremental = false;
  int delta_max = 2;
  std::uint64_t seed = 0;
};

SimulationTrace run_closed_loop(const GroundTruthProcess& process, const ControllerConfig& controller,
                                const EntropyChannel& channel, const RecoveryConfig& recovery,
                                const LoopOptions& options);

// The same pipeline with the budget pinned to `m` at every step.
SimulationTrace run_open_loop(const GroundTruthProcess& process, int m, const ControllerConfig& controller,
                              const EntropyChannel& channel, const RecoveryConfig& recovery,
                              const LoopOptions& options);

struct TraceSummary {
  double mean_f1 = 0.0;
  double mean_drift = 0.0;
  std::int64_t total_measurements = 0;
  double mean_m = 0.0;
  double mean_error = 0.0;
  double sensing_cost = 0.0;
  double execution_cost = 0.0;
  double net_cost = 0.0;
  int fallbacks = 0;
};

// net_cost = sum of sensing costs + execution_cost (when supplied).
TraceSummary trace_metrics(const SimulationTrace& trace, std::optional<double> execution_cost = std::nullopt);

// Header: step,m,H,e,drift,precision,recall,f1,sensing_cost,fallback_flag
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

}  // namespace dynsense

#endif  // DYNSENSE_SIMULATOR_H_
