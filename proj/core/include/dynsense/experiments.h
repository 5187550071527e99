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

// Reproducible experiment drivers. Every driver is a pure function of its
// config: trial seeds are derive_seed(master_seed, {tag_hash(experiment),
// cell, trial}), rows come out in grid order, and failed trials are counted
// in a failed_trials column instead of aborting the sweep.
//
// Cells that differ only in the measurement budget, the bank mode or the
// controller gains share trial seeds, so paired comparisons run on identical
// instances (and nested Gaussian draws across m).

#ifndef DYNSENSE_EXPERIMENTS_H_
#define DYNSENSE_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynsense/csv.h"

namespace dynsense {

enum class ExperimentKind {
  kPhaseTransition,
  kCoherenceCheck,
  kBankComparison,
  kIncrementalVsFull,
  kStabilitySweep,
  kPareto,
  kNoiseScaling,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kPhaseTransition;
  std::vector<int> m_grid;
  std::vector<int> k_grid;
  std::vector<int> G_grid;
  std::vector<double> gamma_grid;
  // Stability sweep alternative to gamma_grid: target gains, with gamma
  // solved per L_H from the measured error-curve slope.
  std::vector<double> gain_grid;
  std::vector<double> L_H_grid;
  std::vector<double> lambda_p_grid;
  std::vector<double> beta_tau_grid;
  std::vector<double> noise_grid;
  std::vector<int> drift_grid;
  std::vector<int> pool_sizes;  // 0 = universal (unconstrained) family
  int trials = 20;
  int budget_iters = 16;  // joint allocator flip rounds
  std::uint64_t master_seed = 0;
  std::string output_path;

  // Empirically calibrated constants (not derived from theory).
  double calibration_factor = 4.0;  // phase transition probe m = ceil(c k ln(G/k))
  double sample_C = 1.0;
  double sample_delta = 0.5;
  double sample_rho = 0.05;
  double f1_target = 0.95;

  // Recovery-loop settings for the stability sweep and noise scaling.
  int G = 128;
  int k = 6;
  double noise_sigma = 0.05;
  int horizon = 40;
  int m_base = 24;
  int m_min = 8;
  int m_max = 96;
  double lambda1 = 0.05;
  double gamma_temporal = 1.0;
  double tau = 0.25;
  double reference_gain = 0.32;
  double beta_m = 0.001;
  double rho_exponent = 1.0;

  void validate() const;
};

struct ExperimentOutput {
  CsvTable table;
  nlohmann::json summary;
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

// Rows: m,k,G,mean_f1,exact_rate,predicted_m_min,failed_trials
ExperimentOutput run_phase_transition(const ExperimentConfig& config);

// Rows: instance,G,m,mu,k_bound,k,exact,failed
ExperimentOutput run_coherence_check(const ExperimentConfig& config);

// Rows: bank,pool_size,k,G,m,mean_f1,resolved,failed_trials
// m is the smallest budget reaching f1_target (bisection).
ExperimentOutput run_bank_comparison(const ExperimentConfig& config);

// Rows: drift,m,mode,mean_f1,support_changes,max_support_changes,failed_trials
// The summary carries the bisected minimal budget per (drift, mode).
ExperimentOutput run_incremental_vs_full(const ExperimentConfig& config);

// Rows: gamma,L_H,predicted_gain,stable,contraction_ratio,m_variance,mean_error,reference,failed_trials
ExperimentOutput run_stability_sweep(const ExperimentConfig& config);

// Rows: config_id,mode,lambda_p,beta_tau,quality,net_cost,kernel_cost,retained_fraction,active_fraction,objective,failed_trials
ExperimentOutput run_pareto(const ExperimentConfig& config);

// Rows: eta,mean_error,ratio_to_previous,failed_trials
ExperimentOutput run_noise_scaling(const ExperimentConfig& config);

// Smallest m in [lo, hi] with score(m) >= target, assuming score is
// nondecreasing in m; nullopt when score(hi) misses the target.
template <class Score>
std::optional<int> bisect_min_budget(int lo, int hi, double target, Score&& score) {
  if (score(hi) < target) return std::nullopt;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (score(mid) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return hi;
}

}  // namespace dynsense

#endif  // DYNSENSE_EXPERIMENTS_H_
