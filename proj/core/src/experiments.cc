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

#include "dynsense/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "dynsense/allocator.h"
#include "dynsense/controller.h"
#include "dynsense/dictionary.h"
#include "dynsense/error.h"
#include "dynsense/random.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"
#include "dynsense/simulator.h"

namespace dynsense {
namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kPhaseTransition, "phase_transition"},
    {ExperimentKind::kCoherenceCheck, "coherence_check"},
    {ExperimentKind::kBankComparison, "bank_comparison"},
    {ExperimentKind::kIncrementalVsFull, "incremental_vs_full"},
    {ExperimentKind::kStabilitySweep, "stability_sweep"},
    {ExperimentKind::kPareto, "pareto"},
    {ExperimentKind::kNoiseScaling, "noise_scaling"},
};

std::uint64_t trial_seed(const ExperimentConfig& config, std::uint64_t cell, int trial) {
  return derive_seed(config.master_seed,
                     {tag_hash(to_string(config.experiment)), cell, static_cast<std::uint64_t>(trial)});
}

struct Planted {
  SupportSet support;
  Eigen::VectorXd alpha;
};

// Coefficients are +-U[alpha_min, 2 alpha_min] on the support.
Eigen::VectorXd plant_coefficients(int G, const SupportSet& support, double alpha_min, Rng& rng) {
  std::uniform_real_distribution<double> magnitude(alpha_min, 2.0 * alpha_min);
  std::bernoulli_distribution sign(0.5);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(G);
  for (int g : support) {
    const double a = magnitude(rng);
    alpha[g] = sign(rng) ? a : -a;
  }
  return alpha;
}

Planted plant_random(int G, int k, Rng& rng) {
  SupportSet support(sample_subset(G, k, rng));
  Eigen::VectorXd alpha = plant_coefficients(G, support, 1.0, rng);
  return {std::move(support), std::move(alpha)};
}

Sketch noiseless(const Eigen::MatrixXd& M, const Eigen::VectorXd& alpha) { return Sketch{M * alpha, 0.0}; }

template <class T>
void require_grid(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) throw InvalidArgument(std::string(name) + " must be non-empty");
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json base_summary(const ExperimentConfig& config) {
  return {{"schema", 1}, {"experiment", std::string(to_string(config.experiment))},
          {"master_seed", config.master_seed}, {"trials", config.trials}};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  throw InvalidArgument("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown experiment: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!(f1_target > 0.0 && f1_target <= 1.0)) throw InvalidArgument("f1_target must lie in (0, 1]");
  switch (experiment) {
    case ExperimentKind::kPhaseTransition:
      require_grid(m_grid, "m_grid");
      require_grid(k_grid, "k_grid");
      require_grid(G_grid, "G_grid");
      break;
    case ExperimentKind::kCoherenceCheck:
      require_grid(m_grid, "m_grid");
      require_grid(G_grid, "G_grid");
      break;
    case ExperimentKind::kBankComparison:
      require_grid(k_grid, "k_grid");
      require_grid(G_grid, "G_grid");
      require_grid(pool_sizes, "pool_sizes");
      break;
    case ExperimentKind::kIncrementalVsFull:
      require_grid(m_grid, "m_grid");
      require_grid(drift_grid, "drift_grid");
      break;
    case ExperimentKind::kStabilitySweep:
      require_grid(m_grid, "m_grid");
      require_grid(L_H_grid, "L_H_grid");
      if (gamma_grid.empty() && gain_grid.empty()) throw InvalidArgument("gamma_grid or gain_grid must be non-empty");
      break;
    case ExperimentKind::kPareto:
      require_grid(lambda_p_grid, "lambda_p_grid");
      require_grid(beta_tau_grid, "beta_tau_grid");
      break;
    case ExperimentKind::kNoiseScaling:
      require_grid(noise_grid, "noise_grid");
      for (double eta : noise_grid) {
        if (!(eta > 0.0)) throw InvalidArgument("noise_grid entries must be positive");
      }
      break;
  }
  for (int m : m_grid) {
    if (m < 1) throw InvalidArgument("m_grid entries must be positive");
  }
  for (int g : G_grid) {
    if (g < 1) throw InvalidArgument("G_grid entries must be positive");
  }
  for (int k : k_grid) {
    if (k < 1) throw InvalidArgument("k_grid entries must be positive");
  }
  for (int d : drift_grid) {
    if (d < 0 || d > k || d > G - k) throw InvalidArgument("drift_grid entries must lie in [0, min(k, G - k)]");
  }
  for (int p : pool_sizes) {
    if (p < 0) throw InvalidArgument("pool sizes must be nonnegative");
  }
  if (G < 2 || k < 1 || k >= G) throw InvalidArgument("need 1 <= k < G");
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  if (budget_iters < 0) throw InvalidArgument("budget_iters must be nonnegative");
  ControllerConfig{m_base, 0.0, m_min, m_max, beta_m, rho_exponent}.validate();
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::kPhaseTransition:
      return run_phase_transition(config);
    case ExperimentKind::kCoherenceCheck:
      return run_coherence_check(config);
    case ExperimentKind::kBankComparison:
      return run_bank_comparison(config);
    case ExperimentKind::kIncrementalVsFull:
      return run_incremental_vs_full(config);
    case ExperimentKind::kStabilitySweep:
      return run_stability_sweep(config);
    case ExperimentKind::kPareto:
      return run_pareto(config);
    case ExperimentKind::kNoiseScaling:
      return run_noise_scaling(config);
  }
  throw InvalidArgument("unknown experiment kind");
}

// ---------------------------------------------------------------------------
// Phase transition. Psi = I, so M = A.

ExperimentOutput run_phase_transition(const ExperimentConfig& config) {
  config.validate();
  CsvTable table({"m", "k", "G", "mean_f1", "exact_rate", "predicted_m_min", "failed_trials"});
  nlohmann::json cells = nlohmann::json::array();
  int total_failed = 0;
  std::uint64_t cell = 0;
  for (int G : config.G_grid) {
    for (int k : config.k_grid) {
      if (k >= G) throw InvalidArgument("phase transition needs k < G");
      const FeasibleFamily family = FeasibleFamily::unconstrained(k);
      const int predicted = sample_complexity_log(k, G, family.log_size(G), config.sample_rho, config.sample_C,
                                                  config.sample_delta);
      const int calibrated =
          static_cast<int>(std::ceil(config.calibration_factor * k * std::log(static_cast<double>(G) / k)));
      cells.push_back({{"k", k}, {"G", G}, {"predicted_m_min", predicted}, {"calibrated_m", calibrated}});
      for (int m : config.m_grid) {
        double f1 = 0.0;
        int exact = 0, failed = 0;
        for (int trial = 0; trial < config.trials; ++trial) {
          const std::uint64_t seed = trial_seed(config, cell, trial);
          try {
            Rng rng = make_rng(derive_seed(seed, {tag_hash("plant")}));
            const Planted truth = plant_random(G, k, rng);
            const MeasurementOperator A =
                draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(seed, {tag_hash("A")}));
            const RecoveryResult r = omp_structured(noiseless(A.entries, truth.alpha), A.entries, k, family);
            f1 += support_prf(r.support, truth.support).f1;
            exact += r.support == truth.support;
          } catch (const std::exception&) {
            ++failed;
          }
        }
        total_failed += failed;
        table.add_row({format_number(m), format_number(k), format_number(G), format_number(f1 / config.trials),
                       format_number(static_cast<double>(exact) / config.trials), format_number(predicted),
                       format_number(failed)});
      }
      ++cell;
    }
  }
  nlohmann::json summary = base_summary(config);
  summary["cells"] = std::move(cells);
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Coherence check: instance i uses G_grid[i % |G|] and m_grid[(i / |G|) % |m|].

ExperimentOutput run_coherence_check(const ExperimentConfig& config) {
  config.validate();
  CsvTable table({"instance", "G", "m", "mu", "k_bound", "k", "exact", "failed"});
  int constructed = 0, exact_total = 0, failed_total = 0, skipped = 0;
  const size_t nG = config.G_grid.size();
  for (int i = 0; i < config.trials; ++i) {
    const int G = config.G_grid[static_cast<size_t>(i) % nG];
    const int m = config.m_grid[(static_cast<size_t>(i) / nG) % config.m_grid.size()];
    const std::uint64_t seed = trial_seed(config, static_cast<std::uint64_t>(i), 0);
    double mu = std::numeric_limits<double>::quiet_NaN();
    int bound = 0, k = 0, exact = 0, failed = 0;
    try {
      const MeasurementOperator A =
          draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(seed, {tag_hash("A")}));
      mu = mutual_coherence(A.entries);
      bound = std::min(coherence_sparsity_bound(mu), G);
      if (bound >= 1) {
        Rng rng = make_rng(derive_seed(seed, {tag_hash("plant")}));
        k = std::uniform_int_distribution<int>(1, bound)(rng);
        const Planted truth = plant_random(G, k, rng);
        const RecoveryResult r =
            omp_structured(noiseless(A.entries, truth.alpha), A.entries, k, FeasibleFamily::unconstrained(k));
        exact = r.support == truth.support;
        ++constructed;
      } else {
        ++skipped;
      }
    } catch (const std::exception&) {
      failed = 1;
    }
    exact_total += exact;
    failed_total += failed;
    table.add_row({format_number(i), format_number(G), format_number(m), format_number(mu), format_number(bound),
                   format_number(k), format_number(exact), format_number(failed)});
  }
  nlohmann::json summary = base_summary(config);
  summary["constructed"] = constructed;
  summary["skipped"] = skipped;
  summary["exact"] = exact_total;
  summary["exact_rate"] = constructed ? static_cast<double>(exact_total) / constructed : 0.0;
  summary["failed_trials"] = failed_total;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Bank comparison. Truth supports come from the prompt family's pool; the
// universal bank ignores the pool at recovery time, the family bank searches
// only the pool. Both banks see identical instances and operators.

ExperimentOutput run_bank_comparison(const ExperimentConfig& config) {
  config.validate();
  CsvTable table({"bank", "pool_size", "k", "G", "m", "mean_f1", "resolved", "failed_trials"});
  nlohmann::json cells = nlohmann::json::array();
  int total_failed = 0;
  std::uint64_t cell = 0;
  for (int k : config.k_grid) {
    for (int G : config.G_grid) {
      if (k >= G) throw InvalidArgument("bank comparison needs k < G");
      for (int pool_size : config.pool_sizes) {
        const std::uint64_t family_seed = derive_seed(trial_seed(config, cell, 0), {tag_hash("family")});
        PromptFamily prompt;
        if (pool_size > 0) prompt = random_prompt_family(static_cast<int>(cell), G, k, pool_size, family_seed);

        std::vector<Planted> truths;
        truths.reserve(static_cast<size_t>(config.trials));
        for (int trial = 0; trial < config.trials; ++trial) {
          Rng rng = make_rng(derive_seed(trial_seed(config, cell, trial), {tag_hash("plant")}));
          if (prompt.universal()) {
            truths.push_back(plant_random(G, k, rng));
          } else {
            const int pick = std::uniform_int_distribution<int>(0, static_cast<int>(prompt.pool.size()) - 1)(rng);
            SupportSet support = prompt.pool[static_cast<size_t>(pick)];
            Eigen::VectorXd alpha = plant_coefficients(G, support, 1.0, rng);
            truths.push_back({std::move(support), std::move(alpha)});
          }
        }

        nlohmann::json entry = {{"k", k}, {"G", G}, {"pool_size", pool_size}};
        for (const bool family_bank : {false, true}) {
          const FeasibleFamily family =
              family_bank ? prompt.recovery_family(k) : FeasibleFamily::unconstrained(k);
          std::map<int, std::pair<double, int>> memo;
          auto evaluate = [&](int m) -> std::pair<double, int> {
            if (auto it = memo.find(m); it != memo.end()) return it->second;
            double f1 = 0.0;
            int failed = 0;
            for (int trial = 0; trial < config.trials; ++trial) {
              try {
                const MeasurementOperator A = draw_operator(
                    SensingEnsemble::kGaussian, m, G, derive_seed(trial_seed(config, cell, trial), {tag_hash("A")}));
                const auto& truth = truths[static_cast<size_t>(trial)];
                const RecoveryResult r = omp_structured(noiseless(A.entries, truth.alpha), A.entries, k, family);
                f1 += support_prf(r.support, truth.support).f1;
              } catch (const std::exception&) {
                ++failed;
              }
            }
            return memo[m] = {f1 / config.trials, failed};
          };
          const std::optional<int> m_min =
              bisect_min_budget(1, G, config.f1_target, [&](int m) { return evaluate(m).first; });
          const int m = m_min.value_or(G);
          const auto [f1, failed] = evaluate(m);
          total_failed += failed;
          const char* bank = family_bank ? "family" : "universal";
          table.add_row({bank, format_number(pool_size), format_number(k), format_number(G),
                         m_min ? format_number(m) : std::string("-1"), format_number(f1),
                         format_number(m_min.has_value() ? 1 : 0), format_number(failed)});
          entry[bank] = m_min ? nlohmann::json(m) : nlohmann::json(nullptr);
        }
        cells.push_back(std::move(entry));
        ++cell;
      }
    }
  }
  nlohmann::json summary = base_summary(config);
  summary["cells"] = std::move(cells);
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Incremental vs full recovery after a drift of exactly `drift` atoms. The
// previous step is taken as perfectly recovered, so the comparison isolates
// the cost of tracking one transition.

namespace {

struct DriftInstance {
  Planted previous;
  Planted current;
};

DriftInstance plant_drift(int G, int k, int drift, Rng& rng) {
  DriftInstance inst;
  inst.previous = plant_random(G, k, rng);
  std::vector<int> unused;
  for (int g = 0; g < G; ++g) {
    if (!inst.previous.support.contains(g)) unused.push_back(g);
  }
  std::vector<int> members = inst.previous.support.members();
  const std::vector<int> out = sample_subset(k, drift, rng);
  const std::vector<int> in = sample_subset(static_cast<int>(unused.size()), drift, rng);
  Eigen::VectorXd alpha = inst.previous.alpha;
  for (int j = 0; j < drift; ++j) {
    alpha[members[static_cast<size_t>(out[static_cast<size_t>(j)])]] = 0.0;
    members[static_cast<size_t>(out[static_cast<size_t>(j)])] = unused[static_cast<size_t>(in[static_cast<size_t>(j)])];
  }
  SupportSet support(members);
  const Eigen::VectorXd fresh = plant_coefficients(G, support, 1.0, rng);
  for (int j = 0; j < drift; ++j) {
    const int g = unused[static_cast<size_t>(in[static_cast<size_t>(j)])];
    alpha[g] = fresh[g];
  }
  inst.current = {std::move(support), std::move(alpha)};
  return inst;
}

}  // namespace

ExperimentOutput run_incremental_vs_full(const ExperimentConfig& config) {
  config.validate();
  const int G = config.G;
  const int k = config.k;
  const FeasibleFamily family = FeasibleFamily::unconstrained(k);
  RecoveryConfig recovery;
  recovery.tau = config.tau;
  recovery.family = family;

  CsvTable table({"drift", "m", "mode", "mean_f1", "support_changes", "max_support_changes", "failed_trials"});
  nlohmann::json minimal = nlohmann::json::array();
  int total_failed = 0;

  for (size_t cell = 0; cell < config.drift_grid.size(); ++cell) {
    const int drift = config.drift_grid[cell];
    const int delta_max = std::max(1, drift);
    std::vector<DriftInstance> instances;
    for (int trial = 0; trial < config.trials; ++trial) {
      Rng rng = make_rng(derive_seed(trial_seed(config, cell, trial), {tag_hash("plant")}));
      instances.push_back(plant_drift(G, k, drift, rng));
    }

    struct Stats {
      double f1 = 0.0;
      double changes = 0.0;
      int max_changes = 0;
      int failed = 0;
    };
    auto evaluate = [&](int m, bool incremental) {
      Stats s;
      for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t seed = trial_seed(config, cell, trial);
        const auto& inst = instances[static_cast<size_t>(trial)];
        try {
          const MeasurementOperator A =
              draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(seed, {tag_hash("A")}));
          const Sketch z = measure(A, inst.current.alpha, config.noise_sigma, derive_seed(seed, {tag_hash("noise")}));
          RecoveryResult r;
          if (incremental) {
            RecoveryResult previous;
            previous.alpha_hat = inst.previous.alpha;
            previous.support = inst.previous.support;
            r = recover_incremental(z, A.entries, previous, delta_max, recovery);
          } else {
            r = omp_structured(z, A.entries, k, family);
          }
          const int changes = symmetric_difference_size(r.support, inst.previous.support);
          s.f1 += support_prf(r.support, inst.current.support).f1;
          s.changes += changes;
          s.max_changes = std::max(s.max_changes, changes);
        } catch (const std::exception&) {
          ++s.failed;
        }
      }
      s.f1 /= config.trials;
      s.changes /= config.trials;
      return s;
    };

    for (int m : config.m_grid) {
      for (const bool incremental : {true, false}) {
        const Stats s = evaluate(m, incremental);
        total_failed += s.failed;
        table.add_row({format_number(drift), format_number(m), incremental ? "incremental" : "full",
                       format_number(s.f1), format_number(s.changes), format_number(s.max_changes),
                       format_number(s.failed)});
      }
    }

    nlohmann::json entry = {{"drift", drift}};
    for (const bool incremental : {true, false}) {
      const auto m_min = bisect_min_budget(1, G, config.f1_target,
                                           [&](int m) { return evaluate(m, incremental).f1; });
      entry[incremental ? "incremental" : "full"] = m_min ? nlohmann::json(*m_min) : nlohmann::json(nullptr);
    }
    if (entry["incremental"].is_number() && entry["full"].is_number()) {
      entry["ratio"] = entry["incremental"].get<double>() / entry["full"].get<double>();
    }
    minimal.push_back(std::move(entry));
  }
  nlohmann::json summary = base_summary(config);
  summary["minimal_m"] = std::move(minimal);
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Stability sweep. A stationary planted process (no drift) runs under the
// entropy-adaptive controller. The slope of the error curve at m_base comes
// from an open-loop pre-sweep over m_grid; gains are predicted from it.

namespace {

GroundTruthProcess stability_process(const ExperimentConfig& config, std::uint64_t seed) {
  GroundTruthProcess process;
  process.G = config.G;
  process.D = config.G;
  process.k = config.k;
  process.alpha_min = 1.0;
  process.drift_rate = 0.0;
  process.noise_sigma = config.noise_sigma;
  process.family.measurement_bank_seed = derive_seed(seed, {tag_hash("bank")});
  process.horizon = config.horizon;
  process.seed = seed;
  return process;
}

RecoveryConfig loop_recovery(const ExperimentConfig& config) {
  RecoveryConfig recovery;
  recovery.lambda1 = config.lambda1;
  recovery.gamma_temporal = config.gamma_temporal;
  recovery.tau = config.tau;
  recovery.family = FeasibleFamily::unconstrained(config.k);
  return recovery;
}

}  // namespace

ExperimentOutput run_stability_sweep(const ExperimentConfig& config) {
  config.validate();
  const RecoveryConfig recovery = loop_recovery(config);
  ControllerConfig controller{config.m_base, 0.0, config.m_min, config.m_max, config.beta_m, config.rho_exponent};

  // Open-loop pre-sweep (cell index 0 carries the shared trial seeds).
  std::vector<std::pair<int, double>> samples;
  int presweep_failed = 0;
  for (int m : config.m_grid) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = trial_seed(config, 0, trial);
      try {
        const SimulationTrace trace =
            run_open_loop(stability_process(config, seed), m, controller, EntropyChannel{}, recovery,
                          LoopOptions{SensingEnsemble::kGaussian, false, 0, derive_seed(seed, {tag_hash("loop")})});
        samples.emplace_back(m, trace_metrics(trace).mean_error);
      } catch (const std::exception&) {
        ++presweep_failed;
      }
    }
  }
  const ErrorCurveFit fit = fit_error_curve(samples, config.m_base);
  const double scale = config.m_base * std::abs(fit.slope);

  struct Cell {
    double gamma;
    double L_H;
    bool reference;
  };
  std::vector<Cell> cells;
  const double L_ref = config.L_H_grid.front();
  cells.push_back({scale > 0.0 ? config.reference_gain / (L_ref * scale) : 0.0, L_ref, true});
  for (double L_H : config.L_H_grid) {
    if (!config.gain_grid.empty()) {
      for (double gain : config.gain_grid) {
        cells.push_back({scale > 0.0 && L_H > 0.0 ? gain / (L_H * scale) : 0.0, L_H, false});
      }
    } else {
      for (double gamma : config.gamma_grid) cells.push_back({gamma, L_H, false});
    }
  }

  CsvTable table({"gamma", "L_H", "predicted_gain", "stable", "contraction_ratio", "m_variance", "mean_error",
                  "reference", "failed_trials"});
  int total_failed = presweep_failed;
  double boundary_gain = std::numeric_limits<double>::quiet_NaN();
  for (const Cell& cell : cells) {
    const StabilityReport report = stability_gain(cell.gamma, cell.L_H, config.m_base, fit.slope);
    controller.gamma = cell.gamma;
    EntropyChannel channel;
    channel.entropy_sensitivity = cell.L_H;
    std::vector<double> ratios;
    double variance = 0.0, error = 0.0;
    int failed = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = trial_seed(config, 0, trial);
      try {
        const SimulationTrace trace =
            run_closed_loop(stability_process(config, seed), controller, channel, recovery,
                            LoopOptions{SensingEnsemble::kGaussian, false, 0, derive_seed(seed, {tag_hash("loop")})});
        const int T = static_cast<int>(trace.steps.size());
        const int q = std::max(1, T / 4);
        double early = 0.0, late = 0.0, m_mean = 0.0, m_sq = 0.0;
        for (int t = 0; t < q; ++t) {
          early += trace.steps[static_cast<size_t>(t)].error;
          late += trace.steps[static_cast<size_t>(T - q + t)].error;
        }
        for (const auto& s : trace.steps) {
          m_mean += s.m;
          m_sq += static_cast<double>(s.m) * s.m;
          error += s.error / T;
        }
        m_mean /= T;
        variance += std::max(0.0, m_sq / T - m_mean * m_mean);
        ratios.push_back(early > 0.0 ? late / early : (late > 0.0 ? std::numeric_limits<double>::infinity() : 1.0));
      } catch (const std::exception&) {
        ++failed;
      }
    }
    const int ok = config.trials - failed;
    total_failed += failed;
    if (!report.stable && (std::isnan(boundary_gain) || report.gain < boundary_gain)) boundary_gain = report.gain;
    table.add_row({format_number(cell.gamma), format_number(cell.L_H), format_number(report.gain),
                   format_number(report.stable ? 1 : 0), format_number(median(ratios)),
                   format_number(ok ? variance / ok : std::numeric_limits<double>::quiet_NaN()),
                   format_number(ok ? error / ok : std::numeric_limits<double>::quiet_NaN()),
                   format_number(cell.reference ? 1 : 0), format_number(failed)});
  }

  nlohmann::json summary = base_summary(config);
  summary["slope"] = fit.slope;
  summary["error_curve"] = {{"budgets", fit.curve.budgets()}, {"fitted", fit.curve.fitted()}};
  summary["smallest_unstable_gain"] = std::isnan(boundary_gain) ? nlohmann::json(nullptr) : nlohmann::json(boundary_gain);
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Pareto sweep over (lambda_p, beta_tau) on synthetic joint instances, with
// the sequential compress-then-recover baseline at the matched retention.

ExperimentOutput run_pareto(const ExperimentConfig& config) {
  config.validate();
  const SyntheticJointSpec spec;
  std::vector<SyntheticJoint> instances;
  for (int trial = 0; trial < config.trials; ++trial) {
    instances.push_back(make_synthetic_joint(spec, trial_seed(config, 0, trial)));
  }
  const ControllerConfig sensing{config.m_base, 0.0, config.m_min, config.m_max, config.beta_m, config.rho_exponent};

  JointConfig base;
  base.lambda_m = 0.01;
  base.beta_f = 1.0;
  base.beta_c = 0.05;
  base.sigma0 = 0.01;
  base.c_faith = 0.5;

  CsvTable table({"config_id", "mode", "lambda_p", "beta_tau", "quality", "net_cost", "kernel_cost",
                  "retained_fraction", "active_fraction", "objective", "failed_trials"});
  int config_id = 0, total_failed = 0, dominated = 0;
  for (double lambda_p : config.lambda_p_grid) {
    for (double beta_tau : config.beta_tau_grid) {
      JointConfig jc = base;
      jc.lambda_p = lambda_p;
      jc.beta_tau = beta_tau;
      struct Acc {
        double quality = 0, net = 0, kernel = 0, retained = 0, active = 0, objective = 0;
      } acc[2];
      int failed = 0;
      for (int i = 0; i < config.trials; ++i) {
        const auto& inst = instances[static_cast<size_t>(i)];
        const std::uint64_t seed = derive_seed(trial_seed(config, 0, i), {tag_hash("recover")});
        try {
          const JointSolution joint =
              optimize_joint(inst.instance, inst.problem, inst.table, jc, config.budget_iters, seed);
          const JointSolution seq = sequential_baseline(inst.instance, inst.problem, inst.table, jc,
                                                        retained_count(joint.r), seed);
          if (joint.objective_value > seq.objective_value + 1e-12) ++dominated;
          double theta = 0.0;
          for (const auto& op : inst.problem.operators) theta += sensing_cost(op.m(), sensing);
          const JointSolution* sols[2] = {&joint, &seq};
          for (int s = 0; s < 2; ++s) {
            const JointSolution& sol = *sols[s];
            double active = 0.0;
            for (const auto& r : sol.recoveries) active += static_cast<double>(r.support.size()) / inst.problem.dictionary.G();
            acc[s].quality += sol.mean_f1;
            acc[s].kernel += sol.latency.total();
            acc[s].net += sol.latency.total() + theta;
            acc[s].retained += static_cast<double>(retained_count(sol.r)) / inst.instance.n();
            acc[s].active += active / inst.problem.T();
            acc[s].objective += sol.objective_value;
          }
        } catch (const std::exception&) {
          ++failed;
        }
      }
      total_failed += failed;
      const int ok = std::max(1, config.trials - failed);
      for (int s = 0; s < 2; ++s) {
        table.add_row({format_number(config_id), s == 0 ? "joint" : "sequential", format_number(lambda_p),
                       format_number(beta_tau), format_number(acc[s].quality / ok), format_number(acc[s].net / ok),
                       format_number(acc[s].kernel / ok), format_number(acc[s].retained / ok),
                       format_number(acc[s].active / ok), format_number(acc[s].objective / ok),
                       format_number(failed)});
      }
      ++config_id;
    }
  }
  nlohmann::json summary = base_summary(config);
  summary["joint_worse_than_sequential"] = dominated;
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

// ---------------------------------------------------------------------------
// Noise scaling: relative noise eta sets sigma = eta |z| / sqrt(m) at m = m_max
// and the l1 weight tracks the noise as sigma sqrt(2 ln G). Instances are
// shared across the eta grid.

ExperimentOutput run_noise_scaling(const ExperimentConfig& config) {
  config.validate();
  const int G = config.G;
  const int k = config.k;
  const int m = config.m_max;
  CsvTable table({"eta", "mean_error", "ratio_to_previous", "failed_trials"});
  nlohmann::json errors = nlohmann::json::array();
  int total_failed = 0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (double eta : config.noise_grid) {
    double error = 0.0;
    int failed = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = trial_seed(config, 0, trial);
      try {
        Rng rng = make_rng(derive_seed(seed, {tag_hash("plant")}));
        const Planted truth = plant_random(G, k, rng);
        const MeasurementOperator A =
            draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(seed, {tag_hash("A")}));
        const double sigma = eta * (A.entries * truth.alpha).norm() / std::sqrt(static_cast<double>(m));
        const Sketch z = measure(A, truth.alpha, sigma, derive_seed(seed, {tag_hash("noise")}));
        RecoveryConfig recovery;
        recovery.lambda1 = sigma * std::sqrt(2.0 * std::log(static_cast<double>(G)));
        recovery.family = FeasibleFamily::unconstrained(k);
        const RecoveryResult r = prox_group_lasso(z, A.entries, recovery);
        error += (r.alpha_hat - truth.alpha).norm();
      } catch (const std::exception&) {
        ++failed;
      }
    }
    total_failed += failed;
    const int ok = config.trials - failed;
    const double mean = ok ? error / ok : std::numeric_limits<double>::quiet_NaN();
    table.add_row({format_number(eta), format_number(mean), format_number(mean / previous), format_number(failed)});
    errors.push_back(mean);
    previous = mean;
  }
  nlohmann::json summary = base_summary(config);
  summary["mean_error"] = std::move(errors);
  summary["failed_trials"] = total_failed;
  return {std::move(table), std::move(summary)};
}

}  // namespace dynsense
