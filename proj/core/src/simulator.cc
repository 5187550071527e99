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

#include "dynsense/simulator.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dynsense/csv.h"
#include "dynsense/error.h"
#include "dynsense/random.h"

namespace dynsense {

namespace {

double draw_coefficient(double alpha_min, Rng& rng) {
  std::uniform_real_distribution<double> magnitude(alpha_min, 2.0 * alpha_min);
  std::bernoulli_distribution sign(0.5);
  const double a = magnitude(rng);
  return sign(rng) ? a : -a;
}

int draw_pool_index(const PromptFamily& family, Rng& rng) {
  if (family.distribution.empty()) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(family.pool.size()) - 1);
    return pick(rng);
  }
  std::discrete_distribution<int> pick(family.distribution.begin(), family.distribution.end());
  return pick(rng);
}

using BudgetPolicy = std::function<int(double previous_entropy)>;

SimulationTrace simulate(const GroundTruthProcess& process, const BudgetPolicy& budget,
                         const ControllerConfig& controller, const EntropyChannel& channel,
                         const RecoveryConfig& recovery, const LoopOptions& options) {
  process.validate();
  channel.validate();
  recovery.validate();
  if (options.delta_max < 0) throw InvalidArgument("delta_max must be nonnegative");

  const std::vector<GroundTruthStep> truth = generate_ground_truth(process);
  const StructuredDictionary psi = process_dictionary(process);

  SimulationTrace trace;
  trace.steps.reserve(truth.size());
  std::optional<RecoveryResult> previous;
  double previous_entropy = channel.H_base;
  std::int64_t cumulative = 0;

  for (int t = 0; t < process.horizon; ++t) {
    const auto& step_truth = truth[static_cast<size_t>(t)];
    StepRecord record;
    record.step = t;
    record.true_support = step_truth.support;
    record.m = budget(previous_entropy);

    const MeasurementOperator A = draw_operator(
        options.ensemble, record.m, process.D,
        derive_seed(process.family.measurement_bank_seed, {static_cast<std::uint64_t>(t)}));
    Eigen::VectorXd coefficients = step_truth.alpha;
    if (process.mismatch_amplitude > 0.0) {
      Rng rng = make_rng(derive_seed(process.seed, {tag_hash("mismatch"), static_cast<std::uint64_t>(t)}));
      std::uniform_real_distribution<double> off(-process.mismatch_amplitude, process.mismatch_amplitude);
      for (int g = 0; g < process.G; ++g) {
        if (!step_truth.support.contains(g)) coefficients[g] = off(rng);
      }
    }
    const Eigen::VectorXd u = psi.entries() * coefficients;
    const Sketch z = measure(A, u, process.noise_sigma,
                             derive_seed(options.seed, {tag_hash("noise"), static_cast<std::uint64_t>(t)}));
    const Eigen::MatrixXd M = effective_matrix(A, psi);

    RecoveryResult result;
    try {
      if (options.incremental && previous) {
        result = recover_incremental(z, M, *previous, options.delta_max, recovery);
      } else if (previous) {
        result = prox_group_lasso(z, M, recovery, previous->alpha_hat, previous->alpha_hat);
      } else {
        result = prox_group_lasso(z, M, recovery);
      }
    } catch (const std::exception&) {
      record.fallback = true;
      if (previous) {
        result = *previous;
      } else {
        result.alpha_hat = Eigen::VectorXd::Zero(process.G);
      }
      result.measurements_used = z.m();
    }

    record.estimated_support = result.support;
    record.error = (result.alpha_hat - step_truth.alpha).norm();
    record.scores = support_prf(result.support, step_truth.support);
    record.drift = previous ? support_drift(result.support, previous->support) : 0.0;
    record.entropy = synth_entropy(record.error, channel, options.seed, t);
    record.sensing_cost = sensing_cost(record.m, controller);
    cumulative += record.m;
    record.cumulative_measurements = cumulative;

    previous_entropy = record.entropy;
    previous = std::move(result);
    trace.steps.push_back(std::move(record));
  }
  return trace;
}

}  // namespace

void PromptFamily::validate(int G) const {
  if (!distribution.empty()) {
    if (distribution.size() != pool.size()) throw InvalidArgument("distribution length must match pool size");
    double total = 0.0;
    for (double w : distribution) {
      if (!(w >= 0.0)) throw InvalidArgument("pool weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("pool distribution must sum to 1");
  }
  for (const auto& motif : pool) {
    if (motif.empty()) throw InvalidArgument("pool motifs must be non-empty");
    for (int g : motif) {
      if (g < 0 || g >= G) throw InvalidArgument("pool motif member out of range");
    }
  }
}

FeasibleFamily PromptFamily::recovery_family(int k) const {
  if (universal()) return FeasibleFamily::unconstrained(k);
  return FeasibleFamily::motifs(pool);
}

PromptFamily random_prompt_family(int family_id, int G, int k, int pool_size, std::uint64_t seed) {
  if (pool_size < 1) throw InvalidArgument("pool size must be positive");
  if (k < 1 || k > G) throw InvalidArgument("need 1 <= k <= G");
  const double log_available = std::lgamma(G + 1.0) - std::lgamma(k + 1.0) - std::lgamma(G - k + 1.0);
  if (std::log(static_cast<double>(pool_size)) > log_available + 1e-9) {
    throw CapacityError("not enough distinct k-subsets for the requested pool");
  }
  PromptFamily family;
  family.family_id = family_id;
  family.measurement_bank_seed = derive_seed(seed, {tag_hash("bank"), static_cast<std::uint64_t>(family_id)});
  Rng rng = make_rng(derive_seed(seed, {tag_hash("pool"), static_cast<std::uint64_t>(family_id)}));
  std::set<std::vector<int>> seen;
  while (static_cast<int>(family.pool.size()) < pool_size) {
    std::vector<int> motif = sample_subset(G, k, rng);
    if (seen.insert(motif).second) family.pool.emplace_back(std::move(motif));
  }
  return family;
}

void GroundTruthProcess::validate() const {
  if (G < 1 || D < 1) throw InvalidArgument("process needs G >= 1 and D >= 1");
  if (k < 1 || k > G) throw InvalidArgument("process needs 1 <= k <= G");
  if (!(alpha_min > 0.0)) throw InvalidArgument("alpha_min must be positive");
  if (!(drift_rate >= 0.0 && drift_rate <= 1.0)) throw InvalidArgument("drift_rate must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be nonnegative");
  if (!(mismatch_amplitude >= 0.0)) throw InvalidArgument("mismatch_amplitude must be nonnegative");
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  family.validate(G);
}

StructuredDictionary process_dictionary(const GroundTruthProcess& process) {
  return build_synthetic_dictionary(process.D, process.G, process.group_size, process.dictionary_ensemble,
                                    derive_seed(process.seed, {tag_hash("dictionary")}));
}

std::vector<GroundTruthStep> generate_ground_truth(const GroundTruthProcess& process) {
  process.validate();
  const auto& family = process.family;
  if (process.drift_rate > 0.0) {
    if (family.universal() && process.k >= process.G) {
      throw CapacityError("no unused units to swap in (k == G)");
    }
    if (!family.universal() && family.pool.size() < 2) {
      throw CapacityError("pool needs at least two motifs to drift");
    }
  }

  Rng rng = make_rng(derive_seed(process.seed, {tag_hash("ground_truth")}));
  std::bernoulli_distribution swap(process.drift_rate);
  std::vector<GroundTruthStep> steps;
  steps.reserve(static_cast<size_t>(process.horizon));

  int motif_index = -1;
  std::vector<int> members;
  if (family.universal()) {
    members = sample_subset(process.G, process.k, rng);
  } else {
    motif_index = draw_pool_index(family, rng);
    members = family.pool[static_cast<size_t>(motif_index)].members();
  }
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(process.G);
  for (int g : members) alpha[g] = draw_coefficient(process.alpha_min, rng);
  steps.push_back({SupportSet(members), alpha});

  for (int t = 1; t < process.horizon; ++t) {
    Eigen::VectorXd next = alpha;
    if (family.universal()) {
      std::vector<bool> used(static_cast<size_t>(process.G), false);
      for (int g : members) used[static_cast<size_t>(g)] = true;
      for (int& g : members) {
        if (!swap(rng)) continue;
        std::vector<int> free_units;
        for (int c = 0; c < process.G; ++c) {
          if (!used[static_cast<size_t>(c)]) free_units.push_back(c);
        }
        if (free_units.empty()) continue;
        std::uniform_int_distribution<int> pick(0, static_cast<int>(free_units.size()) - 1);
        const int replacement = free_units[static_cast<size_t>(pick(rng))];
        used[static_cast<size_t>(replacement)] = true;
        next[g] = 0.0;
        next[replacement] = draw_coefficient(process.alpha_min, rng);
        g = replacement;
      }
    } else if (swap(rng)) {
      int candidate = motif_index;
      while (candidate == motif_index) candidate = draw_pool_index(family, rng);
      motif_index = candidate;
      const SupportSet& motif = family.pool[static_cast<size_t>(motif_index)];
      next.setZero();
      for (int g : motif) next[g] = alpha[g] != 0.0 ? alpha[g] : draw_coefficient(process.alpha_min, rng);
      members = motif.members();
    }
    alpha = next;
    steps.push_back({SupportSet(members), alpha});
  }
  return steps;
}

void EntropyChannel::validate() const {
  if (!(H_base >= 0.0) || !(entropy_sensitivity >= 0.0) || !(noise_amplitude >= 0.0)) {
    throw InvalidArgument("entropy channel parameters must be nonnegative");
  }
  if (!(H_cap > 0.0)) throw InvalidArgument("H_cap must be positive");
}

double synth_entropy(double error, const EntropyChannel& channel, std::uint64_t seed, int t) {
  double noise = 0.0;
  if (channel.noise_amplitude > 0.0) {
    Rng rng = make_rng(derive_seed(seed, {tag_hash("entropy"), static_cast<std::uint64_t>(t)}));
    std::uniform_real_distribution<double> uniform(-channel.noise_amplitude, channel.noise_amplitude);
    noise = uniform(rng);
  }
  return std::clamp(channel.H_base + channel.entropy_sensitivity * error + noise, 0.0, channel.H_cap);
}

SimulationTrace run_closed_loop(const GroundTruthProcess& process, const ControllerConfig& controller,
                                const EntropyChannel& channel, const RecoveryConfig& recovery,
                                const LoopOptions& options) {
  controller.validate();
  return simulate(
      process, [&](double h) { return adapt_budget(h, controller); }, controller, channel, recovery, options);
}

SimulationTrace run_open_loop(const GroundTruthProcess& process, int m, const ControllerConfig& controller,
                              const EntropyChannel& channel, const RecoveryConfig& recovery,
                              const LoopOptions& options) {
  if (m < 1) throw InvalidArgument("open-loop budget must be positive");
  return simulate(process, [m](double) { return m; }, controller, channel, recovery, options);
}

TraceSummary trace_metrics(const SimulationTrace& trace, std::optional<double> execution_cost) {
  if (trace.steps.empty()) throw InvalidArgument("trace is empty");
  TraceSummary s;
  for (const auto& step : trace.steps) {
    s.mean_f1 += step.scores.f1;
    s.mean_drift += step.drift;
    s.total_measurements += step.m;
    s.mean_error += step.error;
    s.sensing_cost += step.sensing_cost;
    s.fallbacks += step.fallback ? 1 : 0;
  }
  const double n = static_cast<double>(trace.steps.size());
  s.mean_f1 /= n;
  s.mean_drift /= n;
  s.mean_error /= n;
  s.mean_m = static_cast<double>(s.total_measurements) / n;
  s.execution_cost = execution_cost.value_or(0.0);
  s.net_cost = s.sensing_cost + s.execution_cost;
  return s;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  CsvTable table({"step", "m", "H", "e", "drift", "precision", "recall", "f1", "sensing_cost", "fallback_flag"});
  for (const auto& s : trace.steps) {
    table.add_row({format_number(s.step), format_number(s.m), format_number(s.entropy), format_number(s.error),
                   format_number(s.drift), format_number(s.scores.precision), format_number(s.scores.recall),
                   format_number(s.scores.f1), format_number(s.sensing_cost), s.fallback ? "1" : "0"});
  }
  table.write(out);
}

}  // namespace dynsense
