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

#include "dynsense/allocator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dynsense/error.h"
#include "dynsense/random.h"

namespace dynsense {

namespace {

void check_retention(const Retention& r, int n) {
  if (static_cast<int>(r.size()) != n) throw InvalidArgument("retention vector has wrong length");
  for (auto bit : r) {
    if (bit > 1) throw InvalidArgument("retention entries must be 0 or 1");
  }
}

SupportSet nonzero_support(const Eigen::VectorXd& alpha) {
  std::vector<int> members;
  for (int g = 0; g < alpha.size(); ++g) {
    if (alpha[g] != 0.0) members.push_back(g);
  }
  return SupportSet(std::move(members));
}

std::vector<SupportSet> supports_of(const std::vector<RecoveryResult>& recoveries) {
  std::vector<SupportSet> out;
  out.reserve(recoveries.size());
  for (const auto& rec : recoveries) out.push_back(rec.support);
  return out;
}

}  // namespace

int retained_count(const Retention& r) { return std::accumulate(r.begin(), r.end(), 0); }

void PromptInstance::validate() const {
  const int count = n();
  if (count < 1) throw InvalidArgument("prompt instance needs at least one token");
  if (contributions.rows() != count) throw InvalidArgument("need one contribution row per token");
  if (!contributions.allFinite()) throw InvalidArgument("contributions must be finite");
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    if (!(importance[i] >= 0.0)) throw InvalidArgument("importance must be nonnegative");
    total += importance[i];
  }
  if (total > count + 1e-9) throw InvalidArgument("total importance must not exceed n");
  if (min_retained < 1 || min_retained > count) throw InvalidArgument("infeasible min_retained");
}

void LatencyTable::validate() const {
  if (!(prefill_cost_per_token >= 0.0) || !(decode_base >= 0.0)) {
    throw InvalidArgument("latency costs must be nonnegative");
  }
  for (const auto& [id, cost] : unit_costs) {
    if (!(cost >= 0.0)) throw InvalidArgument("unit cost for " + std::to_string(id) + " is negative");
  }
}

void JointConfig::validate() const {
  for (double w : {lambda_p, lambda_m, beta_tau, beta_f, beta_c, sigma0, c_faith}) {
    if (!(w >= 0.0)) throw InvalidArgument("joint weights must be nonnegative");
  }
}

void JointProblem::validate() const {
  if (truths.empty()) throw InvalidArgument("joint problem needs at least one step");
  if (operators.size() != truths.size()) throw InvalidArgument("need one operator per step");
  for (const auto& a : truths) {
    if (a.size() != dictionary.G()) throw InvalidArgument("truth length must equal G");
  }
  for (const auto& op : operators) {
    if (op.D() != dictionary.D()) throw InvalidArgument("operator width must equal D");
  }
  if (k_max < 1 || k_max > dictionary.G()) throw InvalidArgument("k_max must lie in [1, G]");
  recovery.validate();
}

double faithfulness_penalty(const Retention& r, const Eigen::VectorXd& importance) {
  if (static_cast<Eigen::Index>(r.size()) != importance.size()) {
    throw InvalidArgument("retention and importance lengths differ");
  }
  double dropped = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0) dropped += importance[static_cast<Eigen::Index>(i)];
  }
  return dropped;
}

LatencyBreakdown latency_surrogate(const Retention& r, const std::vector<SupportSet>& supports,
                                   const LatencyTable& table, int T) {
  if (static_cast<int>(supports.size()) != T) throw InvalidArgument("need one support per step");
  LatencyBreakdown out;
  out.prefill = table.prefill_cost_per_token * retained_count(r);
  for (const auto& support : supports) {
    out.decode += table.decode_base;
    for (int g : support) {
      const auto it = table.unit_costs.find(g);
      if (it == table.unit_costs.end()) throw InvalidArgument("no latency entry for unit " + std::to_string(g));
      out.decode += it->second;
    }
  }
  return out;
}

double consistency_penalty(const std::vector<SupportSet>& supports) {
  double total = 0.0;
  for (size_t t = 1; t < supports.size(); ++t) total += symmetric_difference_size(supports[t], supports[t - 1]);
  return total;
}

double retention_coupling(const Retention& r, const PromptInstance& instance, const JointConfig& config) {
  return config.sigma0 + config.c_faith * faithfulness_penalty(r, instance.importance);
}

Eigen::VectorXd retained_features(const Retention& r, const PromptInstance& instance,
                                  const Eigen::VectorXd& clean_features) {
  check_retention(r, instance.n());
  if (clean_features.size() != instance.contributions.cols()) {
    throw InvalidArgument("feature length does not match contribution width");
  }
  Eigen::VectorXd u = clean_features;
  for (int i = 0; i < instance.n(); ++i) {
    if (r[static_cast<size_t>(i)] == 0) u -= instance.contributions.row(i).transpose();
  }
  return u;
}

ObjectiveBreakdown joint_objective(const JointSolution& solution, const PromptInstance& instance,
                                   const JointProblem& problem, const LatencyTable& table,
                                   const JointConfig& config) {
  check_retention(solution.r, instance.n());
  if (static_cast<int>(solution.recoveries.size()) != problem.T()) {
    throw InvalidArgument("need one recovery per step");
  }
  ObjectiveBreakdown b;
  double error_sum = 0.0;
  double norm_sum = 0.0;
  for (int t = 0; t < problem.T(); ++t) {
    const auto& rec = solution.recoveries[static_cast<size_t>(t)];
    if (rec.alpha_hat.size() != problem.dictionary.G()) throw InvalidArgument("recovery length must equal G");
    error_sum += (rec.alpha_hat - problem.truths[static_cast<size_t>(t)]).norm();
    norm_sum += structured_norm(rec.alpha_hat, problem.recovery);
  }
  const auto supports = supports_of(solution.recoveries);
  b.task_loss = error_sum / problem.T();
  b.token_penalty = config.lambda_p * retained_count(solution.r);
  b.support_penalty = config.lambda_m * norm_sum;
  b.latency = config.beta_tau * latency_surrogate(solution.r, supports, table, problem.T()).total();
  b.faithfulness = config.beta_f * faithfulness_penalty(solution.r, instance.importance);
  b.consistency = config.beta_c * consistency_penalty(supports);
  return b;
}

JointSolution evaluate_retention(const Retention& r, const PromptInstance& instance, const JointProblem& problem,
                                 const LatencyTable& table, const JointConfig& config, std::uint64_t seed) {
  check_retention(r, instance.n());
  const double sigma = retention_coupling(r, instance, config);
  JointSolution sol;
  sol.r = r;
  double f1 = 0.0;
  for (int t = 0; t < problem.T(); ++t) {
    const auto& truth = problem.truths[static_cast<size_t>(t)];
    const auto& A = problem.operators[static_cast<size_t>(t)];
    const Eigen::VectorXd u = retained_features(r, instance, problem.dictionary.entries() * truth);
    const Sketch z = measure(A, u, sigma, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const Eigen::MatrixXd M = effective_matrix(A, problem.dictionary);
    RecoveryResult rec = problem.exhaustive_support
                             ? best_subset_recovery(z, M, problem.k_max, problem.recovery.family)
                             : omp_structured(z, M, problem.k_max, problem.recovery.family);
    f1 += support_prf(rec.support, nonzero_support(truth)).f1;
    sol.recoveries.push_back(std::move(rec));
  }
  sol.mean_f1 = f1 / problem.T();
  sol.latency = latency_surrogate(r, supports_of(sol.recoveries), table, problem.T());
  sol.breakdown = joint_objective(sol, instance, problem, table, config);
  sol.objective_value = sol.breakdown.total();
  sol.objective_trace = {sol.objective_value};
  return sol;
}

Retention importance_prefix(const PromptInstance& instance, int count) {
  const int n = instance.n();
  if (count < 0 || count > n) throw InvalidArgument("retained count out of range");
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return instance.importance[a] > instance.importance[b]; });
  Retention r(static_cast<size_t>(n), 0);
  for (int i = 0; i < count; ++i) r[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;
  return r;
}

JointSolution sequential_baseline(const PromptInstance& instance, const JointProblem& problem,
                                  const LatencyTable& table, const JointConfig& config, int count,
                                  std::uint64_t seed) {
  return evaluate_retention(importance_prefix(instance, count), instance, problem, table, config, seed);
}

JointSolution optimize_joint(const PromptInstance& instance, const JointProblem& problem,
                             const LatencyTable& table, const JointConfig& config, int budget_iters,
                             std::uint64_t seed) {
  instance.validate();
  problem.validate();
  table.validate();
  config.validate();
  if (budget_iters < 0) throw InvalidArgument("budget_iters must be nonnegative");
  const int n = instance.n();

  // Ties keep the larger retention.
  JointSolution best = evaluate_retention(Retention(static_cast<size_t>(n), 1), instance, problem, table, config, seed);
  for (int count = n - 1; count >= instance.min_retained; --count) {
    JointSolution cand = sequential_baseline(instance, problem, table, config, count, seed);
    if (cand.objective_value < best.objective_value) best = std::move(cand);
  }
  std::vector<double> trace = {best.objective_value};

  for (int iter = 0; iter < budget_iters; ++iter) {
    std::optional<JointSolution> improved;
    for (int i = 0; i < n; ++i) {
      Retention r = best.r;
      r[static_cast<size_t>(i)] ^= 1;
      if (retained_count(r) < instance.min_retained) continue;
      JointSolution cand = evaluate_retention(r, instance, problem, table, config, seed);
      const double bar = improved ? improved->objective_value : best.objective_value;
      if (cand.objective_value < bar) improved = std::move(cand);
    }
    if (!improved) break;
    best = std::move(*improved);
    trace.push_back(best.objective_value);
  }
  best.objective_trace = std::move(trace);
  return best;
}

SyntheticJoint make_synthetic_joint(const SyntheticJointSpec& spec, std::uint64_t seed) {
  if (spec.n < 1 || spec.T < 1 || spec.m < 1) throw InvalidArgument("synthetic joint needs n, T, m >= 1");
  if (spec.k < 1 || spec.k > spec.G) throw InvalidArgument("synthetic joint needs 1 <= k <= G");
  Rng rng = make_rng(derive_seed(seed, {tag_hash("joint")}));
  StructuredDictionary psi = build_synthetic_dictionary(spec.D, spec.G, 1, DictionaryEnsemble::kIdentityPadded, 0);

  std::uniform_real_distribution<double> magnitude(spec.alpha_min, 2.0 * spec.alpha_min);
  std::bernoulli_distribution sign(0.5);
  std::bernoulli_distribution swap(0.3);
  auto coefficient = [&] { return sign(rng) ? magnitude(rng) : -magnitude(rng); };

  std::vector<Eigen::VectorXd> truths;
  std::vector<int> members = sample_subset(spec.G, spec.k, rng);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(spec.G);
  for (int g : members) alpha[g] = coefficient();
  truths.push_back(alpha);
  for (int t = 1; t < spec.T; ++t) {
    if (spec.k < spec.G && swap(rng)) {
      std::uniform_int_distribution<int> which(0, spec.k - 1);
      const int out = members[static_cast<size_t>(which(rng))];
      std::vector<int> free_units;
      for (int g = 0; g < spec.G; ++g) {
        if (alpha[g] == 0.0) free_units.push_back(g);
      }
      std::uniform_int_distribution<int> pick(0, static_cast<int>(free_units.size()) - 1);
      const int in = free_units[static_cast<size_t>(pick(rng))];
      alpha[out] = 0.0;
      alpha[in] = coefficient();
      std::replace(members.begin(), members.end(), out, in);
    }
    truths.push_back(alpha);
  }

  std::vector<MeasurementOperator> operators;
  for (int t = 0; t < spec.T; ++t) {
    operators.push_back(draw_operator(spec.ensemble, spec.m, spec.D,
                                      derive_seed(seed, {tag_hash("joint_bank"), static_cast<std::uint64_t>(t)})));
  }

  PromptInstance instance;
  instance.min_retained = spec.min_retained;
  instance.importance.resize(spec.n);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int i = 0; i < spec.n; ++i) instance.importance[i] = unit(rng);
  instance.importance /= instance.importance.sum();
  std::normal_distribution<double> normal(0.0, 1.0);
  instance.contributions.resize(spec.n, spec.D);
  for (int i = 0; i < spec.n; ++i) {
    for (int d = 0; d < spec.D; ++d) {
      instance.contributions(i, d) =
          spec.contribution_scale * instance.importance[i] * normal(rng) * std::sqrt(static_cast<double>(spec.n));
    }
  }

  LatencyTable table;
  table.prefill_cost_per_token = 0.05;
  table.decode_base = 0.1;
  for (int g = 0; g < spec.G; ++g) table.unit_costs[g] = (1.0 + unit(rng)) / spec.G;

  RecoveryConfig recovery;
  recovery.lambda1 = 1.0;
  recovery.family = FeasibleFamily::unconstrained(spec.k);

  JointProblem problem{std::move(psi), std::move(truths), std::move(operators), std::move(recovery), spec.k};
  problem.exhaustive_support = spec.exhaustive_support;
  return {std::move(instance), std::move(problem), std::move(table)};
}

CsvTable joint_pareto(const PromptInstance& instance, const JointProblem& problem, const LatencyTable& table,
                      const JointConfig& base, const ControllerConfig& sensing,
                      const std::vector<double>& lambda_p_grid, const std::vector<double>& beta_tau_grid,
                      int budget_iters, std::uint64_t seed) {
  if (lambda_p_grid.empty() || beta_tau_grid.empty()) throw InvalidArgument("pareto grids must be non-empty");
  double theta_total = 0.0;
  for (const auto& op : problem.operators) theta_total += sensing_cost(op.m(), sensing);

  CsvTable csv({"lambda_p", "beta_tau", "retained", "mean_f1", "tau_prefill", "tau_decode", "theta_total",
                "objective"});
  for (double lambda_p : lambda_p_grid) {
    for (double beta_tau : beta_tau_grid) {
      JointConfig config = base;
      config.lambda_p = lambda_p;
      config.beta_tau = beta_tau;
      const JointSolution sol = optimize_joint(instance, problem, table, config, budget_iters, seed);
      csv.add_row({format_number(lambda_p), format_number(beta_tau), format_number(retained_count(sol.r)),
                   format_number(sol.mean_f1), format_number(sol.latency.prefill), format_number(sol.latency.decode),
                   format_number(theta_total), format_number(sol.objective_value)});
    }
  }
  return csv;
}

}  // namespace dynsense
