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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.h"
#include "dynsense/allocator.h"
#include "dynsense/controller.h"
#include "dynsense/dictionary.h"
#include "dynsense/experiments.h"
#include "dynsense/random.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"
#include "oracles.h"

namespace fs = std::filesystem;
using namespace dynsense;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr double kFormulaTol = 1e-9;

Outcome formula_exactness() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= kFormulaTol; };

  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25}, one_hot = {0, 1, 0, 0}, half = {0.5, 0.5, 0, 0};
  check(near(predictive_entropy(uniform), std::log(4.0)), "entropy uniform");
  check(near(predictive_entropy(one_hot), 0.0), "entropy one-hot");
  check(near(predictive_entropy(half), std::log(2.0)), "entropy half");

  check(adapt_budget(0.0, {64, 0.5, 16, 96, 0, 1}) == 64, "budget H=0");
  check(adapt_budget(1.3863, {64, 0.5, 16, 96, 0, 1}) == 96, "budget clip");
  check(adapt_budget(2.0, {32, 0.25, 16, 96, 0, 1}) == 48, "budget 48");

  check(near(sensing_cost(37, {64, 0, 1, 64, 0.0, 1}), 0.0), "cost beta 0");
  check(near(sensing_cost(50, {64, 0, 1, 64, 0.1, 1}), 5.0), "cost linear");
  check(near(sensing_cost(50, {64, 0, 1, 64, 0.01, 2}), 25.0), "cost quadratic");

  const StabilityReport s1 = stability_gain(0.5, 1.0, 64, -0.01);
  check(near(s1.gain, 0.32) && s1.stable, "gain 0.32");
  const StabilityReport s2 = stability_gain(2.0, 2.0, 64, -0.01);
  check(near(s2.gain, 2.56) && !s2.stable, "gain 2.56");
  const StabilityReport s3 = stability_gain(0.5, 1.0, 2, -1.0);
  check(s3.gain == 1.0 && !s3.stable, "gain boundary");

  check(sample_complexity(4, 256, 16, 0.01, 1.0, 1.0) == 29, "sample complexity 29");
  check(sample_complexity(1, 1, 1, std::nextafter(1.0, 0.0), 1.0, 1.0) == 1, "sample complexity minimal");
  const double raw = 4 * std::log(std::exp(1.0) * 256 / 4) + std::log(16.0) + std::log(100.0);
  check(sample_complexity(4, 256, 16, 0.01, 2.0, 1.0) == static_cast<int>(std::ceil(2 * raw)), "sample complexity 2C");

  check(coherence_sparsity_bound(0.1) == 5, "coherence 0.1");
  check(coherence_sparsity_bound(1.0 / 3.0) == 1, "coherence 1/3");
  check(coherence_sparsity_bound(1.0) == 0, "coherence 1");

  check(near(support_drift({1, 2, 3}, {1, 2, 3}), 0.0), "drift equal");
  check(near(support_drift({1, 2}, {3, 4}), 1.0), "drift disjoint");
  check(near(support_drift({1, 2, 3}, {2, 3, 4}), 0.5), "drift half");

  const Eigen::Vector3d importance(0.5, 0.3, 0.2);
  check(near(faithfulness_penalty({1, 1, 1}, importance), 0.0), "faith all kept");
  check(near(faithfulness_penalty({1, 0, 1}, importance), 0.3), "faith 0.3");
  check(near(faithfulness_penalty({0, 0, 0}, importance), 1.0), "faith all dropped");

  LatencyTable table;
  table.prefill_cost_per_token = 0.01;
  table.unit_costs = {{0, 0.2}, {1, 0.3}};
  const std::vector<SupportSet> steps(10, SupportSet{0, 1});
  const LatencyBreakdown lat = latency_surrogate(Retention(100, 1), steps, table, 10);
  check(near(lat.total(), 6.0) && near(lat.prefill, 1.0) && near(lat.decode, 5.0), "latency 6.0");
  const LatencyBreakdown empty = latency_surrogate(Retention(100, 1), std::vector<SupportSet>(10), table, 10);
  check(near(empty.total(), 1.0), "latency prefill only");
  LatencyTable halved = table;
  for (auto& [g, c] : halved.unit_costs) c *= 0.5;
  check(near(latency_surrogate(Retention(100, 1), steps, halved, 10).decode, 2.5), "latency halving");

  std::ostringstream detail;
  detail << failures.size() << " of 33 example checks failed";
  for (const auto& f : failures) detail << "; " << f;
  return {failures.empty(), detail.str()};
}

Outcome coherence_bound_recovery() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kCoherenceCheck;
  c.G_grid = {16, 32, 64};
  c.m_grid = {64, 128, 256};
  c.trials = 200;
  c.master_seed = 2;
  const auto out = run_coherence_check(c);
  const int constructed = out.summary["constructed"];
  const int exact = out.summary["exact"];
  std::ostringstream d;
  d << exact << "/" << constructed << " exact (target 200/200)";
  return {constructed == 200 && exact == 200, d.str()};
}

Outcome phase_transition() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kPhaseTransition;
  c.G_grid = {256};
  c.k_grid = {8};
  const int m_cal = static_cast<int>(std::ceil(c.calibration_factor * 8 * std::log(256.0 / 8)));
  c.m_grid = {16, m_cal};
  c.trials = 100;
  c.master_seed = 3;
  const auto out = run_phase_transition(c);
  const double low = out.table.number(0, "exact_rate");
  const double high = out.table.number(1, "exact_rate");
  std::ostringstream d;
  d << "exact_rate(m=16)=" << low << " (<=0.5), exact_rate(m=" << m_cal << ")=" << high << " (>=0.95)";
  return {m_cal == 111 && high >= 0.95 && low <= 0.5, d.str()};
}

Outcome noise_stability() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kNoiseScaling;
  c.noise_grid = {0.01, 0.02, 0.04, 0.08};
  c.trials = 50;
  c.master_seed = 4;
  const auto out = run_noise_scaling(c);
  double worst = 0.0;
  for (size_t row = 1; row < out.table.rows().size(); ++row) {
    worst = std::max(worst, out.table.number(row, "ratio_to_previous"));
  }
  std::ostringstream d;
  d << "max error(2eta)/error(eta)=" << worst << " (<=2.5)";
  return {worst <= 2.5 && out.summary["failed_trials"] == 0, d.str()};
}

Outcome incremental_savings() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kIncrementalVsFull;
  c.G = 128;
  c.k = 8;
  c.noise_sigma = 0.0;
  c.drift_grid = {1};
  c.m_grid = {16};
  c.trials = 50;
  c.master_seed = 5;
  const auto out = run_incremental_vs_full(c);
  const auto& entry = out.summary["minimal_m"][0];
  if (!entry["incremental"].is_number() || !entry["full"].is_number()) return {false, "bisection unresolved"};
  const double ratio = entry["ratio"];
  std::ostringstream d;
  d << "m_incremental=" << entry["incremental"] << ", m_full=" << entry["full"] << ", ratio=" << ratio << " (<=0.5)";
  return {ratio <= 0.5, d.str()};
}

Outcome loop_stability() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kStabilitySweep;
  c.m_grid = {12, 18, 24, 32, 48, 64, 96};
  c.L_H_grid = {1.0, 2.0};
  c.gain_grid = {0.0, 0.5, 0.85, 1.6, 3.0};
  c.trials = 20;
  c.master_seed = 6;
  const auto out = run_stability_sweep(c);
  double ref_variance = -1.0;
  for (size_t row = 0; row < out.table.rows().size(); ++row) {
    if (out.table.number(row, "reference") == 1.0) ref_variance = out.table.number(row, "m_variance");
  }
  bool ok = ref_variance >= 0.0;
  double worst_ratio = 0.0, min_variance_factor = std::numeric_limits<double>::infinity();
  for (size_t row = 0; row < out.table.rows().size(); ++row) {
    const double gain = out.table.number(row, "predicted_gain");
    if (gain < 0.9) {
      worst_ratio = std::max(worst_ratio, out.table.number(row, "contraction_ratio"));
    } else if (gain > 1.5) {
      min_variance_factor = std::min(min_variance_factor, out.table.number(row, "m_variance") / ref_variance);
    }
  }
  ok = ok && worst_ratio <= 1.0 && min_variance_factor >= 5.0;
  std::ostringstream d;
  d << "max contraction (gain<0.9)=" << worst_ratio << " (<=1), min variance factor (gain>1.5)="
    << min_variance_factor << " (>=5)";
  return {ok, d.str()};
}

Outcome prompt_conditioning() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kBankComparison;
  c.k_grid = {4, 8};
  c.G_grid = {64, 128, 256};
  c.pool_sizes = {8};
  c.trials = 30;
  c.master_seed = 7;
  const auto out = run_bank_comparison(c);
  int cells = 0, ok_cells = 0;
  for (const auto& cell : out.summary["cells"]) {
    ++cells;
    if (cell["family"].is_number() && cell["universal"].is_number() &&
        cell["family"].get<int>() <= cell["universal"].get<int>()) {
      ++ok_cells;
    }
  }
  std::ostringstream d;
  d << ok_cells << "/" << cells << " (k, G) cells with m_family <= m_universal";
  return {cells > 0 && ok_cells == cells, d.str()};
}

Outcome joint_allocator() {
  int within = 0, never_worse = 0;
  const int instances = 20;
  JointConfig config;
  config.lambda_p = 0.05;
  config.lambda_m = 0.01;
  config.beta_tau = 0.5;
  config.beta_f = 1.0;
  config.beta_c = 0.05;
  config.sigma0 = 0.01;
  config.c_faith = 0.3;
  for (int i = 0; i < instances; ++i) {
    SyntheticJointSpec spec;
    spec.n = 6 + i % 3;
    spec.G = 8 + i % 3;
    spec.D = spec.G;
    spec.T = 3;
    spec.exhaustive_support = true;  // the brute-force target pairs every r with exact support search
    const std::uint64_t seed = derive_seed(8, {static_cast<std::uint64_t>(i)});
    const SyntheticJoint inst = make_synthetic_joint(spec, seed);
    const JointSolution sol = optimize_joint(inst.instance, inst.problem, inst.table, config, 16, seed);
    const double best = oracle::joint_brute_force(inst.instance, inst.problem, inst.table, config, seed);
    if (sol.objective_value <= 1.05 * best) ++within;
    bool ok = true;
    for (int count = inst.instance.min_retained; count <= inst.instance.n(); ++count) {
      const JointSolution seq = sequential_baseline(inst.instance, inst.problem, inst.table, config, count, seed);
      ok = ok && sol.objective_value <= seq.objective_value;
    }
    never_worse += ok;
  }
  std::ostringstream d;
  d << within << "/" << instances << " within 5% of brute force (>=18), " << never_worse << "/" << instances
    << " never worse than sequential";
  return {within * 10 >= instances * 9 && never_worse == instances, d.str()};
}

Outcome solver_properties() {
  int prox_runs = 0, prox_bad = 0, omp_runs = 0, omp_bad = 0, proj_runs = 0, proj_bad = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Rng rng = make_rng(derive_seed(9, {static_cast<std::uint64_t>(trial)}));
    const int G = 40 + trial % 3 * 20, m = 20 + trial % 4 * 10, k = 3 + trial % 4;
    const MeasurementOperator A = draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(9, {1, static_cast<std::uint64_t>(trial)}));
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(G);
    for (int g : sample_subset(G, k, rng)) alpha[g] = std::normal_distribution<double>(0, 1)(rng) + 1.5;
    const Sketch z = measure(A, alpha, 0.01, derive_seed(9, {2, static_cast<std::uint64_t>(trial)}));

    RecoveryConfig rc;
    rc.lambda1 = 0.02 * (1 + trial % 3);
    rc.lambda_group = trial % 2 ? 0.05 : 0.0;
    rc.groups = trial % 2 ? contiguous_groups(G, 4) : Groups{};
    rc.gamma_temporal = trial % 5 == 0 ? 0.5 : 0.0;
    rc.tau = 0.1;
    rc.family = FeasibleFamily::unconstrained(k);
    const Eigen::VectorXd prev = alpha * 0.9;
    const RecoveryResult pr = prox_group_lasso(z, A.entries, rc, trial % 2 ? std::optional<Eigen::VectorXd>(prev) : std::nullopt,
                                               rc.gamma_temporal > 0 ? std::optional<Eigen::VectorXd>(prev) : std::nullopt);
    ++prox_runs;
    for (size_t i = 1; i < pr.objective_trace.size(); ++i) {
      if (pr.objective_trace[i] > pr.objective_trace[i - 1]) {
        ++prox_bad;
        break;
      }
    }
    const RecoveryResult om = omp_structured(z, A.entries, k, rc.family);
    ++omp_runs;
    for (size_t i = 1; i < om.objective_trace.size(); ++i) {
      if (!(om.objective_trace[i] < om.objective_trace[i - 1])) {
        ++omp_bad;
        break;
      }
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng = make_rng(derive_seed(10, {static_cast<std::uint64_t>(trial)}));
    const int G = 12;
    Eigen::VectorXd alpha(G);
    for (int g = 0; g < G; ++g) alpha[g] = std::normal_distribution<double>(0, 1)(rng);
    std::vector<SupportSet> motifs;
    for (int i = 0; i < 5; ++i) motifs.emplace_back(sample_subset(G, 3, rng));
    const std::vector<FeasibleFamily> families = {FeasibleFamily::unconstrained(1 + trial % 5),
                                                  FeasibleFamily::group(1 + trial % 3, contiguous_groups(G, 3)),
                                                  FeasibleFamily::n_of_m(1 + trial % 2, 4),
                                                  FeasibleFamily::motifs(motifs)};
    for (const auto& family : families) {
      ++proj_runs;
      const SupportSet s = project_support(alpha, family);
      const bool member = oracle::is_member(s.members(), family, G);
      const bool optimal =
          std::abs(oracle::energy(alpha, s.members()) - oracle::best_projection_energy(alpha, family)) <= 1e-12;
      if (!member || !optimal) ++proj_bad;
    }
  }
  std::ostringstream d;
  d << "prox monotone " << prox_runs - prox_bad << "/" << prox_runs << ", OMP strictly decreasing " << omp_runs - omp_bad
    << "/" << omp_runs << ", projections admissible+optimal " << proj_runs - proj_bad << "/" << proj_runs;
  return {prox_bad == 0 && omp_bad == 0 && proj_bad == 0, d.str()};
}

Outcome cli_determinism() {
  const fs::path source(DYNSENSE_SOURCE_DIR);
  const fs::path scratch = fs::temp_directory_path() / "dynsense_acceptance_cli";
  fs::remove_all(scratch);
  struct Run {
    std::string command;
    std::string config;
  };
  const std::vector<Run> runs = {{"gen-dict", "configs/gen_dict.json"}, {"sense", "configs/sense.json"},
                                 {"recover", "tests/fixtures/recover_config.json"},
                                 {"simulate", "configs/loop.json"},     {"sweep", "configs/phase_transition.json"},
                                 {"joint", "configs/joint.json"},      {"pareto", "configs/joint.json"},
                                 {"stability", "configs/stability.json"}};
  int identical = 0;
  std::vector<std::string> failures;
  std::ostringstream sink;
  for (const auto& run : runs) {
    nlohmann::json digests[2];
    bool ok = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = scratch / (run.command + std::to_string(rep));
      const int code = cli::cli_main({run.command, "--config", (source / run.config).string(), "--seed", "42", "--out",
                                      out.string()},
                                     sink);
      if (code != 0) {
        ok = false;
        break;
      }
      std::ifstream manifest(out / "manifest.json");
      digests[rep] = nlohmann::json::parse(manifest)["outputs"];
    }
    if (ok && digests[0] == digests[1] && !digests[0].empty()) {
      ++identical;
    } else {
      failures.push_back(run.command);
    }
  }
  fs::remove_all(scratch);
  std::ostringstream d;
  d << identical << "/" << runs.size() << " subcommands byte-identical across repeated runs";
  for (const auto& f : failures) d << "; differs: " << f;
  return {failures.empty(), d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"formula exactness", formula_exactness},
      {"coherence-bound exact recovery", coherence_bound_recovery},
      {"phase transition at G=256, k=8", phase_transition},
      {"noise stability", noise_stability},
      {"incremental recovery savings", incremental_savings},
      {"closed-loop stability", loop_stability},
      {"prompt-conditioned banks", prompt_conditioning},
      {"joint allocator vs brute force", joint_allocator},
      {"solver properties", solver_properties},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
              << "): " << outcome.detail << " [" << std::fixed << std::setprecision(1) << seconds << "s]"
              << std::defaultfloat << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
