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

#include <numeric>

#include <gtest/gtest.h>

#include "dynsense/error.h"
#include "dynsense/random.h"
#include "oracles.h"

namespace dynsense {
namespace {

JointConfig moderate() {
  JointConfig c;
  c.lambda_p = 0.05;
  c.lambda_m = 0.01;
  c.beta_tau = 0.5;
  c.beta_f = 1.0;
  c.beta_c = 0.05;
  c.sigma0 = 0.01;
  c.c_faith = 0.3;
  return c;
}

TEST(Faithfulness, Examples) {
  const Eigen::Vector3d importance(0.5, 0.3, 0.2);
  EXPECT_EQ(faithfulness_penalty({1, 1, 1}, importance), 0.0);
  EXPECT_NEAR(faithfulness_penalty({1, 0, 1}, importance), 0.3, 1e-15);
  EXPECT_NEAR(faithfulness_penalty({0, 0, 0}, importance), 1.0, 1e-15);
  EXPECT_THROW(faithfulness_penalty({1, 0}, importance), InvalidArgument);
}

TEST(Latency, Examples) {
  LatencyTable table;
  table.prefill_cost_per_token = 0.01;
  table.unit_costs = {{0, 0.2}, {1, 0.3}, {2, 0.0}};
  const std::vector<SupportSet> steps(10, SupportSet{0, 1});
  const auto lat = latency_surrogate(Retention(100, 1), steps, table, 10);
  EXPECT_NEAR(lat.prefill, 1.0, 1e-12);
  EXPECT_NEAR(lat.decode, 5.0, 1e-12);
  EXPECT_NEAR(lat.total(), 6.0, 1e-12);
  const auto empty = latency_surrogate(Retention(100, 1), std::vector<SupportSet>(10), table, 10);
  EXPECT_EQ(empty.decode, 0.0);
  EXPECT_NEAR(empty.total(), 1.0, 1e-12);
  LatencyTable half = table;
  for (auto& [g, c] : half.unit_costs) c /= 2;
  EXPECT_NEAR(latency_surrogate(Retention(100, 1), steps, half, 10).decode, 2.5, 1e-12);
  EXPECT_THROW(latency_surrogate(Retention(3, 1), std::vector<SupportSet>(10, SupportSet{7}), table, 10),
               InvalidArgument);
  EXPECT_THROW(latency_surrogate(Retention(3, 1), steps, table, 9), InvalidArgument);
}

TEST(LatencyProperty, AdditiveOverSteps) {
  LatencyTable table;
  table.decode_base = 0.1;
  table.unit_costs = {{0, 0.2}, {1, 0.3}, {2, 0.7}};
  const std::vector<SupportSet> a = {SupportSet{0}, SupportSet{1, 2}};
  const std::vector<SupportSet> b = {SupportSet{2}};
  std::vector<SupportSet> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const Retention r(4, 1);
  EXPECT_NEAR(latency_surrogate(r, ab, table, 3).decode,
              latency_surrogate(r, a, table, 2).decode + latency_surrogate(r, b, table, 1).decode, 1e-12);
}

TEST(Consistency, Examples) {
  EXPECT_EQ(consistency_penalty(std::vector<SupportSet>(5, SupportSet{1, 2})), 0.0);
  std::vector<SupportSet> alternating;
  for (int t = 0; t < 6; ++t) alternating.push_back(t % 2 ? SupportSet{0, 1, 2} : SupportSet{3, 4, 5});
  EXPECT_EQ(consistency_penalty(alternating), 5 * 2 * 3);
  EXPECT_EQ(consistency_penalty({SupportSet{1}}), 0.0);
}

TEST(Coupling, Examples) {
  PromptInstance inst;
  inst.importance = Eigen::Vector3d(0.5, 0.3, 0.2);
  inst.contributions = Eigen::MatrixXd::Zero(3, 2);
  JointConfig c;
  c.sigma0 = 0.01;
  c.c_faith = 0.1;
  EXPECT_EQ(retention_coupling({1, 1, 1}, inst, c), 0.01);
  EXPECT_NEAR(retention_coupling({1, 0, 1}, inst, c), 0.04, 1e-15);
  double previous = 0.0;
  for (const Retention& r : {Retention{1, 1, 1}, Retention{1, 1, 0}, Retention{1, 0, 0}, Retention{0, 0, 0}}) {
    const double s = retention_coupling(r, inst, c);
    EXPECT_GE(s, previous);
    previous = s;
  }
}

TEST(RetainedFeatures, SubtractsDroppedContributions) {
  PromptInstance inst;
  inst.importance = Eigen::Vector2d(0.5, 0.5);
  inst.contributions.resize(2, 2);
  inst.contributions << 1, 2, 3, 4;
  const Eigen::Vector2d clean(10, 20);
  EXPECT_EQ(retained_features({1, 1}, inst, clean), clean);
  EXPECT_EQ(retained_features({1, 0}, inst, clean), Eigen::Vector2d(7, 16));
}

TEST(JointObjective, BreakdownSumsToTotal) {
  SyntheticJointSpec spec;
  const SyntheticJoint inst = make_synthetic_joint(spec, 5);
  ASSERT_EQ(inst.instance.n(), 6);
  ASSERT_EQ(inst.problem.dictionary.G(), 8);
  ASSERT_EQ(inst.problem.T(), 3);
  const JointConfig c = moderate();
  for (unsigned mask = 1; mask < 64; mask += 7) {
    Retention r(6);
    for (int i = 0; i < 6; ++i) r[static_cast<size_t>(i)] = (mask >> i) & 1u;
    const JointSolution s = evaluate_retention(r, inst.instance, inst.problem, inst.table, c, 5);
    const ObjectiveBreakdown b = joint_objective(s, inst.instance, inst.problem, inst.table, c);
    EXPECT_NEAR(b.total(), s.objective_value, 1e-9);
    EXPECT_NEAR(s.breakdown.task_loss + s.breakdown.token_penalty + s.breakdown.support_penalty +
                    s.breakdown.latency + s.breakdown.faithfulness + s.breakdown.consistency,
                s.objective_value, 1e-9);
  }
}

TEST(JointObjective, ZeroWeightsLeaveTaskLoss) {
  const SyntheticJoint inst = make_synthetic_joint(SyntheticJointSpec{}, 5);
  const JointSolution s = evaluate_retention(Retention(6, 1), inst.instance, inst.problem, inst.table, JointConfig{}, 5);
  EXPECT_EQ(s.objective_value, s.breakdown.task_loss);
}

TEST(JointObjective, MatchesExhaustiveOracleUnderExactSearch) {
  SyntheticJointSpec spec;
  spec.exhaustive_support = true;
  const SyntheticJoint inst = make_synthetic_joint(spec, 17);
  const JointConfig c = moderate();
  for (unsigned mask = 1; mask < 64; mask += 5) {
    Retention r(6);
    for (int i = 0; i < 6; ++i) r[static_cast<size_t>(i)] = (mask >> i) & 1u;
    EXPECT_NEAR(evaluate_retention(r, inst.instance, inst.problem, inst.table, c, 17).objective_value,
                oracle::joint_objective_exhaustive(r, inst.instance, inst.problem, inst.table, c, 17), 1e-9);
  }
}

// No pressure to drop and no way for dropping to help: contributions vanish
// and the noise does not depend on r, so faithfulness alone decides.
TEST(OptimizeJoint, NoPressureRetainsEverything) {
  SyntheticJointSpec spec;
  spec.contribution_scale = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticJoint inst = make_synthetic_joint(spec, seed);
    JointConfig c;
    c.beta_f = 1.0;
    c.lambda_m = 0.01;
    c.beta_c = 0.05;
    const JointSolution s = optimize_joint(inst.instance, inst.problem, inst.table, c, 16, seed);
    EXPECT_EQ(retained_count(s.r), 6);
  }
}

TEST(OptimizeJoint, HeavyTokenPenaltyKeepsMostImportant) {
  SyntheticJointSpec spec;
  spec.min_retained = 2;
  const SyntheticJoint inst = make_synthetic_joint(spec, 3);
  JointConfig c = moderate();
  c.lambda_p = 1e6;
  const JointSolution s = optimize_joint(inst.instance, inst.problem, inst.table, c, 16, 3);
  EXPECT_EQ(s.r, importance_prefix(inst.instance, 2));
}

TEST(OptimizeJoint, RejectsInfeasibleMinimum) {
  SyntheticJoint inst = make_synthetic_joint(SyntheticJointSpec{}, 3);
  inst.instance.min_retained = 7;
  EXPECT_THROW(optimize_joint(inst.instance, inst.problem, inst.table, moderate(), 4, 3), InvalidArgument);
}

TEST(ImportancePrefix, TiesByIndex) {
  PromptInstance inst;
  inst.importance = Eigen::Vector4d(0.2, 0.3, 0.3, 0.2);
  inst.contributions = Eigen::MatrixXd::Zero(4, 1);
  EXPECT_EQ(importance_prefix(inst, 2), (Retention{0, 1, 1, 0}));
  EXPECT_EQ(importance_prefix(inst, 3), (Retention{1, 1, 1, 0}));
}

TEST(OptimizeJointProperty, TraceAndSequentialDominance) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    SyntheticJointSpec spec;
    spec.n = 5 + static_cast<int>(seed % 3);
    const SyntheticJoint inst = make_synthetic_joint(spec, seed);
    const JointSolution s = optimize_joint(inst.instance, inst.problem, inst.table, moderate(), 16, seed);
    for (size_t i = 1; i < s.objective_trace.size(); ++i) EXPECT_LE(s.objective_trace[i], s.objective_trace[i - 1]);
    EXPECT_EQ(s.objective_trace.back(), s.objective_value);
    EXPECT_GE(retained_count(s.r), inst.instance.min_retained);
    for (int count = 1; count <= spec.n; ++count) {
      EXPECT_LE(s.objective_value,
                sequential_baseline(inst.instance, inst.problem, inst.table, moderate(), count, seed).objective_value);
    }
  }
}

TEST(OptimizeJoint, NearBruteForceUnderExactSearch) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    SyntheticJointSpec spec;
    spec.exhaustive_support = true;
    const SyntheticJoint inst = make_synthetic_joint(spec, 40 + seed);
    const JointSolution s = optimize_joint(inst.instance, inst.problem, inst.table, moderate(), 16, seed);
    const double best = oracle::joint_brute_force(inst.instance, inst.problem, inst.table, moderate(), seed);
    EXPECT_GE(s.objective_value, best - 1e-9);
    within += s.objective_value <= 1.05 * best;
  }
  EXPECT_GE(within, 5);
}

TEST(OptimizeJoint, Deterministic) {
  const SyntheticJoint inst = make_synthetic_joint(SyntheticJointSpec{}, 9);
  const JointSolution a = optimize_joint(inst.instance, inst.problem, inst.table, moderate(), 16, 9);
  const JointSolution b = optimize_joint(inst.instance, inst.problem, inst.table, moderate(), 16, 9);
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.objective_value, b.objective_value);
}

TEST(JointPareto, GridShape) {
  const SyntheticJoint inst = make_synthetic_joint(SyntheticJointSpec{}, 2);
  ControllerConfig sensing;
  sensing.m_base = 6;
  sensing.m_max = 6;
  sensing.beta_m = 0.01;
  const CsvTable t = joint_pareto(inst.instance, inst.problem, inst.table, moderate(), sensing, {0.0, 0.5},
                                  {0.0, 1.0, 2.0}, 8, 2);
  EXPECT_EQ(t.rows().size(), 6u);
  EXPECT_EQ(t.header().front(), "lambda_p");
  for (size_t row = 0; row < t.rows().size(); ++row) {
    EXPECT_GE(t.number(row, "theta_total"), 0.0);
    EXPECT_GE(t.number(row, "retained"), 1.0);
  }
}

}  // namespace
}  // namespace dynsense
