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

#include "dynsense/sensing.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dynsense/error.h"
#include "dynsense/random.h"
#include "oracles.h"

namespace dynsense {
namespace {

constexpr SensingEnsemble kAllEnsembles[] = {SensingEnsemble::kGaussian, SensingEnsemble::kRademacher,
                                             SensingEnsemble::kSubsampledOrthogonal};

TEST(DrawOperator, DeterministicPerEnsemble) {
  for (auto e : kAllEnsembles) {
    const auto a = draw_operator(e, 12, 20, 5);
    const auto b = draw_operator(e, 12, 20, 5);
    EXPECT_EQ(a.entries, b.entries);
    EXPECT_NE(a.entries, draw_operator(e, 12, 20, 6).entries);
    EXPECT_TRUE(a.entries.allFinite());
  }
}

TEST(DrawOperator, FullOrthogonalIsIsometry) {
  const auto A = draw_operator(SensingEnsemble::kSubsampledOrthogonal, 16, 16, 2);
  EXPECT_TRUE((A.entries * A.entries.transpose()).isApprox(Eigen::MatrixXd::Identity(16, 16), 1e-9));
}

TEST(DrawOperator, SubsampledRowsScaled) {
  const int m = 5, D = 20;
  const auto A = draw_operator(SensingEnsemble::kSubsampledOrthogonal, m, D, 2);
  const Eigen::MatrixXd gram = A.entries * A.entries.transpose();
  EXPECT_TRUE(gram.isApprox(static_cast<double>(D) / m * Eigen::MatrixXd::Identity(m, m), 1e-9));
}

TEST(DrawOperator, GaussianVariance) {
  const int m = 200;
  const auto A = draw_operator(SensingEnsemble::kGaussian, m, 50, 1);
  const double mean = A.entries.mean();
  const double var = (A.entries.array() - mean).square().sum() / (A.entries.size() - 1);
  EXPECT_GE(var, 0.8 / m);
  EXPECT_LE(var, 1.2 / m);
}

TEST(DrawOperator, RademacherEntries) {
  const int m = 9;
  const auto A = draw_operator(SensingEnsemble::kRademacher, m, 30, 4);
  for (double v : A.entries.reshaped()) EXPECT_DOUBLE_EQ(std::abs(v), 1.0 / 3.0);
}

TEST(DrawOperator, RejectsWideOrthogonal) {
  EXPECT_THROW(draw_operator(SensingEnsemble::kSubsampledOrthogonal, 21, 20, 0), InvalidArgument);
  EXPECT_THROW(draw_operator(SensingEnsemble::kGaussian, 0, 20, 0), InvalidArgument);
}

TEST(Measure, IdentityOperatorIsExact) {
  Eigen::VectorXd u(4);
  u << 1, -2, 3.5, 0;
  EXPECT_EQ(measure(identity_operator(4), u, 0.0, 0).values, u);
}

TEST(Measure, LinearWithoutNoise) {
  for (auto e : kAllEnsembles) {
    const auto A = draw_operator(e, 10, 10, 7);
    const Eigen::VectorXd u1 = Eigen::VectorXd::LinSpaced(10, -1, 1);
    const Eigen::VectorXd u2 = Eigen::VectorXd::LinSpaced(10, 3, -2);
    const Eigen::VectorXd lhs = measure(A, u1 + u2, 0.0, 1).values;
    const Eigen::VectorXd rhs = measure(A, u1, 0.0, 1).values + measure(A, u2, 0.0, 2).values;
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Measure, NoiseLevel) {
  const int m = 1000;
  const auto A = draw_operator(SensingEnsemble::kGaussian, m, 8, 3);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(8);
  const Sketch z = measure(A, u, 0.1, 9);
  const Eigen::VectorXd eps = z.values - A.entries * u;
  const double mean = eps.mean();
  const double std = std::sqrt((eps.array() - mean).square().sum() / (m - 1));
  EXPECT_GE(std, 0.09);
  EXPECT_LE(std, 0.11);
  EXPECT_EQ(z.values, measure(A, u, 0.1, 9).values);
}

TEST(Measure, RejectsLengthMismatch) {
  EXPECT_THROW(measure(identity_operator(4), Eigen::VectorXd::Ones(3), 0.0, 0), InvalidArgument);
}

TEST(MutualCoherence, Examples) {
  EXPECT_NEAR(mutual_coherence(Eigen::MatrixXd::Identity(5, 5)), 0.0, 1e-15);
  Eigen::MatrixXd dup(3, 3);
  dup << 1, 0, 1, 2, 1, 2, 0, 1, 0;
  EXPECT_NEAR(mutual_coherence(dup), 1.0, 1e-12);
  Eigen::MatrixXd two(2, 2);
  two << 1, 1 / std::numbers::sqrt2, 0, 1 / std::numbers::sqrt2;
  EXPECT_NEAR(mutual_coherence(two), 1 / std::numbers::sqrt2, 1e-12);
}

TEST(MutualCoherence, ZeroColumnIsDegenerate) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
  M.col(1).setZero();
  EXPECT_THROW(mutual_coherence(M), DegenerateInput);
}

TEST(MutualCoherenceProperty, PermutationAndScalingInvariant) {
  const auto A = draw_operator(SensingEnsemble::kGaussian, 10, 15, 8);
  const double mu = mutual_coherence(A.entries);
  Eigen::MatrixXd shuffled = A.entries;
  Rng rng = make_rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> perm(15);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int j = 0; j < 15; ++j) shuffled.col(j) = A.entries.col(perm[static_cast<size_t>(j)]) * (0.5 + j);
    EXPECT_NEAR(mutual_coherence(shuffled), mu, 1e-12);
  }
}

TEST(CoherenceSparsityBound, Examples) {
  EXPECT_EQ(coherence_sparsity_bound(0.1), 5);
  EXPECT_EQ(coherence_sparsity_bound(1.0 / 3.0), 1);
  EXPECT_EQ(coherence_sparsity_bound(1.0), 0);
  EXPECT_THROW(coherence_sparsity_bound(0.0), InvalidArgument);
}

TEST(SampleComplexity, Examples) {
  EXPECT_EQ(sample_complexity(4, 256, 16, 0.01, 1.0, 1.0), 29);
  EXPECT_EQ(sample_complexity(1, 1, 1, std::nextafter(1.0, 0.0), 1.0, 1.0), 1);
  const double raw = 4 * std::log(std::numbers::e * 64) + std::log(16.0) + std::log(100.0);
  EXPECT_EQ(sample_complexity(4, 256, 16, 0.01, 2.0, 1.0), static_cast<int>(std::ceil(2 * raw)));
  EXPECT_THROW(sample_complexity(5, 4, 1, 0.5, 1.0, 1.0), InvalidArgument);
}

TEST(SampleComplexity, LogFormAgrees) {
  EXPECT_EQ(sample_complexity_log(4, 256, std::log(16.0), 0.01, 1.0, 0.5), sample_complexity(4, 256, 16, 0.01, 1.0, 0.5));
}

TEST(SampleComplexityProperty, Monotone) {
  int previous = 0;
  for (int k = 1; k <= 20; ++k) {
    const int m = sample_complexity(k, 128, 8, 0.05, 1.0, 0.5);
    EXPECT_GE(m, previous);
    previous = m;
  }
  EXPECT_LE(sample_complexity(4, 128, 8, 0.05, 1.0, 0.5), sample_complexity(4, 128, 64, 0.05, 1.0, 0.5));
  EXPECT_LE(sample_complexity(4, 128, 8, 0.05, 1.0, 0.5), sample_complexity(4, 128, 8, 0.05, 1.5, 0.5));
  EXPECT_LE(sample_complexity(4, 128, 8, 0.05, 1.0, 0.5), sample_complexity(4, 128, 8, 0.005, 1.0, 0.5));
  // delta^-2 scaling, compared before the ceiling.
  const int half = sample_complexity(4, 128, 8, 0.05, 1.0, 1.0);
  const int quarter = sample_complexity(4, 128, 8, 0.05, 1.0, 0.5);
  EXPECT_LE(std::abs(quarter - 4 * half), 4);
}

TEST(EmpiricalRip, OrthonormalIsZero) {
  const auto Q = draw_operator(SensingEnsemble::kSubsampledOrthogonal, 8, 8, 1);
  EXPECT_NEAR(empirical_rip(Q.entries, 3, 50, 0, false), 0.0, 1e-9);
  EXPECT_NEAR(empirical_rip(Q.entries, 3, 1, 0, true), 0.0, 1e-9);
}

TEST(EmpiricalRip, SampledBelowExhaustive) {
  const auto A = draw_operator(SensingEnsemble::kGaussian, 8, 10, 2);
  const double exhaustive = empirical_rip(A.entries, 3, 1, 0, true);
  EXPECT_LE(empirical_rip(A.entries, 3, 40, 5, false), exhaustive + 1e-12);
  EXPECT_NEAR(exhaustive, oracle::exhaustive_rip(A.entries, 3), 1e-9);
}

TEST(EmpiricalRip, GaussianFixture) {
  const auto A = draw_operator(SensingEnsemble::kGaussian, 80, 40, 3);
  const double delta = empirical_rip(A.entries, 4, kDefaultRipTrials, 0, true);
  EXPECT_NEAR(delta, oracle::exhaustive_rip(A.entries, 4), 1e-9);
  EXPECT_NEAR(delta, 0.82322391448233168, 1e-9);
}

TEST(EmpiricalRipProperty, NondecreasingInK) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto A = draw_operator(SensingEnsemble::kGaussian, 10, 12, seed);
    double previous = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const double d = empirical_rip(A.entries, k, 1, 0, true);
      EXPECT_GE(d, previous - 1e-12);
      previous = d;
    }
  }
}

TEST(EmpiricalRip, ExhaustiveOverflow) {
  const auto A = draw_operator(SensingEnsemble::kGaussian, 50, 200, 0);
  EXPECT_THROW(empirical_rip(A.entries, 5, 1, 0, true), CapacityError);
}

}  // namespace
}  // namespace dynsense
