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

#include <cstdint>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "dynsense/dictionary.h"
#include "dynsense/random.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"

namespace dynsense {
namespace {

struct Instance {
  Eigen::MatrixXd M;
  Sketch z;
  int k;
};

// Sparse signal with unit-magnitude random-sign entries, sensed by a
// Gaussian operator over an identity-padded dictionary.
Instance make_instance(int m, int G, int k, std::uint64_t seed) {
  const StructuredDictionary psi =
      build_synthetic_dictionary(G, G, 1, DictionaryEnsemble::kIdentityPadded, derive_seed(seed, {0}));
  const MeasurementOperator A = draw_operator(SensingEnsemble::kGaussian, m, G, derive_seed(seed, {1}));
  auto rng = make_rng(derive_seed(seed, {2}));
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(G);
  for (int i = 0; i < k; ++i) alpha[(i * 7919 + static_cast<int>(rng() % G)) % G] = (rng() & 1) ? 1.0 : -1.0;
  Instance out{effective_matrix(A, psi), {}, k};
  out.z = measure(A, psi.entries() * alpha, 0.01, derive_seed(seed, {3}));
  return out;
}

void BM_Omp(benchmark::State& state) {
  const int G = static_cast<int>(state.range(0));
  const Instance in = make_instance(G / 2, G, 8, 1);
  const FeasibleFamily family = FeasibleFamily::unconstrained(in.k);
  for (auto _ : state) benchmark::DoNotOptimize(omp_structured(in.z, in.M, in.k, family));
}
BENCHMARK(BM_Omp)->Arg(64)->Arg(256)->Arg(1024);

void BM_ProxGroupLasso(benchmark::State& state) {
  const int G = static_cast<int>(state.range(0));
  const Instance in = make_instance(G / 2, G, 8, 2);
  RecoveryConfig config;
  config.lambda1 = 0.02;
  config.lambda_group = 0.01;
  config.tau = 0.1;
  config.max_iterations = 200;
  config.family = FeasibleFamily::unconstrained(in.k);
  for (auto _ : state) benchmark::DoNotOptimize(prox_group_lasso(in.z, in.M, config));
}
BENCHMARK(BM_ProxGroupLasso)->Arg(64)->Arg(256)->Arg(1024);

void BM_MutualCoherence(benchmark::State& state) {
  const int G = static_cast<int>(state.range(0));
  const Instance in = make_instance(G / 2, G, 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(mutual_coherence(in.M));
}
BENCHMARK(BM_MutualCoherence)->Arg(64)->Arg(256)->Arg(1024);

void BM_SampledRip(benchmark::State& state) {
  const Instance in = make_instance(64, 128, 1, 4);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_rip(in.M, k, 200, 5, false));
}
BENCHMARK(BM_SampledRip)->Arg(4)->Arg(16);

}  // namespace
}  // namespace dynsense

BENCHMARK_MAIN();
