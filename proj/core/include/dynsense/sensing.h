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

// Random measurement ensembles, the measurement model z = A u + eps,
// and conditioning diagnostics (coherence, empirical RIP, sample complexity).

#ifndef DYNSENSE_SENSING_H_
#define DYNSENSE_SENSING_H_

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace dynsense {

enum class SensingEnsemble { kGaussian, kRademacher, kSubsampledOrthogonal };

std::string_view to_string(SensingEnsemble ensemble);
SensingEnsemble sensing_ensemble_from_string(std::string_view name);

struct MeasurementOperator {
  Eigen::MatrixXd entries;  // m x D
  SensingEnsemble ensemble = SensingEnsemble::kGaussian;
  std::uint64_t seed = 0;

  int m() const { return static_cast<int>(entries.rows()); }
  int D() const { return static_cast<int>(entries.cols()); }
};

struct Sketch {
  Eigen::VectorXd values;
  double noise_sigma = 0.0;

  int m() const { return static_cast<int>(values.size()); }
};

// Gaussian entries have variance 1/m, Rademacher entries are +-1/sqrt(m),
// subsampled-orthogonal rows are m distinct rows of a seeded D x D orthogonal
// matrix scaled by sqrt(D/m). Gaussian and Rademacher draws are generated
// row-major from one stream, so the first m rows of a taller draw with the
// same seed match an m-row draw up to the 1/sqrt(m) scale.
MeasurementOperator draw_operator(SensingEnsemble ensemble, int m, int D, std::uint64_t seed);

// The canonical full orthogonal operator A = I_D.
MeasurementOperator identity_operator(int D);

// z = A u + eps with eps ~ N(0, sigma^2) i.i.d., seeded.
Sketch measure(const MeasurementOperator& A, const Eigen::VectorXd& u, double noise_sigma,
               std::uint64_t seed);

// max_{i != j} |<m_i, m_j>| over internally normalized columns.
double mutual_coherence(const Eigen::MatrixXd& M);

// Largest integer k with k < (1 + 1/mu) / 2.
int coherence_sparsity_bound(double mu);

// ceil(C / delta^2 * (k ln(eG/k) + ln|family| + ln(1/rho))).
int sample_complexity(int k, int G, std::uint64_t family_size, double rho, double C, double delta);

// Same bound with the family size given as a natural log (for families too
// large to count in 64 bits).
int sample_complexity_log(int k, int G, double log_family_size, double rho, double C, double delta);

// Empirical restricted isometry constant over k-column submatrices:
// max_S max(1 - sigma_min^2, sigma_max^2 - 1). Exhaustive mode enumerates
// every support and requires C(G, k) <= 1e6.
double empirical_rip(const Eigen::MatrixXd& M, int k, int n_trials, std::uint64_t seed, bool exhaustive);

inline constexpr int kDefaultRipTrials = 200;

}  // namespace dynsense

#endif  // DYNSENSE_SENSING_H_
