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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dynsense/error.h"
#include "dynsense/random.h"

namespace dynsense {

namespace {

// Rounds up, absorbing floating noise of relative size 1e-9 in the argument.
int ceil_tolerant(double x) {
  const double slack = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<int>(std::ceil(x - slack));
}

double extreme_isometry_defect(const Eigen::MatrixXd& M, const std::vector<int>& cols) {
  const int k = static_cast<int>(cols.size());
  Eigen::MatrixXd sub(M.rows(), k);
  for (int j = 0; j < k; ++j) sub.col(j) = M.col(cols[static_cast<size_t>(j)]);
  Eigen::MatrixXd gram = sub.transpose() * sub;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();  // ascending; these are sigma^2
  return std::max(1.0 - ev[0], ev[k - 1] - 1.0);
}

}  // namespace

std::string_view to_string(SensingEnsemble ensemble) {
  switch (ensemble) {
    case SensingEnsemble::kGaussian: return "gaussian";
    case SensingEnsemble::kRademacher: return "rademacher";
    case SensingEnsemble::kSubsampledOrthogonal: return "subsampled_orthogonal";
  }
  return "gaussian";
}

SensingEnsemble sensing_ensemble_from_string(std::string_view name) {
  for (auto e : {SensingEnsemble::kGaussian, SensingEnsemble::kRademacher,
                 SensingEnsemble::kSubsampledOrthogonal}) {
    if (to_string(e) == name) return e;
  }
  throw InvalidArgument("unknown sensing ensemble: " + std::string(name));
}

MeasurementOperator draw_operator(SensingEnsemble ensemble, int m, int D, std::uint64_t seed) {
  if (m < 1 || D < 1) throw InvalidArgument("operator needs m >= 1 and D >= 1");
  MeasurementOperator op;
  op.ensemble = ensemble;
  op.seed = seed;
  op.entries.resize(m, D);
  Rng rng = make_rng(seed);

  switch (ensemble) {
    case SensingEnsemble::kGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < D; ++j) op.entries(i, j) = scale * normal(rng);
      }
      break;
    }
    case SensingEnsemble::kRademacher: {
      std::bernoulli_distribution coin(0.5);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < D; ++j) op.entries(i, j) = coin(rng) ? scale : -scale;
      }
      break;
    }
    case SensingEnsemble::kSubsampledOrthogonal: {
      if (m > D) throw InvalidArgument("subsampled_orthogonal needs m <= D");
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd gauss(D, D);
      for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) gauss(i, j) = normal(rng);
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
      Eigen::MatrixXd q = qr.householderQ();
      // Sign-fix against diag(R) so Q is a deterministic function of the draw.
      const Eigen::MatrixXd& r = qr.matrixQR();
      for (int j = 0; j < D; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
      }
      std::vector<int> rows = sample_subset(D, m, rng);
      const double scale = std::sqrt(static_cast<double>(D) / m);
      for (int i = 0; i < m; ++i) op.entries.row(i) = scale * q.row(rows[static_cast<size_t>(i)]);
      break;
    }
  }
  return op;
}

MeasurementOperator identity_operator(int D) {
  if (D < 1) throw InvalidArgument("identity operator needs D >= 1");
  MeasurementOperator op;
  op.ensemble = SensingEnsemble::kSubsampledOrthogonal;
  op.seed = 0;
  op.entries = Eigen::MatrixXd::Identity(D, D);
  return op;
}

Sketch measure(const MeasurementOperator& A, const Eigen::VectorXd& u, double noise_sigma,
               std::uint64_t seed) {
  if (u.size() != A.D()) throw InvalidArgument("measure: u has length " + std::to_string(u.size()) +
                                               ", operator expects " + std::to_string(A.D()));
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be nonnegative");
  Sketch z;
  z.noise_sigma = noise_sigma;
  z.values = A.entries * u;
  if (noise_sigma > 0.0) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < z.values.size(); ++i) z.values[i] += noise_sigma * normal(rng);
  }
  return z;
}

double mutual_coherence(const Eigen::MatrixXd& M) {
  if (M.cols() < 2) throw InvalidArgument("mutual coherence needs at least two columns");
  Eigen::MatrixXd normalized = M;
  for (int j = 0; j < M.cols(); ++j) {
    const double norm = M.col(j).norm();
    if (norm == 0.0) throw DegenerateInput("zero column " + std::to_string(j));
    normalized.col(j) /= norm;
  }
  Eigen::MatrixXd gram = normalized.transpose() * normalized;
  double mu = 0.0;
  for (int i = 0; i < gram.rows(); ++i) {
    for (int j = i + 1; j < gram.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)));
  }
  return std::min(mu, 1.0);
}

int coherence_sparsity_bound(double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("coherence must be positive");
  const double limit = 0.5 * (1.0 + 1.0 / mu);
  // Strict inequality: an integral limit (up to rounding) is excluded.
  return ceil_tolerant(limit) - 1;
}

int sample_complexity_log(int k, int G, double log_family_size, double rho, double C, double delta) {
  if (k < 1 || G < 1) throw InvalidArgument("sample complexity needs k >= 1 and G >= 1");
  if (k > G) throw InvalidArgument("sample complexity needs k <= G");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
  if (!(C > 0.0)) throw InvalidArgument("C must be positive");
  if (!(log_family_size >= 0.0)) throw InvalidArgument("family size must be at least 1");
  const double combinatorial = k * std::log(std::exp(1.0) * G / k);
  const double bound = C / (delta * delta) * (combinatorial + log_family_size + std::log(1.0 / rho));
  return ceil_tolerant(bound);
}

int sample_complexity(int k, int G, std::uint64_t family_size, double rho, double C, double delta) {
  if (family_size < 1) throw InvalidArgument("family size must be at least 1");
  return sample_complexity_log(k, G, std::log(static_cast<double>(family_size)), rho, C, delta);
}

double empirical_rip(const Eigen::MatrixXd& M, int k, int n_trials, std::uint64_t seed, bool exhaustive) {
  const int G = static_cast<int>(M.cols());
  if (k < 1 || k > G) throw InvalidArgument("empirical_rip needs 1 <= k <= columns");
  double delta = 0.0;
  if (exhaustive) {
    const double log_count = std::lgamma(G + 1.0) - std::lgamma(k + 1.0) - std::lgamma(G - k + 1.0);
    if (log_count > std::log(1e6) + 1e-9) {
      throw CapacityError("exhaustive RIP enumeration exceeds 1e6 supports");
    }
    // Lexicographic enumeration of k-combinations.
    std::vector<int> cols(static_cast<size_t>(k));
    std::iota(cols.begin(), cols.end(), 0);
    while (true) {
      delta = std::max(delta, extreme_isometry_defect(M, cols));
      int i = k - 1;
      while (i >= 0 && cols[static_cast<size_t>(i)] == G - k + i) --i;
      if (i < 0) break;
      ++cols[static_cast<size_t>(i)];
      for (int j = i + 1; j < k; ++j) cols[static_cast<size_t>(j)] = cols[static_cast<size_t>(j - 1)] + 1;
    }
    return delta;
  }
  if (n_trials < 1) throw InvalidArgument("empirical_rip needs n_trials >= 1");
  for (int trial = 0; trial < n_trials; ++trial) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
    delta = std::max(delta, extreme_isometry_defect(M, sample_subset(G, k, rng)));
  }
  return delta;
}

}  // namespace dynsense
