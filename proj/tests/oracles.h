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

// Independent brute-force oracles. Nothing here calls the solver or
// projection code under test; linear algebra goes through SVD rather than the
// QR paths the library uses.

#ifndef DYNSENSE_TESTS_ORACLES_H_
#define DYNSENSE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dynsense/allocator.h"
#include "dynsense/dictionary.h"
#include "dynsense/random.h"
#include "dynsense/sensing.h"

namespace dynsense::oracle {

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

// Visits every k-subset of [0, n) in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  if (k > n) return;
  while (true) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

inline bool is_member(const std::vector<int>& s, const FeasibleFamily& family, int G) {
  for (int g : s) {
    if (g < 0 || g >= G) return false;
  }
  if (const auto* f = std::get_if<UnconstrainedK>(&family.spec())) return static_cast<int>(s.size()) <= f->k;
  if (const auto* f = std::get_if<NOfM>(&family.spec())) {
    std::vector<int> per_block(static_cast<size_t>(G / f->m), 0);
    for (int g : s) {
      if (++per_block[static_cast<size_t>(g / f->m)] > f->n) return false;
    }
    return true;
  }
  if (const auto* f = std::get_if<GroupK>(&family.spec())) {
    int used = 0;
    for (const auto& group : f->groups) {
      int hit = 0;
      for (int g : group) hit += std::count(s.begin(), s.end(), g) ? 1 : 0;
      if (hit == 0) continue;
      if (hit != static_cast<int>(group.size())) return false;
      ++used;
    }
    return used <= f->k_groups;
  }
  const auto& motifs = std::get<MotifLibrary>(family.spec()).motifs;
  for (const auto& motif : motifs) {
    bool inside = true;
    for (int g : s) inside = inside && motif.contains(g);
    if (inside) return true;
  }
  return false;
}

inline double energy(const Eigen::VectorXd& alpha, const std::vector<int>& s) {
  double e = 0.0;
  for (int g : s) e += alpha[g] * alpha[g];
  return e;
}

// Largest sum of squares over every admissible support (any size).
inline double best_projection_energy(const Eigen::VectorXd& alpha, const FeasibleFamily& family) {
  const int G = static_cast<int>(alpha.size());
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << G); ++mask) {
    std::vector<int> s;
    for (int g = 0; g < G; ++g) {
      if (mask & (1u << g)) s.push_back(g);
    }
    if (is_member(s, family, G)) best = std::max(best, energy(alpha, s));
  }
  return best;
}

inline Eigen::VectorXd svd_least_squares(const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
                                         const std::vector<int>& s) {
  Eigen::MatrixXd sub(M.rows(), static_cast<Eigen::Index>(s.size()));
  for (size_t j = 0; j < s.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = M.col(s[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(z);
}

struct SubsetFit {
  std::vector<int> support;
  Eigen::VectorXd alpha;  // full length
  double residual = std::numeric_limits<double>::infinity();
};

// Best k-subset least-squares fit by exhaustive enumeration.
inline SubsetFit best_subset(const Eigen::MatrixXd& M, const Eigen::VectorXd& z, int k) {
  SubsetFit best;
  for_each_subset(static_cast<int>(M.cols()), k, [&](const std::vector<int>& s) {
    const Eigen::VectorXd c = svd_least_squares(M, z, s);
    Eigen::VectorXd fitted = Eigen::VectorXd::Zero(M.rows());
    for (size_t j = 0; j < s.size(); ++j) fitted += c[static_cast<Eigen::Index>(j)] * M.col(s[j]);
    const double r = (z - fitted).norm();
    if (r < best.residual - 1e-12) {
      best.residual = r;
      best.support = s;
      best.alpha = Eigen::VectorXd::Zero(M.cols());
      for (size_t j = 0; j < s.size(); ++j) best.alpha[s[j]] = c[static_cast<Eigen::Index>(j)];
    }
  });
  return best;
}

inline double exhaustive_rip(const Eigen::MatrixXd& M, int k) {
  double delta = 0.0;
  for_each_subset(static_cast<int>(M.cols()), k, [&](const std::vector<int>& s) {
    Eigen::MatrixXd sub(M.rows(), k);
    for (int j = 0; j < k; ++j) sub.col(j) = M.col(s[static_cast<size_t>(j)]);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues();
    const double smax = sv.maxCoeff();
    const double smin = sub.rows() >= k ? sv.minCoeff() : 0.0;
    delta = std::max({delta, 1.0 - smin * smin, smax * smax - 1.0});
  });
  return delta;
}

// Nonincreasing isotonic fit via the min-max formula
// f_i = min_{j <= i} max_{l >= i} mean(y_j..y_l), weighted by w.
inline std::vector<double> isotonic_nonincreasing(const std::vector<double>& y, const std::vector<double>& w) {
  const size_t n = y.size();
  std::vector<double> f(n);
  for (size_t i = 0; i < n; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j <= i; ++j) {
      double hi = -std::numeric_limits<double>::infinity();
      for (size_t l = i; l < n; ++l) {
        double num = 0.0, den = 0.0;
        for (size_t q = j; q <= l; ++q) {
          num += w[q] * y[q];
          den += w[q];
        }
        hi = std::max(hi, num / den);
      }
      lo = std::min(lo, hi);
    }
    f[i] = lo;
  }
  return f;
}

// Joint objective recomputed from scratch for retention r with best-subset
// recovery at every step. Sketches are rebuilt with the library's seeded
// noise stream so the oracle sees the same measurements as the optimizer.
inline double joint_objective_exhaustive(const Retention& r, const PromptInstance& inst, const JointProblem& problem,
                                         const LatencyTable& table, const JointConfig& config, std::uint64_t seed) {
  const int n = inst.n();
  double dropped = 0.0;
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    if (r[static_cast<size_t>(i)]) {
      ++kept;
    } else {
      dropped += inst.importance[i];
    }
  }
  const double sigma = config.sigma0 + config.c_faith * dropped;
  double error = 0.0, norm = 0.0, decode = 0.0, switches = 0.0;
  std::vector<int> previous;
  for (int t = 0; t < problem.T(); ++t) {
    const Eigen::VectorXd& truth = problem.truths[static_cast<size_t>(t)];
    const MeasurementOperator& A = problem.operators[static_cast<size_t>(t)];
    Eigen::VectorXd u = problem.dictionary.entries() * truth;
    for (int i = 0; i < n; ++i) {
      if (!r[static_cast<size_t>(i)]) u -= inst.contributions.row(i).transpose();
    }
    const Sketch z = measure(A, u, sigma, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const Eigen::MatrixXd M = A.entries * problem.dictionary.entries();
    const SubsetFit fit = best_subset(M, z.values, problem.k_max);
    error += (fit.alpha - truth).norm();
    norm += problem.recovery.lambda1 * fit.alpha.lpNorm<1>() + problem.recovery.lambda_group * fit.alpha.lpNorm<1>();
    decode += table.decode_base;
    for (int g : fit.support) decode += table.unit_costs.at(g);
    if (t > 0) {
      std::vector<int> diff;
      std::set_symmetric_difference(fit.support.begin(), fit.support.end(), previous.begin(), previous.end(),
                                    std::back_inserter(diff));
      switches += static_cast<double>(diff.size());
    }
    previous = fit.support;
  }
  return error / problem.T() + config.lambda_p * kept + config.lambda_m * norm +
         config.beta_tau * (table.prefill_cost_per_token * kept + decode) + config.beta_f * dropped +
         config.beta_c * switches;
}

// Minimum over every feasible retention.
inline double joint_brute_force(const PromptInstance& inst, const JointProblem& problem, const LatencyTable& table,
                                const JointConfig& config, std::uint64_t seed) {
  const int n = inst.n();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Retention r(static_cast<size_t>(n));
    int kept = 0;
    for (int i = 0; i < n; ++i) {
      r[static_cast<size_t>(i)] = (mask >> i) & 1u;
      kept += r[static_cast<size_t>(i)];
    }
    if (kept < inst.min_retained) continue;
    best = std::min(best, joint_objective_exhaustive(r, inst, problem, table, config, seed));
  }
  return best;
}

}  // namespace dynsense::oracle

#endif  // DYNSENSE_TESTS_ORACLES_H_
