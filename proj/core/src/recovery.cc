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

#include "dynsense/recovery.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "dynsense/error.h"

namespace dynsense {

namespace {

constexpr double kResidualFloor = 1e-10;

Eigen::VectorXd column_norms(const Eigen::MatrixXd& M) {
  Eigen::VectorXd norms = M.colwise().norm().transpose();
  for (int g = 0; g < norms.size(); ++g) {
    if (norms[g] == 0.0) throw DegenerateInput("zero column " + std::to_string(g) + " in sensing matrix");
  }
  return norms;
}

Eigen::VectorXd scatter(const SupportSet& support, const Eigen::VectorXd& coefficients, int G) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(G);
  int i = 0;
  for (int g : support) alpha[g] = coefficients[i++];
  return alpha;
}

Groups effective_groups(const RecoveryConfig& config, int G) {
  if (!config.groups.empty()) return config.groups;
  if (const auto* grp = std::get_if<GroupK>(&config.family.spec())) return grp->groups;
  return contiguous_groups(G, 1);
}

// Largest eigenvalue of M^T M by power iteration (100 steps, 1e-10).
double gram_spectral_norm(const Eigen::MatrixXd& M) {
  const int G = static_cast<int>(M.cols());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(G, 1.0 / std::sqrt(static_cast<double>(G)));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = M.transpose() * (M * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // The Rayleigh quotient of the final iterate is a tighter lower bound.
  return std::max(lambda, v.dot(M.transpose() * (M * v)));
}

// Elementwise soft-threshold followed by group soft-threshold.
Eigen::VectorXd sparse_group_prox(const Eigen::VectorXd& v, double l1, double lg, const Groups& groups) {
  Eigen::VectorXd out = v;
  for (int g = 0; g < out.size(); ++g) {
    const double a = std::abs(out[g]) - l1;
    out[g] = a > 0.0 ? std::copysign(a, out[g]) : 0.0;
  }
  if (lg > 0.0) {
    for (const auto& grp : groups) {
      double norm2 = 0.0;
      for (int g : grp) norm2 += out[g] * out[g];
      const double norm = std::sqrt(norm2);
      const double scale = norm > lg ? 1.0 - lg / norm : 0.0;
      for (int g : grp) out[g] *= scale;
    }
  }
  return out;
}

double objective_with_groups(const Eigen::VectorXd& alpha, const Eigen::VectorXd& z, const Eigen::MatrixXd& M,
                             const RecoveryConfig& config, const Groups& groups,
                             const Eigen::VectorXd* previous_alpha) {
  double value = 0.5 * (z - M * alpha).squaredNorm() + config.lambda1 * alpha.lpNorm<1>();
  if (config.lambda_group > 0.0) {
    double group_sum = 0.0;
    for (const auto& grp : groups) {
      double norm2 = 0.0;
      for (int g : grp) norm2 += alpha[g] * alpha[g];
      group_sum += std::sqrt(norm2);
    }
    value += config.lambda_group * group_sum;
  }
  if (previous_alpha != nullptr && config.gamma_temporal > 0.0) {
    value += config.gamma_temporal * (alpha - *previous_alpha).squaredNorm();
  }
  return value;
}

// Atoms that may join `selected` without leaving the family (atom-wise
// families only).
std::vector<bool> admissible_atoms(const FeasibleFamily& family, const std::vector<int>& selected, int G) {
  std::vector<bool> ok(static_cast<size_t>(G), true);
  for (int g : selected) ok[static_cast<size_t>(g)] = false;
  if (const auto* f = std::get_if<UnconstrainedK>(&family.spec())) {
    if (static_cast<int>(selected.size()) >= f->k) std::fill(ok.begin(), ok.end(), false);
  } else if (const auto* f = std::get_if<NOfM>(&family.spec())) {
    std::map<int, int> per_block;
    for (int g : selected) ++per_block[g / f->m];
    for (int g = 0; g < G; ++g) {
      if (per_block[g / f->m] >= f->n) ok[static_cast<size_t>(g)] = false;
    }
  } else if (const auto* f = std::get_if<MotifLibrary>(&family.spec())) {
    std::vector<bool> reachable(static_cast<size_t>(G), false);
    const SupportSet current(selected);
    for (const auto& motif : f->motifs) {
      if (intersection_size(current, motif) != current.size()) continue;
      for (int g : motif) reachable[static_cast<size_t>(g)] = true;
    }
    for (int g = 0; g < G; ++g) ok[static_cast<size_t>(g)] = ok[static_cast<size_t>(g)] && reachable[static_cast<size_t>(g)];
  }
  return ok;
}

}  // namespace

void RecoveryConfig::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda_group >= 0.0) || !(gamma_temporal >= 0.0) || !(tau >= 0.0)) {
    throw InvalidArgument("recovery weights must be nonnegative");
  }
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
}

Eigen::MatrixXd effective_matrix(const MeasurementOperator& A, const StructuredDictionary& Psi) {
  if (A.D() != Psi.D()) {
    throw InvalidArgument("operator has " + std::to_string(A.D()) + " columns, dictionary has " +
                          std::to_string(Psi.D()) + " rows");
  }
  return A.entries * Psi.entries();
}

LeastSquaresFit least_squares_on_support(const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
                                         const SupportSet& support) {
  LeastSquaresFit fit;
  if (support.empty()) {
    fit.coefficients.resize(0);
    fit.residual = z;
    return fit;
  }
  Eigen::MatrixXd sub(M.rows(), support.size());
  int j = 0;
  for (int g : support) sub.col(j++) = M.col(g);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  if (qr.rank() == support.size()) {
    fit.coefficients = qr.solve(z);
  } else {
    fit.rank_deficient = true;
    fit.coefficients = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(sub).solve(z);
  }
  fit.residual = z - sub * fit.coefficients;
  return fit;
}

RecoveryResult omp_structured(const Sketch& z, const Eigen::MatrixXd& M, int k_max,
                              const FeasibleFamily& family) {
  const int G = static_cast<int>(M.cols());
  if (z.values.size() != M.rows()) throw InvalidArgument("sketch length does not match sensing matrix rows");
  if (k_max < 1 || k_max > G) throw InvalidArgument("k_max must lie in [1, G]");
  family.validate(G);
  const Eigen::VectorXd norms = column_norms(M);

  RecoveryResult result;
  result.measurements_used = z.m();
  result.alpha_hat = Eigen::VectorXd::Zero(G);

  std::vector<int> selected;
  Eigen::VectorXd residual = z.values;
  Eigen::VectorXd coefficients;
  double residual_norm = residual.norm();
  result.objective_trace.push_back(residual_norm);
  const auto* group_family = std::get_if<GroupK>(&family.spec());
  int groups_used = 0;

  while (static_cast<int>(selected.size()) < k_max && residual_norm > kResidualFloor) {
    const Eigen::VectorXd corr = (M.transpose() * residual).cwiseQuotient(norms);
    std::vector<int> candidate;

    if (group_family != nullptr) {
      if (groups_used >= group_family->k_groups) break;
      double best = 0.0;
      for (const auto& grp : group_family->groups) {
        if (std::any_of(grp.begin(), grp.end(), [&](int g) {
              return std::find(selected.begin(), selected.end(), g) != selected.end();
            })) {
          continue;
        }
        if (static_cast<int>(selected.size() + grp.size()) > k_max) continue;
        double score = 0.0;
        for (int g : grp) score += corr[g] * corr[g];
        if (score > best) {
          best = score;
          candidate = grp;
        }
      }
    } else {
      const std::vector<bool> ok = admissible_atoms(family, selected, G);
      double best = 0.0;
      int pick = -1;
      for (int g = 0; g < G; ++g) {
        if (!ok[static_cast<size_t>(g)]) continue;
        if (std::abs(corr[g]) > best) {
          best = std::abs(corr[g]);
          pick = g;
        }
      }
      if (pick >= 0) candidate = {pick};
    }
    if (candidate.empty()) break;

    std::vector<int> trial = selected;
    trial.insert(trial.end(), candidate.begin(), candidate.end());
    const SupportSet trial_support(trial);
    LeastSquaresFit fit = least_squares_on_support(M, z.values, trial_support);
    const double next_norm = fit.residual.norm();
    if (!(next_norm < residual_norm)) break;  // no strict progress: stop

    selected = trial;
    if (group_family != nullptr) ++groups_used;
    result.rank_deficient = result.rank_deficient || fit.rank_deficient;
    residual = fit.residual;
    residual_norm = next_norm;
    coefficients = fit.coefficients;
    result.objective_trace.push_back(residual_norm);
    ++result.iterations;
  }

  result.support = SupportSet(selected);
  if (!result.support.empty()) result.alpha_hat = scatter(result.support, coefficients, G);
  result.residual_norm = residual_norm;
  if (!family.contains(result.support, G)) {
    // Unreachable by construction; keep the final answer admissible anyway.
    result.support = project_support(result.alpha_hat, family);
  }
  return result;
}

RecoveryResult best_subset_recovery(const Sketch& z, const Eigen::MatrixXd& M, int k_max,
                                    const FeasibleFamily& family) {
  const int G = static_cast<int>(M.cols());
  if (z.values.size() != M.rows()) throw InvalidArgument("sketch length does not match sensing matrix rows");
  if (k_max < 1 || k_max > G) throw InvalidArgument("k_max must lie in [1, G]");
  family.validate(G);

  RecoveryResult result;
  result.measurements_used = z.m();
  result.alpha_hat = Eigen::VectorXd::Zero(G);
  result.residual_norm = z.values.norm();
  result.objective_trace.push_back(result.residual_norm);

  double enumerated = 0.0;
  for (int size = std::min(k_max, family.max_support_size(G)); size >= 1; --size) {
    enumerated += std::exp(std::lgamma(G + 1.0) - std::lgamma(size + 1.0) - std::lgamma(G - size + 1.0));
    if (enumerated > 1e6) throw CapacityError("exhaustive support search exceeds 1e6 supports");
    std::vector<int> idx(static_cast<size_t>(size));
    std::iota(idx.begin(), idx.end(), 0);
    std::optional<LeastSquaresFit> best;
    SupportSet best_support;
    while (true) {
      const SupportSet s(idx);
      if (family.contains(s, G)) {
        LeastSquaresFit fit = least_squares_on_support(M, z.values, s);
        if (!best || fit.residual.norm() < best->residual.norm()) {
          best = std::move(fit);
          best_support = s;
        }
        ++result.iterations;
      }
      int i = size - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == G - size + i) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (int j = i + 1; j < size; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    if (best) {
      result.support = best_support;
      result.alpha_hat = scatter(best_support, best->coefficients, G);
      result.residual_norm = best->residual.norm();
      result.rank_deficient = best->rank_deficient;
      result.objective_trace.push_back(result.residual_norm);
      break;
    }
  }
  return result;
}

double structured_norm(const Eigen::VectorXd& alpha, const RecoveryConfig& config) {
  double value = config.lambda1 * alpha.lpNorm<1>();
  if (config.lambda_group > 0.0) {
    for (const auto& grp : effective_groups(config, static_cast<int>(alpha.size()))) {
      double norm2 = 0.0;
      for (int g : grp) norm2 += alpha[g] * alpha[g];
      value += config.lambda_group * std::sqrt(norm2);
    }
  }
  return value;
}

double sparse_group_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& z, const Eigen::MatrixXd& M,
                              const RecoveryConfig& config, const std::optional<Eigen::VectorXd>& previous_alpha) {
  const Groups groups = effective_groups(config, static_cast<int>(M.cols()));
  return objective_with_groups(alpha, z, M, config, groups, previous_alpha ? &*previous_alpha : nullptr);
}

RecoveryResult prox_group_lasso(const Sketch& z, const Eigen::MatrixXd& M, const RecoveryConfig& config,
                                const std::optional<Eigen::VectorXd>& warm_start,
                                const std::optional<Eigen::VectorXd>& previous_alpha) {
  config.validate();
  const int G = static_cast<int>(M.cols());
  if (z.values.size() != M.rows()) throw InvalidArgument("sketch length does not match sensing matrix rows");
  if (warm_start && warm_start->size() != G) throw InvalidArgument("warm start has wrong length");
  if (previous_alpha && previous_alpha->size() != G) throw InvalidArgument("previous alpha has wrong length");
  config.family.validate(G);
  const Groups groups = effective_groups(config, G);
  const Eigen::VectorXd* prev = previous_alpha ? &*previous_alpha : nullptr;
  const double gamma = prev != nullptr ? config.gamma_temporal : 0.0;

  double lipschitz = gram_spectral_norm(M) + 2.0 * gamma;
  if (!(lipschitz > 0.0)) lipschitz = 1.0;
  const double step = 1.0 / lipschitz;

  auto objective = [&](const Eigen::VectorXd& a) { return objective_with_groups(a, z.values, M, config, groups, prev); };

  Eigen::VectorXd x = warm_start ? *warm_start : Eigen::VectorXd::Zero(G);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double fx = objective(x);
  if (!std::isfinite(fx)) throw NumericalFailure("non-finite objective", 0);

  RecoveryResult result;
  result.measurements_used = z.m();
  result.objective_trace.push_back(fx);

  // Monotone FISTA: the iterate only moves when the prox point improves F.
  for (int it = 1; it <= config.max_iterations; ++it) {
    Eigen::VectorXd grad = M.transpose() * (M * y - z.values);
    if (prev != nullptr) grad += 2.0 * gamma * (y - *prev);
    const Eigen::VectorXd w =
        sparse_group_prox(y - step * grad, config.lambda1 * step, config.lambda_group * step, groups);
    const double fw = objective(w);
    if (!std::isfinite(fw) || !w.allFinite()) throw NumericalFailure("non-finite proximal iterate", it);

    const bool accepted = fw <= fx;
    const Eigen::VectorXd x_next = accepted ? w : x;
    const double f_next = accepted ? fw : fx;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + (t / t_next) * (w - x_next) + ((t - 1.0) / t_next) * (x_next - x);
    const double change = (fx - f_next) / std::max(1.0, std::abs(f_next));
    x = x_next;
    fx = f_next;
    t = t_next;
    result.objective_trace.push_back(fx);
    result.iterations = it;
    if (accepted && change <= config.tolerance) break;
  }

  result.alpha_hat = x;
  result.residual_norm = (z.values - M * x).norm();
  result.support = threshold_support(x, config);
  return result;
}

SupportSet threshold_support(const Eigen::VectorXd& alpha, const RecoveryConfig& config) {
  std::vector<bool> eligible(static_cast<size_t>(alpha.size()));
  for (int g = 0; g < alpha.size(); ++g) eligible[static_cast<size_t>(g)] = std::abs(alpha[g]) > config.tau;
  return project_support(alpha, config.family, eligible);
}

RecoveryResult recover_incremental(const Sketch& z, const Eigen::MatrixXd& M, const RecoveryResult& previous,
                                   int delta_max, const RecoveryConfig& config) {
  config.validate();
  const int G = static_cast<int>(M.cols());
  if (z.values.size() != M.rows()) throw InvalidArgument("sketch length does not match sensing matrix rows");
  if (delta_max < 0) throw InvalidArgument("delta_max must be nonnegative");
  config.family.validate(G);
  if (!config.family.contains(previous.support, G)) {
    throw InvalidArgument("previous support is not admissible under the family");
  }
  const Eigen::VectorXd norms = column_norms(M);

  // Stage 1: refit on the inherited support.
  const LeastSquaresFit refit = least_squares_on_support(M, z.values, previous.support);
  RecoveryResult stage1;
  stage1.measurements_used = z.m();
  stage1.support = previous.support;
  stage1.alpha_hat = scatter(previous.support, refit.coefficients, G);
  stage1.residual_norm = refit.residual.norm();
  stage1.rank_deficient = refit.rank_deficient;
  stage1.iterations = 1;
  stage1.objective_trace = {z.values.norm(), stage1.residual_norm};
  if (stage1.residual_norm <= config.tolerance * z.values.norm()) {
    stage1.early_exit = true;
    return stage1;
  }
  if (delta_max == 0) return stage1;

  // Stage 2: greedy additions on the residual.
  std::vector<int> members = previous.support.members();
  Eigen::VectorXd residual = refit.residual;
  double residual_norm = stage1.residual_norm;
  Eigen::VectorXd coefficients = refit.coefficients;
  bool rank_deficient = refit.rank_deficient;
  std::vector<double> trace = stage1.objective_trace;
  int iterations = 1;
  for (int added = 0; added < delta_max && residual_norm > kResidualFloor; ++added) {
    const Eigen::VectorXd corr = (M.transpose() * residual).cwiseQuotient(norms);
    int pick = -1;
    double best = 0.0;
    for (int g = 0; g < G; ++g) {
      if (std::find(members.begin(), members.end(), g) != members.end()) continue;
      if (std::abs(corr[g]) > best) {
        best = std::abs(corr[g]);
        pick = g;
      }
    }
    if (pick < 0) break;
    std::vector<int> trial = members;
    trial.push_back(pick);
    LeastSquaresFit fit = least_squares_on_support(M, z.values, SupportSet(trial));
    if (!(fit.residual.norm() < residual_norm)) break;
    members = SupportSet(trial).members();
    residual = fit.residual;
    residual_norm = residual.norm();
    coefficients = fit.coefficients;
    rank_deficient = rank_deficient || fit.rank_deficient;
    trace.push_back(residual_norm);
    ++iterations;
  }

  // Drop (at most delta_max) atoms whose refit coefficient fell below tau.
  const SupportSet grown(members);
  const Eigen::VectorXd grown_alpha = scatter(grown, coefficients, G);
  std::vector<int> order = grown.members();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(grown_alpha[a]) < std::abs(grown_alpha[b]); });
  std::vector<bool> keep(static_cast<size_t>(G), false);
  for (int g : grown) keep[static_cast<size_t>(g)] = true;
  int dropped = 0;
  for (int g : order) {
    if (dropped >= delta_max || !(std::abs(grown_alpha[g]) < config.tau)) break;
    keep[static_cast<size_t>(g)] = false;
    ++dropped;
  }

  // Bring the result back into the family among the kept atoms.
  SupportSet candidate = project_support(grown_alpha, config.family, keep);
  if (symmetric_difference_size(candidate, previous.support) > 2 * delta_max) {
    stage1.iterations = iterations;
    return stage1;
  }
  const LeastSquaresFit final_fit = least_squares_on_support(M, z.values, candidate);
  RecoveryResult result;
  result.measurements_used = z.m();
  result.support = candidate;
  result.alpha_hat = scatter(candidate, final_fit.coefficients, G);
  result.residual_norm = final_fit.residual.norm();
  result.rank_deficient = rank_deficient || final_fit.rank_deficient;
  result.iterations = iterations + 1;
  trace.push_back(result.residual_norm);
  result.objective_trace = std::move(trace);
  return result;
}

// --- error curve ------------------------------------------------------------

ErrorCurve::ErrorCurve(std::vector<int> budgets, std::vector<double> means, std::vector<double> fitted)
    : budgets_(std::move(budgets)), means_(std::move(means)), fitted_(std::move(fitted)) {}

double ErrorCurve::evaluate(double m) const {
  if (m <= budgets_.front()) return fitted_.front();
  if (m >= budgets_.back()) return fitted_.back();
  const auto hi = static_cast<size_t>(std::upper_bound(budgets_.begin(), budgets_.end(), m) - budgets_.begin());
  const size_t lo = hi - 1;
  const double w = (m - budgets_[lo]) / (budgets_[hi] - budgets_[lo]);
  return (1.0 - w) * fitted_[lo] + w * fitted_[hi];
}

double ErrorCurve::slope_at(double m) const {
  const size_t n = budgets_.size();
  auto secant = [&](size_t a, size_t b) { return (fitted_[b] - fitted_[a]) / (budgets_[b] - budgets_[a]); };
  double slope;
  if (m <= budgets_.front()) {
    slope = secant(0, 1);
  } else if (m >= budgets_.back()) {
    slope = secant(n - 2, n - 1);
  } else {
    const auto it = std::lower_bound(budgets_.begin(), budgets_.end(), m);
    const auto i = static_cast<size_t>(it - budgets_.begin());
    if (static_cast<double>(*it) == m) {
      slope = secant(i - 1, i + 1);
    } else {
      slope = secant(i - 1, i);
    }
  }
  return std::min(slope, 0.0);
}

ErrorCurveFit fit_error_curve(std::span<const std::pair<int, double>> trials, double m_base) {
  std::map<int, std::pair<double, int>> per_budget;
  for (const auto& [m, err] : trials) {
    auto& acc = per_budget[m];
    acc.first += err;
    acc.second += 1;
  }
  if (per_budget.size() < 3) throw InvalidArgument("error curve needs at least three distinct budgets");

  std::vector<int> budgets;
  std::vector<double> means;
  std::vector<double> weights;
  for (const auto& [m, acc] : per_budget) {
    budgets.push_back(m);
    means.push_back(acc.first / acc.second);
    weights.push_back(acc.second);
  }

  // Pool-adjacent-violators for a nonincreasing fit.
  struct Block {
    double value;
    double weight;
    int count;
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < means.size(); ++i) {
    blocks.push_back({means[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value < blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.count += b.count;
    }
  }
  std::vector<double> fitted;
  for (const auto& b : blocks) fitted.insert(fitted.end(), static_cast<size_t>(b.count), b.value);

  ErrorCurve curve(std::move(budgets), std::move(means), std::move(fitted));
  const double slope = curve.slope_at(m_base);
  return {std::move(curve), slope};
}

}  // namespace dynsense
