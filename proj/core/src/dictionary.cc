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

#include "dynsense/dictionary.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dynsense/error.h"
#include "dynsense/random.h"

namespace dynsense {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Indices sorted by descending score, ascending index on ties.
std::vector<int> rank_descending(const std::vector<double>& score, const std::vector<int>& ids) {
  std::vector<int> order = ids;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<size_t>(a)] > score[static_cast<size_t>(b)];
  });
  return order;
}

void check_partition(const Groups& groups, int G) {
  std::vector<int> seen(static_cast<size_t>(G), 0);
  for (const auto& grp : groups) {
    if (grp.empty()) throw InvalidArgument("empty group in partition");
    for (int g : grp) {
      if (g < 0 || g >= G) throw InvalidArgument("group member out of range: " + std::to_string(g));
      if (seen[static_cast<size_t>(g)]++) throw InvalidArgument("groups overlap at unit " + std::to_string(g));
    }
  }
  for (int g = 0; g < G; ++g) {
    if (!seen[static_cast<size_t>(g)]) throw InvalidArgument("groups do not cover unit " + std::to_string(g));
  }
}

}  // namespace

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::kBlock: return "block";
    case UnitKind::kHead: return "head";
    case UnitKind::kChannelGroup: return "channel_group";
    case UnitKind::kFfnSlice: return "ffn_slice";
    case UnitKind::kTile: return "tile";
  }
  return "block";
}

UnitKind unit_kind_from_string(std::string_view name) {
  for (UnitKind k : {UnitKind::kBlock, UnitKind::kHead, UnitKind::kChannelGroup, UnitKind::kFfnSlice,
                     UnitKind::kTile}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown unit kind: " + std::string(name));
}

std::string_view to_string(DictionaryEnsemble ensemble) {
  return ensemble == DictionaryEnsemble::kIdentityPadded ? "identity_padded" : "gaussian_normalized";
}

DictionaryEnsemble dictionary_ensemble_from_string(std::string_view name) {
  if (name == "identity_padded") return DictionaryEnsemble::kIdentityPadded;
  if (name == "gaussian_normalized") return DictionaryEnsemble::kGaussianNormalized;
  throw InvalidArgument("unknown dictionary ensemble: " + std::string(name));
}

// --- SupportSet -------------------------------------------------------------

SupportSet::SupportSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool SupportSet::contains(int id) const {
  return std::binary_search(members_.begin(), members_.end(), id);
}

int intersection_size(const SupportSet& a, const SupportSet& b) {
  int count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

int union_size(const SupportSet& a, const SupportSet& b) {
  return a.size() + b.size() - intersection_size(a, b);
}

int symmetric_difference_size(const SupportSet& a, const SupportSet& b) {
  return a.size() + b.size() - 2 * intersection_size(a, b);
}

// --- StructuredDictionary ---------------------------------------------------

StructuredDictionary StructuredDictionary::create(Eigen::MatrixXd entries,
                                                  std::vector<StructuredUnit> units, Groups groups) {
  const int D = static_cast<int>(entries.rows());
  const int G = static_cast<int>(entries.cols());
  if (D < 1 || G < 1) throw InvalidArgument("dictionary needs D >= 1 and G >= 1");
  if (static_cast<int>(units.size()) != G) throw InvalidArgument("need exactly G structured units");
  double total = 0.0;
  for (int g = 0; g < G; ++g) {
    const auto& u = units[static_cast<size_t>(g)];
    if (u.id != g) throw InvalidArgument("unit ids must be contiguous and ordered");
    if (!(u.weight >= 0.0)) throw InvalidArgument("unit weight must be nonnegative");
    total += u.weight;
    const double norm = entries.col(g).norm();
    if (std::abs(norm - 1.0) > 1e-9) {
      throw InvalidArgument("dictionary column " + std::to_string(g) + " is not unit norm");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("unit weights must sum to 1");
  check_partition(groups, G);

  StructuredDictionary dict;
  dict.entries_ = std::move(entries);
  dict.units_ = std::move(units);
  dict.groups_ = std::move(groups);
  return dict;
}

Groups contiguous_groups(int G, int group_size) {
  if (group_size < 1 || G < 1 || G % group_size != 0) {
    throw InvalidArgument("group_size must divide G");
  }
  Groups groups;
  for (int start = 0; start < G; start += group_size) {
    std::vector<int> grp(static_cast<size_t>(group_size));
    std::iota(grp.begin(), grp.end(), start);
    groups.push_back(std::move(grp));
  }
  return groups;
}

StructuredDictionary build_synthetic_dictionary(int D, int G, int group_size,
                                                DictionaryEnsemble ensemble, std::uint64_t seed) {
  if (D < 1 || G < 1) throw InvalidArgument("D and G must be positive");
  Groups groups = contiguous_groups(G, group_size);

  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(D, G);
  if (ensemble == DictionaryEnsemble::kIdentityPadded) {
    if (D < G) throw InvalidArgument("identity_padded requires D >= G");
    entries.topRows(G).setIdentity();
  } else {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int g = 0; g < G; ++g) {
      for (int d = 0; d < D; ++d) entries(d, g) = normal(rng);
      double norm = entries.col(g).norm();
      // Redraw the (probability-zero) all-zero column.
      while (norm == 0.0) {
        for (int d = 0; d < D; ++d) entries(d, g) = normal(rng);
        norm = entries.col(g).norm();
      }
      entries.col(g) /= norm;
    }
  }

  std::vector<StructuredUnit> units(static_cast<size_t>(G));
  for (int g = 0; g < G; ++g) units[static_cast<size_t>(g)] = {g, UnitKind::kBlock, 1.0 / G};
  return StructuredDictionary::create(std::move(entries), std::move(units), std::move(groups));
}

// --- FeasibleFamily ---------------------------------------------------------

std::string_view FeasibleFamily::class_name() const {
  return std::visit(Overloaded{
                        [](const UnconstrainedK&) { return std::string_view("unconstrained_k"); },
                        [](const GroupK&) { return std::string_view("group_k"); },
                        [](const NOfM&) { return std::string_view("n_of_m"); },
                        [](const MotifLibrary&) { return std::string_view("motif_library"); },
                    },
                    spec_);
}

void FeasibleFamily::validate(int G) const {
  std::visit(Overloaded{
                 [](const UnconstrainedK& f) {
                   if (f.k < 1) throw InvalidArgument("unconstrained_k needs k >= 1");
                 },
                 [G](const GroupK& f) {
                   if (f.k_groups < 1) throw InvalidArgument("group_k needs k_groups >= 1");
                   check_partition(f.groups, G);
                 },
                 [G](const NOfM& f) {
                   if (f.n < 1 || f.n > f.m) throw InvalidArgument("n_of_m needs 0 < N <= M");
                   if (G % f.m != 0) throw InvalidArgument("n_of_m needs M to divide G");
                 },
                 [G](const MotifLibrary& f) {
                   if (f.motifs.empty()) throw InvalidArgument("motif library is empty");
                   for (const auto& motif : f.motifs) {
                     for (int g : motif) {
                       if (g < 0 || g >= G) throw InvalidArgument("motif member out of range");
                     }
                   }
                 },
             },
             spec_);
}

bool FeasibleFamily::contains(const SupportSet& support, int G) const {
  for (int g : support) {
    if (g < 0 || g >= G) return false;
  }
  return std::visit(
      Overloaded{
          [&](const UnconstrainedK& f) { return support.size() <= f.k; },
          [&](const GroupK& f) {
            int used = 0;
            for (const auto& grp : f.groups) {
              int inside = 0;
              for (int g : grp) inside += support.contains(g) ? 1 : 0;
              if (inside == 0) continue;
              if (inside != static_cast<int>(grp.size())) return false;
              ++used;
            }
            return used <= f.k_groups;
          },
          [&](const NOfM& f) {
            std::vector<int> per_block(static_cast<size_t>(G / f.m + 1), 0);
            for (int g : support) {
              if (++per_block[static_cast<size_t>(g / f.m)] > f.n) return false;
            }
            return true;
          },
          [&](const MotifLibrary& f) {
            if (support.empty()) return true;
            return std::any_of(f.motifs.begin(), f.motifs.end(), [&](const SupportSet& motif) {
              return intersection_size(support, motif) == support.size();
            });
          },
      },
      spec_);
}

double FeasibleFamily::log_size(int G) const {
  return std::visit(Overloaded{
                        [G](const UnconstrainedK& f) { return log_binomial(G, std::min(f.k, G)); },
                        [](const GroupK& f) {
                          const int n = static_cast<int>(f.groups.size());
                          return log_binomial(n, std::min(f.k_groups, n));
                        },
                        [G](const NOfM& f) { return (G / f.m) * log_binomial(f.m, f.n); },
                        [](const MotifLibrary& f) {
                          return std::log(static_cast<double>(f.motifs.size()));
                        },
                    },
                    spec_);
}

int FeasibleFamily::max_support_size(int G) const {
  return std::visit(Overloaded{
                        [G](const UnconstrainedK& f) { return std::min(f.k, G); },
                        [](const GroupK& f) {
                          std::vector<int> sizes;
                          for (const auto& grp : f.groups) sizes.push_back(static_cast<int>(grp.size()));
                          std::sort(sizes.rbegin(), sizes.rend());
                          int total = 0;
                          for (int i = 0; i < f.k_groups && i < static_cast<int>(sizes.size()); ++i) {
                            total += sizes[static_cast<size_t>(i)];
                          }
                          return total;
                        },
                        [G](const NOfM& f) { return (G / f.m) * f.n; },
                        [](const MotifLibrary& f) {
                          int best = 0;
                          for (const auto& motif : f.motifs) best = std::max(best, motif.size());
                          return best;
                        },
                    },
                    spec_);
}

// --- projection -------------------------------------------------------------

SupportSet project_support(const Eigen::VectorXd& alpha, const FeasibleFamily& family) {
  return project_support(alpha, family, std::vector<bool>(static_cast<size_t>(alpha.size()), true));
}

SupportSet project_support(const Eigen::VectorXd& alpha, const FeasibleFamily& family,
                           const std::vector<bool>& eligible) {
  const int G = static_cast<int>(alpha.size());
  if (G < 1) throw InvalidArgument("cannot project an empty coefficient vector");
  if (static_cast<int>(eligible.size()) != G) throw InvalidArgument("eligibility mask length mismatch");
  family.validate(G);

  std::vector<double> energy(static_cast<size_t>(G));
  for (int g = 0; g < G; ++g) energy[static_cast<size_t>(g)] = alpha[g] * alpha[g];
  auto is_eligible = [&](int g) { return static_cast<bool>(eligible[static_cast<size_t>(g)]); };

  return std::visit(
      Overloaded{
          [&](const UnconstrainedK& f) {
            std::vector<int> ids;
            for (int g = 0; g < G; ++g) {
              if (is_eligible(g)) ids.push_back(g);
            }
            std::vector<int> order = rank_descending(energy, ids);
            if (static_cast<int>(order.size()) > f.k) order.resize(static_cast<size_t>(f.k));
            return SupportSet(std::move(order));
          },
          [&](const GroupK& f) {
            std::vector<double> score(f.groups.size(), 0.0);
            std::vector<int> ids;
            for (size_t i = 0; i < f.groups.size(); ++i) {
              bool any = false;
              for (int g : f.groups[i]) {
                if (!is_eligible(g)) continue;
                any = true;
                score[i] += energy[static_cast<size_t>(g)];
              }
              if (any) ids.push_back(static_cast<int>(i));
            }
            std::vector<int> order = rank_descending(score, ids);
            std::vector<int> members;
            for (int i = 0; i < f.k_groups && i < static_cast<int>(order.size()); ++i) {
              const auto& grp = f.groups[static_cast<size_t>(order[static_cast<size_t>(i)])];
              members.insert(members.end(), grp.begin(), grp.end());
            }
            return SupportSet(std::move(members));
          },
          [&](const NOfM& f) {
            std::vector<int> members;
            for (int start = 0; start < G; start += f.m) {
              std::vector<int> ids;
              for (int g = start; g < start + f.m; ++g) {
                if (is_eligible(g)) ids.push_back(g);
              }
              std::vector<int> order = rank_descending(energy, ids);
              for (int i = 0; i < f.n && i < static_cast<int>(order.size()); ++i) {
                members.push_back(order[static_cast<size_t>(i)]);
              }
            }
            return SupportSet(std::move(members));
          },
          [&](const MotifLibrary& f) {
            int best = -1;
            double best_energy = -1.0;
            for (size_t i = 0; i < f.motifs.size(); ++i) {
              bool any = false;
              double e = 0.0;
              for (int g : f.motifs[i]) {
                if (!is_eligible(g)) continue;
                any = true;
                e += energy[static_cast<size_t>(g)];
              }
              if (any && e > best_energy) {
                best_energy = e;
                best = static_cast<int>(i);
              }
            }
            return best < 0 ? SupportSet() : f.motifs[static_cast<size_t>(best)];
          },
      },
      family.spec());
}

double support_drift(const SupportSet& current, const SupportSet& previous) {
  const int uni = union_size(current, previous);
  if (uni == 0) return 0.0;
  return static_cast<double>(symmetric_difference_size(current, previous)) / uni;
}

SupportScores support_prf(const SupportSet& estimated, const SupportSet& truth) {
  const int hits = intersection_size(estimated, truth);
  SupportScores s;
  s.precision = estimated.empty() ? 1.0 : static_cast<double>(hits) / estimated.size();
  s.recall = truth.empty() ? 1.0 : static_cast<double>(hits) / truth.size();
  if (!estimated.empty() && truth.empty()) s.precision = 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

}  // namespace dynsense
