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

// Structured computational units, the unit dictionary, hardware-feasible
// support families and support-set algebra.

#ifndef DYNSENSE_DICTIONARY_H_
#define DYNSENSE_DICTIONARY_H_

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dynsense {

enum class UnitKind { kBlock, kHead, kChannelGroup, kFfnSlice, kTile };

std::string_view to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string_view name);

struct StructuredUnit {
  int id = 0;
  UnitKind kind = UnitKind::kBlock;
  // Relative execution cost (share of total FLOPs).
  double weight = 0.0;
};

// Partition of [0, G) into disjoint index lists.
using Groups = std::vector<std::vector<int>>;

// Sorted, duplicate-free set of unit ids.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<int> members);
  SupportSet(std::initializer_list<int> members) : SupportSet(std::vector<int>(members)) {}

  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int id) const;
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<int> members_;
};

int intersection_size(const SupportSet& a, const SupportSet& b);
int union_size(const SupportSet& a, const SupportSet& b);
int symmetric_difference_size(const SupportSet& a, const SupportSet& b);

class StructuredDictionary {
 public:
  // Validates every invariant: unit-norm columns, contiguous unit ids,
  // weights summing to one, groups partitioning [0, G).
  static StructuredDictionary create(Eigen::MatrixXd entries, std::vector<StructuredUnit> units,
                                     Groups groups);

  int D() const { return static_cast<int>(entries_.rows()); }
  int G() const { return static_cast<int>(entries_.cols()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const std::vector<StructuredUnit>& units() const { return units_; }
  const Groups& groups() const { return groups_; }

 private:
  StructuredDictionary() = default;

  Eigen::MatrixXd entries_;
  std::vector<StructuredUnit> units_;
  Groups groups_;
};

enum class DictionaryEnsemble { kIdentityPadded, kGaussianNormalized };

std::string_view to_string(DictionaryEnsemble ensemble);
DictionaryEnsemble dictionary_ensemble_from_string(std::string_view name);

// Groups are consecutive runs of `group_size` units; unit weights are 1/G.
StructuredDictionary build_synthetic_dictionary(int D, int G, int group_size,
                                                DictionaryEnsemble ensemble, std::uint64_t seed);

// Contiguous groups [0,s), [s,2s), ...; G must be a multiple of s.
Groups contiguous_groups(int G, int group_size);

struct UnconstrainedK {
  int k = 1;
};
struct GroupK {
  int k_groups = 1;
  Groups groups;
};
struct NOfM {
  int n = 1;
  int m = 1;
};
struct MotifLibrary {
  std::vector<SupportSet> motifs;
};

// The hardware-feasible support family.
class FeasibleFamily {
 public:
  using Spec = std::variant<UnconstrainedK, GroupK, NOfM, MotifLibrary>;

  FeasibleFamily() : spec_(UnconstrainedK{1}) {}
  explicit FeasibleFamily(Spec spec) : spec_(std::move(spec)) {}

  static FeasibleFamily unconstrained(int k) { return FeasibleFamily(UnconstrainedK{k}); }
  static FeasibleFamily group(int k_groups, Groups groups) {
    return FeasibleFamily(GroupK{k_groups, std::move(groups)});
  }
  static FeasibleFamily n_of_m(int n, int m) { return FeasibleFamily(NOfM{n, m}); }
  static FeasibleFamily motifs(std::vector<SupportSet> motifs) {
    return FeasibleFamily(MotifLibrary{std::move(motifs)});
  }

  const Spec& spec() const { return spec_; }
  std::string_view class_name() const;

  // Throws InvalidArgument when the parameters are inconsistent with G.
  void validate(int G) const;

  // Membership predicate. Unconstrained: |S| <= k. Group: S is a union of at
  // most k whole groups. N:M: every block holds at most N members. Motif
  // library: S is contained in some motif.
  bool contains(const SupportSet& support, int G) const;

  // Natural log of the number of maximal admissible supports.
  double log_size(int G) const;

  // Largest support the family admits.
  int max_support_size(int G) const;

 private:
  Spec spec_;
};

// Projects a coefficient vector onto the family. Ties go to the lowest index.
SupportSet project_support(const Eigen::VectorXd& alpha, const FeasibleFamily& family);

// Same projection, considering only the units flagged in `eligible`.
// Structures (groups, motifs) qualify when they contain at least one eligible
// unit; plain and N:M selections never pick an ineligible unit.
SupportSet project_support(const Eigen::VectorXd& alpha, const FeasibleFamily& family,
                           const std::vector<bool>& eligible);

// Jaccard distance |A xor B| / |A u B|; 0 when both are empty.
double support_drift(const SupportSet& current, const SupportSet& previous);

struct SupportScores {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Empty estimate counts as precision 1. Empty truth counts as recall 1.
SupportScores support_prf(const SupportSet& estimated, const SupportSet& truth);

}  // namespace dynsense

#endif  // DYNSENSE_DICTIONARY_H_
