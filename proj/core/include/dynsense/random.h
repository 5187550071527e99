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

// Seed plumbing. Every random draw in the library comes from an Rng
// constructed from an explicit seed; there is no ambient generator.

#ifndef DYNSENSE_RANDOM_H_
#define DYNSENSE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace dynsense {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable (platform independent) 64-bit FNV-1a hash of a tag string.
std::uint64_t tag_hash(std::string_view tag);

// Order-sensitive combination of a base seed with any number of
// coordinates: derive_seed(s, {a, b}) != derive_seed(s, {b, a}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

// Uniformly random k-subset of [0, n), sorted ascending.
std::vector<int> sample_subset(int n, int k, Rng& rng);

}  // namespace dynsense

#endif  // DYNSENSE_RANDOM_H_
