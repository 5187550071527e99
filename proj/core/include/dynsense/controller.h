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

// Uncertainty-driven sensing: the measurement budget follows the predictive
// entropy of the previous step,
//
//   m_t = clip(floor(m_base * (1 + gamma * H_{t-1})), m_min, m_max),
//
// and the loop is locally stable when |gamma * L_H * m_base * dG/dm| < 1.
// Entropies are in nats.

#ifndef DYNSENSE_CONTROLLER_H_
#define DYNSENSE_CONTROLLER_H_

#include <cstdint>
#include <span>

namespace dynsense {

struct ControllerConfig {
  int m_base = 64;
  double gamma = 0.0;
  int m_min = 1;
  int m_max = 64;
  double beta_m = 0.0;
  double rho_exponent = 1.0;

  void validate() const;
};

struct StabilityReport {
  double gain = 0.0;
  bool stable = true;
  double gamma = 0.0;
  double entropy_sensitivity = 0.0;
  int m_base = 0;
  double dG_dm = 0.0;
  // dG/dm > 0 contradicts a decreasing error curve.
  bool positive_slope_warning = false;
};

double predictive_entropy(std::span<const double> p);

int adapt_budget(double entropy, const ControllerConfig& config);

// Theta(m) = beta_m * m^rho.
double sensing_cost(int m, const ControllerConfig& config);

StabilityReport stability_gain(double gamma, double entropy_sensitivity, int m_base, double dG_dm);

bool budget_admissible(int m_t, int k_t, int G, std::uint64_t family_size, double rho, double C, double delta);

}  // namespace dynsense

#endif  // DYNSENSE_CONTROLLER_H_
