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

#include "dynsense/controller.h"

#include <algorithm>
#include <cmath>

#include "dynsense/error.h"
#include "dynsense/sensing.h"

namespace dynsense {

void ControllerConfig::validate() const {
  if (m_base < 1 || m_min < 1 || m_max < 1) throw InvalidArgument("budgets must be positive");
  if (!(m_min <= m_base && m_base <= m_max)) throw InvalidArgument("controller needs m_min <= m_base <= m_max");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be nonnegative");
  if (!(beta_m >= 0.0)) throw InvalidArgument("beta_m must be nonnegative");
  if (!(rho_exponent >= 1.0)) throw InvalidArgument("rho must be at least 1");
}

double predictive_entropy(std::span<const double> p) {
  if (p.empty()) throw InvalidArgument("empty probability vector");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw InvalidArgument("probabilities must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) throw InvalidArgument("probabilities must sum to 1");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) {
      const double q = v / total;
      h -= q * std::log(q);
    }
  }
  return std::clamp(h, 0.0, std::log(static_cast<double>(p.size())));
}

int adapt_budget(double entropy, const ControllerConfig& config) {
  config.validate();
  if (!(entropy >= 0.0)) throw InvalidArgument("entropy must be nonnegative");
  const double raw = std::floor(config.m_base * (1.0 + config.gamma * entropy));
  return static_cast<int>(std::clamp(raw, static_cast<double>(config.m_min), static_cast<double>(config.m_max)));
}

double sensing_cost(int m, const ControllerConfig& config) {
  if (m < 1) throw InvalidArgument("sensing cost needs m >= 1");
  return config.beta_m * std::pow(static_cast<double>(m), config.rho_exponent);
}

StabilityReport stability_gain(double gamma, double entropy_sensitivity, int m_base, double dG_dm) {
  StabilityReport report;
  report.gamma = gamma;
  report.entropy_sensitivity = entropy_sensitivity;
  report.m_base = m_base;
  report.dG_dm = dG_dm;
  report.gain = std::abs(gamma * entropy_sensitivity * m_base * dG_dm);
  report.stable = report.gain < 1.0;
  report.positive_slope_warning = dG_dm > 0.0;
  return report;
}

bool budget_admissible(int m_t, int k_t, int G, std::uint64_t family_size, double rho, double C, double delta) {
  return m_t >= sample_complexity(k_t, G, family_size, rho, C, delta);
}

}  // namespace dynsense
