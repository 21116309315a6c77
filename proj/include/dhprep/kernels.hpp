// Copyright 2026 The dhprep Authors.
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

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "dhprep/errors.hpp"

namespace dhprep {

/// Temporal decay applied to a historical excitation. Elapsed time is in
/// snapshot units and every kind equals 1 at zero elapsed time.
enum class KernelKind { exponential, power_law, rayleigh, flat };

inline constexpr std::array<KernelKind, 4> kAllKernels = {KernelKind::exponential, KernelKind::power_law,
                                                          KernelKind::rayleigh, KernelKind::flat};

inline std::string_view kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::exponential: return "exponential";
    case KernelKind::power_law: return "power-law";
    case KernelKind::rayleigh: return "rayleigh";
    case KernelKind::flat: return "flat";
  }
  return "?";
}

inline KernelKind parse_kernel(std::string_view name) {
  for (auto k : kAllKernels) {
    if (kernel_name(k) == name) return k;
  }
  if (name == "powerlaw" || name == "power_law") return KernelKind::power_law;
  throw ValidationError("unknown kernel '" + std::string(name) + "'");
}

/// Kernel value and its derivative with respect to the decay rate.
struct KernelValue {
  double value;
  double d_delta;
};

inline KernelValue decay_kernel_with_derivative(KernelKind kind, double delta, double dt) {
  if (!(delta > 0.0)) throw ValidationError("decay rate must be positive");
  if (!(dt >= 0.0)) throw ValidationError("elapsed time must be non-negative");
  switch (kind) {
    case KernelKind::exponential: {
      const double v = std::exp(-delta * dt);
      return {v, -dt * v};
    }
    case KernelKind::power_law: {
      const double denom = 1.0 + delta * dt;
      return {1.0 / denom, -dt / (denom * denom)};
    }
    case KernelKind::rayleigh: {
      const double half_sq = 0.5 * dt * dt;
      const double v = std::exp(-delta * half_sq);
      return {v, -half_sq * v};
    }
    case KernelKind::flat:
      return {1.0, 0.0};
  }
  return {1.0, 0.0};
}

/// exponential: exp(-delta dt); power-law: 1/(1 + delta dt);
/// rayleigh: exp(-delta dt^2 / 2); flat: 1.
inline double decay_kernel(KernelKind kind, double delta, double dt) {
  return decay_kernel_with_derivative(kind, delta, dt).value;
}

}  // namespace dhprep
