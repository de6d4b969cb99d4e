// Copyright 2026 The stochgrasp Authors
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

#include "stochgrasp/normal.hpp"

#include <cmath>
#include <limits>

namespace stochgrasp {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kTailSwitch = -30.0;

// Asymptotic series S(z) with Phi(z) = phi(z) / (-z) * S(z), z << 0.
double mills_series(double z) {
  const double w = 1.0 / (z * z);
  return 1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 - 945.0 * w))));
}

}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z * kInvSqrt2));
  if (z > kTailSwitch) return std::log(0.5 * std::erfc(-z * kInvSqrt2));
  return -0.5 * z * z - std::log(-z) - kHalfLog2Pi + std::log(mills_series(z));
}

double normal_hazard(double z) {
  if (z > kTailSwitch) return normal_pdf(z) / normal_cdf(z);
  return -z / mills_series(z);
}

double log_normal_cdf_second(double z) {
  const double h = normal_hazard(z);
  if (z > kTailSwitch) return -h * (z + h);
  // z + h = z (S - 1) / S, evaluated without cancellation.
  const double s = mills_series(z);
  return -h * z * (s - 1.0) / s;
}

}  // namespace stochgrasp
