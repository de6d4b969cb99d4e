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

#ifndef STOCHGRASP_NORMAL_HPP_
#define STOCHGRASP_NORMAL_HPP_

namespace stochgrasp {

// Standard normal density.
double normal_pdf(double z);

// Standard normal CDF, via erfc so the lower tail keeps relative precision.
double normal_cdf(double z);

// log(Phi(z)). Finite for every finite z: uses erfc in the bulk, log1p in
// the upper tail and the asymptotic Mills-ratio series below z = -30.
double log_normal_cdf(double z);

// phi(z) / Phi(z), the first derivative of log(Phi(z)).
double normal_hazard(double z);

// Second derivative of log(Phi(z)); always negative.
double log_normal_cdf_second(double z);

}  // namespace stochgrasp

#endif  // STOCHGRASP_NORMAL_HPP_
