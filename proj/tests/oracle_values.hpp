// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Reference values computed independently of the library by
// tools/gen_oracle_values.py (scipy quadrature and optimizers). Frozen:
// a mismatch means the library is wrong, not this file.

#pragma once

namespace oracle_values {

// argmax and max of log2(1 + p) / (p + 5) on [0, 10]
inline constexpr double kScalarRatioArgmax = 4.57239259817687;
inline constexpr double kScalarRatioMax = 0.258900466101122;

// E ln(1 + a X) with X ~ Gamma(k, 1)
inline constexpr double kElogGamma1a2 = 0.92291063248373;
inline constexpr double kElogGamma2a05 = 0.638671383111777;
inline constexpr double kElogGamma3a4 = 2.42256675377453;

// Two-stream beamforming instance: Lambda_C = I_2, lambda_t = (2, 1),
// b = 0.1, c = 0.5. Left side of the full-power condition at P dBW.
inline constexpr double kBeamLhsM15 = 0.996246926938315;
inline constexpr double kBeamLhsM10 = 0.984050767987834;
inline constexpr double kBeamLhsM5 = 1.00078441497428;
inline constexpr double kBeamLhs0 = 1.35275982080816;
inline constexpr double kBeamFlipDbw = -5.04297255822;

// Single-stream perfect-CSI GEE optimum: h = 2, g = 1.5, P_S = P_R = 10,
// P_c = 1, unit noise, no rate target.
inline constexpr double kPerfect1Q = 1.63392950469;
inline constexpr double kPerfect1A = 0.433101548567;
inline constexpr double kPerfect1Gee = 0.266245970652783;

}  // namespace oracle_values
