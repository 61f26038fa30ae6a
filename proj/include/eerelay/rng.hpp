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

#pragma once

#include <cstdint>
#include <random>

#include "eerelay/matops.hpp"

namespace eerelay {

/// splitmix64 finalizer (Steele, Lea, Flood 2014). Constants:
/// 0x9e3779b97f4a7c15 increment, 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb
/// multipliers, shifts 30/27/31.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the substream for (master, scenario, algorithm). Algorithm id 0
/// is reserved for the channel draw so every algorithm sees the same
/// channels (paired comparison).
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t scenario, std::uint64_t algorithm_id);

/// Deterministic generator. Distributions are implemented here rather
/// than with <random> distributions, whose output is not specified
/// bit-for-bit across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard real normal (Box-Muller, one value per call pair cached).
    double normal();

    /// Circular complex Gaussian, E|z|^2 = 1 (variance 1/2 per part).
    cplx complex_normal();

    /// rows x cols matrix of i.i.d. complex_normal entries, column-major fill.
    CMatrix complex_gaussian(int rows, int cols);

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace eerelay
