// SPDX-License-Identifier: Apache-2.0
//
// otfs-zak: link-level OTFS simulator comparing two-step and Zak receivers
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

#include <cmath>
#include <cstdint>
#include <random>

#include "otfs/core_types.hpp"

namespace otfs {

/// Seeded variate stream. Single owner; Monte Carlo workers each hold their own
/// (seed = base seed + trial index).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    /// CN(0, variance): (a + jb) * sqrt(variance / 2), a, b ~ N(0, 1).
    Complex complex_normal(double variance = 1.0) {
        const double a = normal();
        const double b = normal();
        const double s = std::sqrt(variance / 2.0);
        return {a * s, b * s};
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// i.i.d. CN(0, variance) DD symbols.
inline DDGrid random_symbols(const GridConfig& cfg, Rng& rng, double variance = 1.0) {
    DDGrid x(cfg);
    for (Eigen::Index i = 0; i < x.vec().size(); ++i) x.vec()(i) = rng.complex_normal(variance);
    return x;
}

}  // namespace otfs
