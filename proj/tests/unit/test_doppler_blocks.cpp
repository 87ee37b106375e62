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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "../oracles.hpp"
#include "otfs/capacity.hpp"
#include "otfs/doppler_blocks.hpp"
#include "otfs/random.hpp"

using namespace otfs;
using Catch::Matchers::WithinAbs;

namespace {
PathSet random_paths(Rng& rng, const GridConfig& cfg, int L) {
    PathSet p;
    for (int i = 0; i < L; ++i)
        p.add({rng.complex_normal(1.0 / L), rng.uniform() * cfg.T(), (rng.uniform() - 0.5) * 8.0 * cfg.delta_f()});
    return p;
}
}  // namespace

TEST_CASE("block-cyclic channels equal the Doppler-domain transform of the dense matrices") {
    Rng rng(51);
    for (auto [M, N] : {std::pair{4, 6}, std::pair{15, 46}, std::pair{3, 3}}) {
        const GridConfig cfg(M, N, 2000.0);
        for (int rep = 0; rep < 2; ++rep) {
            const PathSet paths = random_paths(rng, cfg, 1 + rep * 2);
            const CMatrix Ht = oracle::doppler_domain(build_two_step_matrix(paths, cfg).matrix, M, N);
            const CMatrix Hz = oracle::doppler_domain(build_zak_matrix(paths, cfg).matrix, M, N);
            CHECK((two_step_blocks(paths, cfg).to_dense() - Ht).cwiseAbs().maxCoeff() < 1e-11);
            CHECK((zak_blocks(paths, cfg).to_dense() - Hz).cwiseAbs().maxCoeff() < 1e-11);
        }
    }
}

TEST_CASE("whitening only accepts Zak channels") {
    const GridConfig cfg(4, 4, 1000.0);
    const PathSet p{{1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(whiten_zak_noise(two_step_blocks(p, cfg)), std::invalid_argument);
}

TEST_CASE("structured SE equals the dense SE") {
    Rng rng(52);
    for (auto [M, N] : {std::pair{15, 46}, std::pair{5, 3}, std::pair{6, 2}, std::pair{7, 1}, std::pair{4, 9}}) {
        const GridConfig cfg(M, N, 2000.0);
        for (int rep = 0; rep < 2; ++rep) {
            const PathSet paths = random_paths(rng, cfg, 2 + rep);
            const auto grams = ReceiverGrams::build(paths, cfg);
            const auto Hz = build_zak_matrix(paths, cfg);
            const auto Ht = build_two_step_matrix(paths, cfg);
            for (double rho : {0.1, 10.0, 100.0}) {
                INFO("M = " << M << ", N = " << N << ", rho = " << rho);
                CHECK_THAT(grams.se(SEKind::TwoStep, rho).se_bits_per_sec_per_hz - se_two_step(Ht, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz,
                           WithinAbs(0.0, 1e-9));
                CHECK_THAT(grams.se(SEKind::ZakApprox, rho).se_bits_per_sec_per_hz - se_zak_approx(Hz, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz,
                           WithinAbs(0.0, 1e-9));
                CHECK_THAT(grams.se(SEKind::ZakExact, rho).se_bits_per_sec_per_hz - se_zak_exact(Hz, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz,
                           WithinAbs(0.0, 1e-9));
            }
        }
    }
}

TEST_CASE("structured SE rejects unsupported kinds and invalid rho") {
    const GridConfig cfg(4, 5, 1000.0);
    const auto grams = ReceiverGrams::build(PathSet{{1.0, 0.0, 0.0}}, cfg);
    CHECK_THROWS_AS(grams.se(SEKind::AnalyticClosedForm, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(grams.se(SEKind::TwoStep, 0.0), std::invalid_argument);
    CHECK_THAT(grams.se(SEKind::TwoStep, 10.0).se_bits_per_sec_per_hz, WithinAbs(std::log2(11.0), 1e-12));
}
