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

#include "otfs/scenarios.hpp"

using namespace otfs;
using Catch::Matchers::WithinAbs;

TEST_CASE("maximum Doppler at 400 m/s is 0.225 of the bandwidth") {
    UASConfig sc;
    sc.speed_mps = 400.0;
    CHECK_THAT(sc.max_doppler_hz() / sc.grid.bandwidth(), WithinAbs(0.225, 0.002));
}

TEST_CASE("sample_uas_channel structure") {
    UASConfig sc;
    sc.speed_mps = 300.0;
    const double K = db_to_linear(15.0);
    const double nu1 = sc.max_doppler_hz();
    const double omega = 3.5 * kPi / 180.0;
    Rng rng(61);
    double p2 = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const PathSet p = sample_uas_channel(sc, rng);
        REQUIRE(p.size() == 2);
        CHECK(p[0].gain == Complex(std::sqrt(K / (K + 1.0)), 0.0));
        CHECK(p[0].delay == 0.0);
        CHECK(p[0].doppler == nu1);
        CHECK(p[1].delay == 33e-6);
        CHECK(p[1].doppler >= nu1 * std::cos(kPi) - 1e-9);
        CHECK(p[1].doppler <= nu1 * std::cos(kPi - omega) + 1e-9);
        CHECK(p[1].doppler < 0.0);
        p2 += std::norm(p[1].gain);
    }
    CHECK_THAT(K / (K + 1.0) + p2 / draws, WithinAbs(1.0, 0.005));
}

TEST_CASE("sample_uas_channel input checks and determinism") {
    UASConfig sc;
    sc.tau2_s = sc.grid.T();
    Rng rng(62);
    CHECK_THROWS_AS(sample_uas_channel(sc, rng), std::invalid_argument);
    UASConfig ok;
    ok.speed_mps = 120.0;
    Rng a(5), b(5);
    const PathSet pa = sample_uas_channel(ok, a), pb = sample_uas_channel(ok, b);
    CHECK(pa[1].gain == pb[1].gain);
    CHECK(pa[1].doppler == pb[1].doppler);
}

TEST_CASE("mean_and_stderr") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto r = mean_and_stderr(v);
    CHECK_THAT(r.mean, WithinAbs(2.5, 1e-15));
    CHECK_THAT(r.std_error, WithinAbs(std::sqrt(5.0 / 3.0 / 4.0), 1e-15));
    const std::vector<double> one{7.0};
    CHECK(mean_and_stderr(one).std_error == 0.0);
}

TEST_CASE("sweeps are reproducible and independent of the worker count") {
    SweepSettings s;
    s.trials = 6;
    s.seed = 9;
    s.threads = 1;
    const std::vector<double> speeds{0.0, 400.0};
    const auto a = sweep_speed(speeds, s);
    s.threads = 3;
    const auto b = sweep_speed(speeds, s);
    REQUIRE(a.points.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a.points[i].zak_exact.mean == b.points[i].zak_exact.mean);
        CHECK(a.points[i].two_step.mean == b.points[i].two_step.mean);
        CHECK(a.points[i].zak_approx.std_error == b.points[i].zak_approx.std_error);
    }
    CHECK(a.trials == 6);
    CHECK(a.seed == 9);
    CHECK(a.axis_name == "speed_mps");
}

TEST_CASE("structured and dense sweeps agree") {
    SweepSettings s;
    s.trials = 2;
    s.seed = 3;
    const std::vector<double> speeds{350.0};
    const auto a = sweep_speed(speeds, s);
    s.method = SEMethod::Dense;
    const auto b = sweep_speed(speeds, s);
    CHECK_THAT(a.points[0].zak_exact.mean - b.points[0].zak_exact.mean, WithinAbs(0.0, 1e-9));
    CHECK_THAT(a.points[0].zak_approx.mean - b.points[0].zak_approx.mean, WithinAbs(0.0, 1e-9));
    CHECK_THAT(a.points[0].two_step.mean - b.points[0].two_step.mean, WithinAbs(0.0, 1e-9));
}

TEST_CASE("sweep input checks") {
    SweepSettings s;
    s.trials = 0;
    const std::vector<double> speeds{0.0};
    CHECK_THROWS_AS(sweep_speed(speeds, s), std::invalid_argument);
    s.trials = 1;
    CHECK_THROWS_AS(sweep_rho(std::vector<double>{}, s), std::invalid_argument);
}

TEST_CASE("at zero speed both receivers give the same mean SE") {
    SweepSettings s;
    s.trials = 2000;
    s.seed = 1;
    const std::vector<double> speeds{0.0};
    const auto r = sweep_speed(speeds, s);
    CHECK(std::abs(r.points[0].zak_exact.mean - r.points[0].two_step.mean) < 0.05);
    CHECK(std::abs(r.points[0].zak_approx.mean - r.points[0].two_step.mean) < 0.05);
    CHECK(r.points[0].zak_exact.std_error > 0.0);
}

TEST_CASE("SE vanishes at very low rho") {
    SweepSettings s;
    s.trials = 20;
    s.scenario.speed_mps = 400.0;
    const std::vector<double> rhos{-20.0, 0.0};
    const auto r = sweep_rho(rhos, s);
    CHECK(r.axis_name == "rho_db");
    CHECK(r.points[0].zak_exact.mean < 0.02);
    CHECK(r.points[0].two_step.mean < 0.02);
    CHECK(r.points[0].zak_exact.mean < r.points[1].zak_exact.mean);
}
