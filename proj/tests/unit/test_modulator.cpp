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
#include "otfs/modulator.hpp"
#include "otfs/random.hpp"

using namespace otfs;
using Catch::Matchers::WithinAbs;

namespace {
const GridConfig kUas(15, 46, 2000.0);

double max_abs_diff(const TFGrid& a, const TFGrid& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}
}  // namespace

TEST_CASE("isfft of a scaled delta is flat") {
    DDGrid x(kUas);
    x(0, 0) = static_cast<double>(kUas.size());
    const TFGrid X = isfft(x, kUas);
    for (const auto& v : X.values()) CHECK_THAT(std::abs(v - 1.0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("isfft of all ones is a delta at the origin") {
    DDGrid x(kUas, CVector::Ones(static_cast<Eigen::Index>(kUas.size())));
    const TFGrid X = isfft(x, kUas);
    for (int n = 0; n < kUas.N(); ++n)
        for (int m = 0; m < kUas.M(); ++m) CHECK_THAT(std::abs(X(n, m) - (n == 0 && m == 0 ? 1.0 : 0.0)), WithinAbs(0.0, 1e-13));
}

TEST_CASE("isfft matches the quadruple sum") {
    for (auto [M, N] : {std::pair{15, 46}, std::pair{4, 4}, std::pair{7, 3}}) {
        const GridConfig cfg(M, N, 1000.0);
        Rng rng(static_cast<std::uint64_t>(M * N));
        const DDGrid x = random_symbols(cfg, rng);
        const TFGrid X = isfft(x, cfg);
        const auto want = oracle::isfft_direct(x.vec(), M, N);
        double d = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) d = std::max(d, std::abs(X.values()[i] - want[i]));
        CHECK(d < 1e-14);
    }
}

TEST_CASE("sfft of a delta is all ones") {
    TFGrid Y(kUas);
    Y(0, 0) = 1.0;
    const DDGrid x = sfft(Y, kUas);
    for (Eigen::Index i = 0; i < x.vec().size(); ++i) CHECK_THAT(std::abs(x.vec()(i) - 1.0), WithinAbs(0.0, 1e-13));
}

TEST_CASE("sfft inverts isfft") {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const DDGrid x = random_symbols(kUas, rng);
        const DDGrid back = sfft(isfft(x, kUas), kUas);
        CHECK((back.vec() - x.vec()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("sfft energy relation for unnormalized transforms") {
    Rng rng(12);
    TFGrid Y(kUas);
    double ey = 0.0;
    for (auto& v : Y.values()) {
        v = rng.complex_normal();
        ey += std::norm(v);
    }
    const DDGrid x = sfft(Y, kUas);
    CHECK_THAT(x.vec().squaredNorm() / (static_cast<double>(kUas.size()) * ey), WithinAbs(1.0, 1e-12));
}

TEST_CASE("transforms reject grids of another configuration") {
    const GridConfig other(4, 4, 2000.0);
    CHECK_THROWS_AS(isfft(DDGrid(other), kUas), std::invalid_argument);
    CHECK_THROWS_AS(sfft(TFGrid(other), kUas), std::invalid_argument);
    CHECK_THROWS_AS(heisenberg_samples(TFGrid(other), kUas), std::invalid_argument);
}

TEST_CASE("heisenberg_samples examples") {
    const TimeSamples zero = heisenberg_samples(TFGrid(kUas), kUas);
    CHECK(zero.length() == kUas.size());
    for (const auto& s : zero.samples) CHECK(s == Complex{});

    TFGrid X(kUas);
    for (int n = 0; n < kUas.N(); ++n) X(n, 0) = 1.0;
    const TimeSamples dc = heisenberg_samples(X, kUas);
    const double want = 1.0 / std::sqrt(kUas.T());
    for (const auto& s : dc.samples) CHECK_THAT(std::abs(s - want), WithinAbs(0.0, 1e-12 * want));
    CHECK(dc.sample_period == kUas.sample_period());
}

TEST_CASE("transmit energy equals the symbol energy on average") {
    Rng rng(13);
    const double E = 2.5;
    const int frames = 2000;
    double acc = 0.0;
    for (int f = 0; f < frames; ++f) {
        const TimeSamples s = heisenberg_samples(isfft(random_symbols(kUas, rng, E), kUas), kUas);
        double e = 0.0;
        for (const auto& v : s.samples) e += std::norm(v);
        acc += kUas.sample_period() * e;
    }
    CHECK_THAT(acc / frames / E, WithinAbs(1.0, 0.03));
}

TEST_CASE("each DD basis pulse carries energy 1/(MN)") {
    for (auto [M, N] : {std::pair{15, 46}, std::pair{4, 6}}) {
        const GridConfig cfg(M, N, 2000.0);
        for (int k = 0; k < N; k += 3)
            for (int l = 0; l < M; l += 2) {
                DDGrid x(cfg);
                x(k, l) = 1.0;
                const TimeSamples s = heisenberg_samples(isfft(x, cfg), cfg);
                double e = 0.0;
                for (const auto& v : s.samples) e += std::norm(v);
                CHECK_THAT(cfg.sample_period() * e * static_cast<double>(cfg.size()), WithinAbs(1.0, 1e-12));
            }
    }
}

TEST_CASE("eval_x_continuous agrees with the sampled signal and is time limited") {
    Rng rng(14);
    const TFGrid X = isfft(random_symbols(kUas, rng), kUas);
    const TimeSamples s = heisenberg_samples(X, kUas);
    const double scale = 1.0 / std::sqrt(kUas.T());  // sample magnitudes are O(1/sqrt(T))
    for (std::size_t i = 0; i < s.length(); ++i)
        CHECK_THAT(std::abs(eval_x_continuous(X, s.time_of(i), kUas) - s.samples[i]), WithinAbs(0.0, 1e-12 * scale));
    CHECK(eval_x_continuous(X, -1e-9, kUas) == Complex{});
    CHECK(eval_x_continuous(X, kUas.frame_duration(), kUas) == Complex{});

    // just before the frame end the last symbol's exponential sum still applies
    const double t = kUas.frame_duration() - 1e-9;
    Complex want{};
    for (int m = 0; m < kUas.M(); ++m) want += X(kUas.N() - 1, m) * oracle::cis(m * kUas.delta_f() * (t - (kUas.N() - 1) * kUas.T()));
    want /= std::sqrt(kUas.T());
    CHECK(std::isfinite(std::abs(eval_x_continuous(X, t, kUas))));
    CHECK_THAT(std::abs(eval_x_continuous(X, t, kUas) - want), WithinAbs(0.0, 1e-9));
}

TEST_CASE("modulator transforms are linear") {
    Rng rng(15);
    const DDGrid a = random_symbols(kUas, rng);
    const DDGrid b = random_symbols(kUas, rng);
    const Complex alpha(0.3, -1.1), beta(-2.0, 0.4);
    const DDGrid c(kUas, alpha * a.vec() + beta * b.vec());
    const TFGrid Xa = isfft(a, kUas), Xb = isfft(b, kUas), Xc = isfft(c, kUas);
    TFGrid mix(kUas);
    for (std::size_t i = 0; i < mix.values().size(); ++i) mix.values()[i] = alpha * Xa.values()[i] + beta * Xb.values()[i];
    CHECK(max_abs_diff(Xc, mix) < 1e-14);

    const TimeSamples sa = heisenberg_samples(Xa, kUas), sb = heisenberg_samples(Xb, kUas), sc = heisenberg_samples(Xc, kUas);
    for (std::size_t i = 0; i < sc.length(); ++i)
        CHECK_THAT(std::abs(sc.samples[i] - alpha * sa.samples[i] - beta * sb.samples[i]), WithinAbs(0.0, 1e-11));

    const DDGrid ya = sfft(Xa, kUas), yb = sfft(Xb, kUas), yc = sfft(Xc, kUas);
    CHECK((yc.vec() - alpha * ya.vec() - beta * yb.vec()).cwiseAbs().maxCoeff() < 1e-12);
}
