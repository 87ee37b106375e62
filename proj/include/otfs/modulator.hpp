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

// OTFS transmitter: ISFFT, Heisenberg transform with the rectangular pulse
// g(t) = 1/sqrt(T) on [0, T), and the SFFT used by the two-step receiver.
// No cyclic prefix.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "otfs/core_types.hpp"
#include "otfs/dft.hpp"

namespace otfs {

/// X[n,m] = (1/MN) sum_{k,l} x[k,l] e^{-j 2 pi (ml/M - nk/N)}
inline TFGrid isfft(const DDGrid& x, const GridConfig& cfg) {
    if (!(x.config() == cfg)) throw std::invalid_argument("isfft: grid does not match configuration");
    const int M = cfg.M();
    const int N = cfg.N();

    // forward DFT along delay (l -> m) for each Doppler row k
    std::vector<Complex> tmp(cfg.size());
    std::vector<Complex> row(static_cast<std::size_t>(M));
    for (int k = 0; k < N; ++k) {
        for (int l = 0; l < M; ++l) row[static_cast<std::size_t>(l)] = x(k, l);
        const auto r = dft::forward(row);
        for (int m = 0; m < M; ++m) tmp[static_cast<std::size_t>(k * M + m)] = r[static_cast<std::size_t>(m)];
    }
    // inverse DFT along Doppler (k -> n) for each subcarrier m
    TFGrid X(cfg);
    const double scale = 1.0 / static_cast<double>(cfg.size());
    std::vector<Complex> col(static_cast<std::size_t>(N));
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < N; ++k) col[static_cast<std::size_t>(k)] = tmp[static_cast<std::size_t>(k * M + m)];
        const auto c = dft::inverse_unscaled(col);
        for (int n = 0; n < N; ++n) X(n, m) = scale * c[static_cast<std::size_t>(n)];
    }
    return X;
}

/// x[k',l'] = sum_{m,n} Y[n,m] e^{j 2 pi (ml'/M - nk'/N)}; carries no scale factor.
inline DDGrid sfft(const TFGrid& Y, const GridConfig& cfg, OpCounter* ops = nullptr) {
    if (!(Y.config() == cfg)) throw std::invalid_argument("sfft: grid does not match configuration");
    const int M = cfg.M();
    const int N = cfg.N();

    std::vector<Complex> tmp(cfg.size());
    std::vector<Complex> row(static_cast<std::size_t>(M));
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) row[static_cast<std::size_t>(m)] = Y(n, m);
        const auto r = dft::inverse_unscaled(row);
        for (int l = 0; l < M; ++l) tmp[static_cast<std::size_t>(n * M + l)] = r[static_cast<std::size_t>(l)];
    }
    DDGrid x(cfg);
    std::vector<Complex> col(static_cast<std::size_t>(N));
    for (int l = 0; l < M; ++l) {
        for (int n = 0; n < N; ++n) col[static_cast<std::size_t>(n)] = tmp[static_cast<std::size_t>(n * M + l)];
        const auto c = dft::forward(col);
        for (int k = 0; k < N; ++k) x(k, l) = c[static_cast<std::size_t>(k)];
    }
    if (ops) {
        ops->add(static_cast<std::uint64_t>(N) * dft::transform_cost(static_cast<std::uint64_t>(M)));
        ops->add(static_cast<std::uint64_t>(M) * dft::transform_cost(static_cast<std::uint64_t>(N)));
    }
    return x;
}

/// Transmit samples at t = nT + pT/M, n < N, p < M. Only symbol n is active
/// at those instants because g is supported on [0, T).
inline TimeSamples heisenberg_samples(const TFGrid& X, const GridConfig& cfg) {
    if (!(X.config() == cfg)) throw std::invalid_argument("heisenberg_samples: grid does not match configuration");
    const int M = cfg.M();
    const int N = cfg.N();
    const double g = 1.0 / std::sqrt(cfg.T());

    TimeSamples out;
    out.sample_period = cfg.sample_period();
    out.samples.resize(cfg.size());
    std::vector<Complex> row(static_cast<std::size_t>(M));
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) row[static_cast<std::size_t>(m)] = X(n, m);
        const auto s = dft::inverse_unscaled(row);
        for (int p = 0; p < M; ++p) out.samples[static_cast<std::size_t>(n * M + p)] = g * s[static_cast<std::size_t>(p)];
    }
    return out;
}

namespace detail {
/// x(t) with t given in units of T.
inline Complex eval_x_normalized(const TFGrid& X, double s, const GridConfig& cfg) {
    if (s < 0.0) return {};
    const double f = snapped_floor(s);
    if (f >= cfg.N()) return {};
    const int n = static_cast<int>(f);
    const double frac = s - f;
    Complex acc{};
    for (int m = 0; m < cfg.M(); ++m) acc += X(n, m) * cis2pi(m * frac);
    return acc / std::sqrt(cfg.T());
}
}  // namespace detail

/// Exact x(t) for arbitrary t (zero outside [0, NT)).
inline Complex eval_x_continuous(const TFGrid& X, double t, const GridConfig& cfg) {
    return detail::eval_x_normalized(X, t / cfg.T(), cfg);
}

}  // namespace otfs
