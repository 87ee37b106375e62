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

// Sample-level receiver front ends.
//
// Two-step: Wigner transform (matched filter per TF grid point) then SFFT.
// Zak:      sampled Zak transform of the receive buffer, no OFDM demodulator.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <vector>

#include "otfs/channel.hpp"
#include "otfs/core_types.hpp"
#include "otfs/dft.hpp"
#include "otfs/modulator.hpp"
#include "otfs/zak_kernels.hpp"

namespace otfs {

/// Anything evaluable at a time instant in seconds.
template <typename S>
concept TimeSignal = requires(const S& s, double t) {
    { s(t) } -> std::convertible_to<Complex>;
};

/// Signals that also report where they may be discontinuous.
template <typename S>
concept PiecewiseTimeSignal = TimeSignal<S> && requires(const S& s) {
    { s.breakpoints() } -> std::convertible_to<std::vector<double>>;
};

/// Y[n,m] ~= int g(t - nT) y(t) e^{-j 2 pi m delta_f t} dt by the composite
/// midpoint rule with Q*M cells per symbol:
///
///   (T/(QM)) (1/sqrt(T)) sum_p y(nT + (p+1/2) T/(QM)) e^{-j 2 pi m (p+1/2)/(QM)}
///
/// evaluated with one QM-point DFT per symbol. For piecewise signals, any cell
/// containing a breakpoint is re-integrated as separate midpoint pieces so the
/// rule keeps its second-order accuracy across the jumps of the delayed copies.
template <TimeSignal Signal>
TFGrid wigner(const Signal& y, const GridConfig& cfg, int Q, OpCounter* ops = nullptr) {
    if (Q < 1) throw std::invalid_argument("wigner: oversampling factor must be >= 1");
    const int M = cfg.M();
    const int N = cfg.N();
    const int P = Q * M;
    const double T = cfg.T();
    const double h = T / P;
    const double weight = h / std::sqrt(T);

    std::vector<double> breaks;
    if constexpr (PiecewiseTimeSignal<Signal>) breaks = y.breakpoints();

    TFGrid Y(cfg);
    std::vector<Complex> f(static_cast<std::size_t>(P));
    for (int n = 0; n < N; ++n) {
        const double t0 = n * T;
        for (int p = 0; p < P; ++p) f[static_cast<std::size_t>(p)] = y(t0 + (p + 0.5) * h);
        const auto F = dft::forward(f);
        for (int m = 0; m < M; ++m) Y(n, m) = weight * F[static_cast<std::size_t>(m)] * cis2pi(-0.5 * m / P);

        // cells cut by breakpoints
        auto lo = std::upper_bound(breaks.begin(), breaks.end(), t0);
        auto hi = std::lower_bound(breaks.begin(), breaks.end(), t0 + T);
        for (auto it = lo; it != hi;) {
            const double local = (*it - t0) / h;
            const int cell = std::clamp(static_cast<int>(std::floor(local)), 0, P - 1);
            const double a = t0 + cell * h;
            const double b = a + h;
            std::vector<double> cuts{a};
            do {
                if (*it - a > 1e-12 * T && b - *it > 1e-12 * T && *it > cuts.back()) cuts.push_back(*it);
                ++it;
            } while (it != hi && *it < b);
            cuts.push_back(b);
            if (cuts.size() == 2) continue;

            const double mid = a + 0.5 * h;
            const Complex fmid = f[static_cast<std::size_t>(cell)];
            for (int m = 0; m < M; ++m) {
                Complex corr = -h * fmid * cis2pi(-m * (mid - t0) / T);
                for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                    const double w = cuts[c + 1] - cuts[c];
                    const double tm = 0.5 * (cuts[c] + cuts[c + 1]);
                    corr += w * y(tm) * cis2pi(-m * (tm - t0) / T);
                }
                Y(n, m) += corr / std::sqrt(T);
            }
        }
    }
    if (ops) ops->add(static_cast<std::uint64_t>(N) * dft::transform_cost(static_cast<std::uint64_t>(P)));
    return Y;
}

/// x_hat = SFFT(Wigner(y)).
template <TimeSignal Signal>
DDGrid two_step_receive(const Signal& y, const GridConfig& cfg, int Q, OpCounter* ops = nullptr) {
    return sfft(wigner(y, cfg, Q, ops), cfg, ops);
}

/// Zak receiver front end on the M(N+1)-sample receive buffer.
inline DDGrid zak_receive(const TimeSamples& y, const GridConfig& cfg, OpCounter* ops = nullptr) {
    return discrete_zak(y, cfg, ops);
}

}  // namespace otfs
