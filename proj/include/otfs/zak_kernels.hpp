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

// Closed-form Zak-domain kernels for the rectangular transmit pulse and the
// sampled Zak transform used by the Zak receiver.
//
//   Z_g(tau, nu)    = e^{j 2 pi nu floor(tau/T) T}
//   w1(nu)          = (1/N) sum_{n<N} e^{-j 2 pi n nu T}
//   w2(tau)         = (1/M) sum_{m<M} e^{+j 2 pi m delta_f tau}
//   Phi_{k,l}       = e^{j 2 pi (nu/delta_f) floor(tau/T)} w1(nu - k delta_f/N) w2(tau - l T/M)

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "otfs/core_types.hpp"
#include "otfs/dft.hpp"

namespace otfs {

struct DDPoint {
    double tau;  // seconds
    double nu;   // Hz
};

/// Below this |sin(pi x)| the Dirichlet ratio is replaced by its finite sum.
inline constexpr double kDirichletSingularity = 1e-6;

/// (1/K) sum_{n=0}^{K-1} e^{j 2 pi n x}, evaluated term by term.
inline Complex dirichlet_sum(int K, double x) {
    Complex acc{};
    for (int n = 0; n < K; ++n) acc += cis2pi(n * x);
    return acc / static_cast<double>(K);
}

/// Same kernel in closed form e^{j pi (K-1) x} sin(pi K x) / (K sin(pi x)).
/// The sines are evaluated on x - round(x) so precision holds near the integers.
inline Complex dirichlet_kernel(int K, double x) {
    const double p = std::round(x);
    const double r = x - p;
    const double den = std::sin(kPi * r);
    if (std::abs(den) < kDirichletSingularity) return dirichlet_sum(K, x);
    const double num = std::sin(kPi * K * r);
    // sin(pi K x) / sin(pi x) = (-1)^{(K-1) p} sin(pi K r) / sin(pi r)
    const bool odd = (static_cast<long long>(std::abs(p)) % 2 == 1) && ((K - 1) % 2 == 1);
    const double ratio = (odd ? -1.0 : 1.0) * num / (K * den);
    return ratio * cis2pi(0.5 * (K - 1) * x);
}

/// Zak transform of the rectangular pulse, defined on all of R^2.
inline Complex zak_rect(const DDPoint& point, const GridConfig& cfg) {
    const double f = snapped_floor(point.tau / cfg.T());
    return cis2pi(point.nu / cfg.delta_f() * f);
}

inline Complex w1(double nu, const GridConfig& cfg) { return dirichlet_kernel(cfg.N(), -nu / cfg.delta_f()); }

inline Complex w2(double tau, const GridConfig& cfg) { return dirichlet_kernel(cfg.M(), tau / cfg.T()); }

/// DD basis function Phi_{k,l}(tau, nu).
inline Complex basis_phi(int k, int l, const DDPoint& point, const GridConfig& cfg) {
    if (k < 0 || k >= cfg.N() || l < 0 || l >= cfg.M()) throw std::out_of_range("basis_phi: (k, l) outside the grid");
    const double f = snapped_floor(point.tau / cfg.T());
    return cis2pi(point.nu / cfg.delta_f() * f) * w1(point.nu - k * cfg.delta_f() / cfg.N(), cfg) *
           w2(point.tau - l * cfg.T() / cfg.M(), cfg);
}

/// Sampled Zak transform of a received buffer covering t = 0 .. (N+1)T:
///   Y[k', l'] = sqrt(T) sum_{n=0}^{N} y(nT + l'T/M) e^{-j 2 pi n k'/N}
/// One N-point DFT per delay bin plus the n = N tail term (e^{-j 2 pi N k'/N} = 1).
inline DDGrid discrete_zak(const TimeSamples& y, const GridConfig& cfg, OpCounter* ops = nullptr) {
    const int M = cfg.M();
    const int N = cfg.N();
    if (y.length() != static_cast<std::size_t>(M) * static_cast<std::size_t>(N + 1))
        throw std::invalid_argument("discrete_zak: buffer must hold M(N+1) samples");
    if (y.start_index != 0) throw std::invalid_argument("discrete_zak: buffer must start at t = 0");

    const double sqrtT = std::sqrt(cfg.T());
    DDGrid out(cfg);
    std::vector<Complex> column(static_cast<std::size_t>(N));
    for (int l = 0; l < M; ++l) {
        for (int n = 0; n < N; ++n) column[static_cast<std::size_t>(n)] = y.samples[static_cast<std::size_t>(n * M + l)];
        const auto spectrum = dft::forward(column);
        const Complex tail = y.samples[static_cast<std::size_t>(N * M + l)];
        for (int k = 0; k < N; ++k) out(k, l) = sqrtT * (spectrum[static_cast<std::size_t>(k)] + tail);
    }
    if (ops) {
        ops->add(static_cast<std::uint64_t>(M) * dft::transform_cost(static_cast<std::uint64_t>(N)));
        ops->add(static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(N));
    }
    return out;
}

}  // namespace otfs
