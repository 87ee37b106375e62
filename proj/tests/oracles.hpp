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

// Test-only reference implementations. Nothing here calls into the code paths
// it is used to check (no FFTs, no separable builders, no block route).

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;

inline Complex cis(double turns) {
    const double a = 2.0 * M_PI * turns;
    return {std::cos(a), std::sin(a)};
}

/// O(n^2) DFT: out[k] = sum_n in[n] e^{sign j 2 pi k n / L}
inline std::vector<Complex> naive_dft(const std::vector<Complex>& in, int sign) {
    const auto L = static_cast<int>(in.size());
    std::vector<Complex> out(in.size());
    for (int k = 0; k < L; ++k) {
        Complex acc{};
        for (int n = 0; n < L; ++n) acc += in[static_cast<std::size_t>(n)] * cis(sign * static_cast<double>(k) * n / L);
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

/// ISFFT by the quadruple sum.
inline std::vector<Complex> isfft_direct(const Eigen::VectorXcd& x, int M, int N) {
    std::vector<Complex> X(static_cast<std::size_t>(M * N));
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            Complex acc{};
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < M; ++l)
                    acc += x(k * M + l) * cis(-(static_cast<double>(m) * l / M - static_cast<double>(n) * k / N));
            X[static_cast<std::size_t>(n * M + m)] = acc / static_cast<double>(M * N);
        }
    return X;
}

/// Zak transform by its defining sum, sqrt(T) sum_k x(tau + kT) e^{-j 2 pi k nu T},
/// for a signal supported on [t_lo, t_hi).
inline Complex zak_sum(const std::function<Complex(double)>& x, double tau, double nu, double T, double t_lo, double t_hi) {
    const int k_lo = static_cast<int>(std::floor((t_lo - tau) / T)) - 1;
    const int k_hi = static_cast<int>(std::ceil((t_hi - tau) / T)) + 1;
    Complex acc{};
    for (int k = k_lo; k <= k_hi; ++k) {
        const double t = tau + k * T;
        if (t < t_lo || t >= t_hi) continue;
        acc += x(t) * cis(-k * nu * T);
    }
    return std::sqrt(T) * acc;
}

/// Unitary DFT over the Doppler index applied on both sides:
/// (F ⊗ I_M) H (F^H ⊗ I_M), F[p,k] = e^{-j 2 pi p k / N} / sqrt(N).
inline Eigen::MatrixXcd doppler_domain(const Eigen::MatrixXcd& H, int M, int N) {
    Eigen::MatrixXcd F(N, N);
    for (int p = 0; p < N; ++p)
        for (int k = 0; k < N; ++k) F(p, k) = cis(-static_cast<double>(p) * k / N) / std::sqrt(static_cast<double>(N));
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(M * N, M * N);
    for (int p = 0; p < N; ++p)
        for (int k = 0; k < N; ++k) big.block(p * M, k * M, M, M) = F(p, k) * Eigen::MatrixXcd::Identity(M, M);
    return big * H * big.adjoint();
}

inline double rel_error(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
    return (got - want).norm() / want.norm();
}

}  // namespace oracle
