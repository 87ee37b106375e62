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

// Structured spectral-efficiency route.
//
// Both effective channels are sums of terms  D_f C ⊗ B  where C is circulant
// in the Doppler index (the kernel depends on k' - k mod N), D_f is the
// diagonal phase e^{j 2 pi k' f / N} with f in {-1, 0}, and B acts on delay.
// A unitary DFT over the Doppler index (F ⊗ I_M) diagonalizes C and turns
// D_f into a cyclic shift by f, so the transformed channel
//
//   H' = (F ⊗ I) H (F^H ⊗ I)
//
// has nonzero M x M blocks only at (p, p) and (p, p+1 mod N). The normalized
// Zak noise covariance becomes I + e_0 e_0^T ⊗ I_M (whitening scales the p = 0
// row block by 1/sqrt(2)). log2|I + rho H'H'^H| is then a periodic block
// tridiagonal Cholesky, O(N M^3) instead of O((MN)^3). Results are identical
// to the dense route because every transform involved is unitary.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "otfs/capacity.hpp"
#include "otfs/channel.hpp"
#include "otfs/core_types.hpp"
#include "otfs/zak_kernels.hpp"

namespace otfs {

/// Channel in the Doppler-DFT domain: diagonal[p] sits at block (p, p),
/// upper[p] at block (p, p+1 mod N).
struct BlockCyclicChannel {
    GridConfig grid;
    ChannelKind kind;
    std::vector<CMatrix> diagonal;
    std::vector<CMatrix> upper;

    BlockCyclicChannel(const GridConfig& cfg, ChannelKind k)
        : grid(cfg),
          kind(k),
          diagonal(static_cast<std::size_t>(cfg.N()), CMatrix::Zero(cfg.M(), cfg.M())),
          upper(static_cast<std::size_t>(cfg.N()), CMatrix::Zero(cfg.M(), cfg.M())) {}

    CMatrix to_dense() const {
        const int M = grid.M();
        const int N = grid.N();
        const auto MN = static_cast<Eigen::Index>(grid.size());
        CMatrix H = CMatrix::Zero(MN, MN);
        for (int p = 0; p < N; ++p) {
            H.block(p * M, p * M, M, M) += diagonal[static_cast<std::size_t>(p)];
            H.block(p * M, ((p + 1) % N) * M, M, M) += upper[static_cast<std::size_t>(p)];
        }
        return H;
    }
};

namespace detail {
/// Eigenvalues of the circulant with first column c: sum_d c(d) e^{-j 2 pi p d / N}.
inline std::vector<Complex> circulant_spectrum(const std::vector<Complex>& c) {
    const auto N = static_cast<int>(c.size());
    std::vector<Complex> out(c.size());
    for (int p = 0; p < N; ++p) {
        Complex acc{};
        for (int d = 0; d < N; ++d) acc += c[static_cast<std::size_t>(d)] * cis2pi(-static_cast<double>(p) * d / N);
        out[static_cast<std::size_t>(p)] = acc;
    }
    return out;
}
}  // namespace detail

inline BlockCyclicChannel two_step_blocks(const PathSet& paths, const GridConfig& cfg) {
    paths.validate(cfg);
    const int M = cfg.M();
    const int N = cfg.N();
    BlockCyclicChannel out(cfg, ChannelKind::TwoStep);
    std::vector<Complex> a(static_cast<std::size_t>(N)), b(static_cast<std::size_t>(N));
    for (const auto& p : paths) {
        const double r = p.delay / cfg.T();
        const double u = p.doppler / cfg.delta_f();
        const Complex gamma = p.gain * cis2pi(-u * r);
        for (int d = 0; d < N; ++d) {
            const double dk = static_cast<double>(d) / N - u;
            a[static_cast<std::size_t>(d)] = detail::doppler_sum(N, N, dk);
            b[static_cast<std::size_t>(d)] = detail::doppler_sum(N - 1, N, dk);
        }
        const auto a_hat = detail::circulant_spectrum(a);
        const auto b_hat = detail::circulant_spectrum(b);
        const CMatrix H1 = detail::delay_kernel_matrix(true, r, u, M);
        const CMatrix H2 = detail::delay_kernel_matrix(false, r, u, M);
        // the tail term carries e^{j2pi(u - k'/N)} = e^{j2pi u} D_{-1}
        const Complex tail = gamma * cis2pi(u);
        for (int q = 0; q < N; ++q) {
            out.diagonal[static_cast<std::size_t>(q)] += gamma * a_hat[static_cast<std::size_t>(q)] * H1;
            out.upper[static_cast<std::size_t>(q)] += tail * b_hat[static_cast<std::size_t>((q + 1) % N)] * H2;
        }
    }
    return out;
}

inline BlockCyclicChannel zak_blocks(const PathSet& paths, const GridConfig& cfg) {
    paths.validate(cfg);
    const int M = cfg.M();
    const int N = cfg.N();
    BlockCyclicChannel out(cfg, ChannelKind::Zak);
    std::vector<Complex> c(static_cast<std::size_t>(N));
    for (const auto& p : paths) {
        const double r = p.delay / cfg.T();
        const double u = p.doppler / cfg.delta_f();
        for (int d = 0; d < N; ++d) c[static_cast<std::size_t>(d)] = w1(d * cfg.delta_f() / N - p.doppler, cfg);
        const auto c_hat = detail::circulant_spectrum(c);
        for (int lp = 0; lp < M; ++lp) {
            const double lm = static_cast<double>(lp) / M;
            const double f = snapped_floor(lm - r);  // -1 or 0
            const Complex alpha = p.gain * cis2pi(u * (lm - r)) * cis2pi(-u * f);
            for (int l = 0; l < M; ++l) {
                const Complex row = alpha * w2((lp - l) * cfg.T() / M - p.delay, cfg);
                for (int q = 0; q < N; ++q) {
                    if (f == 0.0)
                        out.diagonal[static_cast<std::size_t>(q)](lp, l) += row * c_hat[static_cast<std::size_t>(q)];
                    else
                        out.upper[static_cast<std::size_t>(q)](lp, l) += row * c_hat[static_cast<std::size_t>((q + 1) % N)];
                }
            }
        }
    }
    return out;
}

/// K'^{-1/2} H' for the Zak DD noise: scales the p = 0 row block by 1/sqrt(2).
inline BlockCyclicChannel whiten_zak_noise(BlockCyclicChannel H) {
    if (H.kind != ChannelKind::Zak) throw std::invalid_argument("whiten_zak_noise: requires a Zak channel");
    const double s = 1.0 / std::sqrt(2.0);
    H.diagonal[0] *= s;
    H.upper[0] *= s;
    return H;
}

/// Blocks of G = H' H'^H, cached so many rho values can be evaluated.
class StructuredGram {
  public:
    explicit StructuredGram(const BlockCyclicChannel& H) : grid_(H.grid) {
        const int N = grid_.N();
        if (N <= 2) {
            const CMatrix D = H.to_dense();
            small_ = D * D.adjoint();
            return;
        }
        diag_.resize(static_cast<std::size_t>(N));
        off_.resize(static_cast<std::size_t>(N));
        for (int p = 0; p < N; ++p) {
            const auto& Dp = H.diagonal[static_cast<std::size_t>(p)];
            const auto& Up = H.upper[static_cast<std::size_t>(p)];
            diag_[static_cast<std::size_t>(p)] = Dp * Dp.adjoint() + Up * Up.adjoint();
            off_[static_cast<std::size_t>(p)] = Up * H.diagonal[static_cast<std::size_t>((p + 1) % N)].adjoint();
        }
    }

    /// log2 |I + rho G|
    double log2det_identity_plus(double rho) const {
        const int N = grid_.N();
        const int M = grid_.M();
        if (N <= 2) {
            const CMatrix A = CMatrix::Identity(small_.rows(), small_.cols()) + rho * small_;
            return logdet_hpd(0.5 * (A + A.adjoint()), LogDetMethod::Cholesky);
        }
        const CMatrix I = CMatrix::Identity(M, M);
        double acc = 0.0;
        auto factor = [&](const CMatrix& S) {
            Eigen::LLT<CMatrix> llt(S);
            if (llt.info() != Eigen::Success) throw std::domain_error("StructuredGram: block Cholesky failed");
            const CMatrix& L = llt.matrixLLT();
            for (int i = 0; i < M; ++i) acc += 2.0 * std::log2(L(i, i).real());
            return llt;
        };
        // A[p,p] = I + rho G_p, A[p+1,p] = rho off_p^H, A[N-1,0] = rho off_{N-1}.
        // L is block bidiagonal except for a dense last block row.
        CMatrix sub;      // L[p, p-1]
        CMatrix row_prev; // L[N-1, p-1]
        CMatrix last = I + rho * diag_[static_cast<std::size_t>(N - 1)];
        for (int p = 0; p <= N - 2; ++p) {
            CMatrix S = I + rho * diag_[static_cast<std::size_t>(p)];
            if (p > 0) S.noalias() -= sub * sub.adjoint();
            const auto llt = factor(S);

            CMatrix target = CMatrix::Zero(M, M);
            if (p == 0) target += rho * off_[static_cast<std::size_t>(N - 1)];
            if (p == N - 2) target += rho * off_[static_cast<std::size_t>(N - 2)].adjoint();
            if (p > 0) target.noalias() -= row_prev * sub.adjoint();
            CMatrix row = llt.matrixL().solve(target.adjoint()).adjoint();
            last.noalias() -= row * row.adjoint();

            if (p < N - 2) sub = llt.matrixL().solve((rho * off_[static_cast<std::size_t>(p)]).eval()).adjoint();
            row_prev = std::move(row);
        }
        factor(0.5 * (last + last.adjoint()));
        return acc;
    }

    const GridConfig& grid() const { return grid_; }

  private:
    GridConfig grid_;
    std::vector<CMatrix> diag_;
    std::vector<CMatrix> off_;
    CMatrix small_;
};

/// The three receiver Gram structures for one path set.
struct ReceiverGrams {
    StructuredGram two_step;
    StructuredGram zak;
    StructuredGram zak_whitened;

    static ReceiverGrams build(const PathSet& paths, const GridConfig& cfg) {
        const auto zb = zak_blocks(paths, cfg);
        return {StructuredGram(two_step_blocks(paths, cfg)), StructuredGram(zb), StructuredGram(whiten_zak_noise(zb))};
    }

    SEResult se(SEKind kind, double rho) const {
        detail::check_rho(rho);
        const double n = static_cast<double>(two_step.grid().size());
        switch (kind) {
            case SEKind::TwoStep: return {two_step.log2det_identity_plus(rho) / n, kind};
            case SEKind::ZakApprox: return {zak.log2det_identity_plus(rho) / n, kind};
            case SEKind::ZakExact: return {zak_whitened.log2det_identity_plus(rho) / n, kind};
            case SEKind::AnalyticClosedForm: break;
        }
        throw std::invalid_argument("ReceiverGrams::se: unsupported kind");
    }
};

}  // namespace otfs
