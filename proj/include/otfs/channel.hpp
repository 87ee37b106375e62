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

// Doubly-dispersive L-path channel
//
//   y(t) = sum_i h_i x(t - tau_i) e^{j 2 pi nu_i (t - tau_i)} + n(t)
//
// applied exactly in continuous time, and the two analytic effective DD
// channel matrices seen by the two-step (Wigner + SFFT) receiver and by the
// Zak receiver. Internally delays are handled as r = tau/T and Dopplers as
// u = nu/delta_f, so every phase is e^{j 2 pi (dimensionless)}.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "otfs/core_types.hpp"
#include "otfs/modulator.hpp"
#include "otfs/random.hpp"
#include "otfs/zak_kernels.hpp"

namespace otfs {

/// sin(pi x) / (pi x), 1 at the origin.
inline double sinc(double x) {
    const double a = kPi * x;
    if (std::abs(a) < 1e-8) return 1.0 - a * a / 6.0;
    return std::sin(a) / a;
}

/// Noise-free received signal as a continuous-time evaluator. Jumps can only
/// occur at nT + tau_i (symbol edges of the delayed copies); those instants
/// are reported by breakpoints() so quadrature can split cells there.
class ReceivedSignal {
  public:
    ReceivedSignal(TFGrid X, PathSet paths, const GridConfig& cfg) : X_(std::move(X)), paths_(std::move(paths)), cfg_(cfg) {
        paths_.validate(cfg_);
    }

    Complex operator()(double t) const { return at_normalized(t / cfg_.T()); }

    /// y at t = s * T.
    Complex at_normalized(double s) const {
        Complex acc{};
        for (const auto& p : paths_) {
            const double r = p.delay / cfg_.T();
            const double u = p.doppler / cfg_.delta_f();
            acc += p.gain * detail::eval_x_normalized(X_, s - r, cfg_) * cis2pi(u * (s - r));
        }
        return acc;
    }

    std::vector<double> breakpoints() const {
        std::vector<double> out;
        for (const auto& p : paths_)
            for (int n = 0; n <= cfg_.N(); ++n) out.push_back(n * cfg_.T() + p.delay);
        std::sort(out.begin(), out.end());
        return out;
    }

    const GridConfig& config() const { return cfg_; }

  private:
    TFGrid X_;
    PathSet paths_;
    GridConfig cfg_;
};

/// Noise-free receive buffer at t = i T/M, i = 0 .. M(N+1)-1.
inline TimeSamples apply_channel_exact(const TFGrid& X, const PathSet& paths, const GridConfig& cfg) {
    const ReceivedSignal y(X, paths, cfg);
    const int M = cfg.M();
    TimeSamples out;
    out.sample_period = cfg.sample_period();
    out.samples.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(cfg.N() + 1));
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = y.at_normalized(static_cast<double>(i) / M);
    return out;
}

/// Adds i.i.d. CN(0, M delta_f N0) to each sample (noise band-limited to M delta_f).
inline TimeSamples add_noise(TimeSamples y, double N0, const GridConfig& cfg, Rng& rng) {
    if (N0 < 0.0) throw std::invalid_argument("add_noise: N0 must be nonnegative");
    if (N0 == 0.0) return y;
    const double variance = cfg.bandwidth() * N0;
    for (auto& s : y.samples) s += rng.complex_normal(variance);
    return y;
}

// ---------------------------------------------------------------------------
// Two-step receiver channel
// ---------------------------------------------------------------------------

namespace detail {

inline void check_indices(int kp, int lp, int k, int l, const GridConfig& cfg) {
    if (kp < 0 || kp >= cfg.N() || k < 0 || k >= cfg.N() || lp < 0 || lp >= cfg.M() || l < 0 || l >= cfg.M())
        throw std::out_of_range("channel entry: index outside the grid");
}

/// (1/N) sum_{n=0}^{count-1} e^{-j 2 pi n x}
inline Complex doppler_sum(int count, int N, double x) {
    Complex acc{};
    for (int n = 0; n < count; ++n) acc += cis2pi(-n * x);
    return acc / static_cast<double>(N);
}

/// Kernel of h_{i,1} (first == true) or h_{i,2} at m' - m = d.
inline Complex delay_kernel(bool first, double r, double u, int d) {
    const double arg = u - d;
    if (first) return cis2pi(0.5 * (1.0 + r) * arg) * sinc((1.0 - r) * arg);
    return cis2pi(0.5 * r * arg) * sinc(r * arg);
}

/// M x M delay kernel h_{i,1}[l', l] or h_{i,2}[l', l], factorized as
/// (w/M) E K G with E[l',m'] = e^{j2pi m'l'/M}, K[m',m] = kernel(m'-m),
/// G[m,l] = e^{-j 2 pi m (l/M + r)}. O(M^3) instead of O(M^4).
inline CMatrix delay_kernel_matrix(bool first, double r, double u, int M) {
    CMatrix E(M, M), K(M, M), G(M, M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            E(a, b) = cis2pi(static_cast<double>(a) * b / M);
            K(a, b) = delay_kernel(first, r, u, a - b);
            G(a, b) = cis2pi(-a * (static_cast<double>(b) / M + r));
        }
    const double weight = first ? (1.0 - r) : r;
    return (weight / M) * (E * K * G);
}

}  // namespace detail

/// h_hat[k', l', k, l] evaluated term by term; O(L M^2) per entry.
inline Complex two_step_entry(int kp, int lp, int k, int l, const PathSet& paths, const GridConfig& cfg) {
    detail::check_indices(kp, lp, k, l, cfg);
    const int M = cfg.M();
    const int N = cfg.N();
    Complex total{};
    for (const auto& p : paths) {
        const double r = p.delay / cfg.T();
        const double u = p.doppler / cfg.delta_f();
        const double dk = static_cast<double>(kp - k) / N - u;
        const Complex a = detail::doppler_sum(N, N, dk);
        const Complex b = detail::doppler_sum(N - 1, N, dk);

        Complex h1{}, h2{};
        for (int m = 0; m < M; ++m) {
            for (int mp = 0; mp < M; ++mp) {
                const Complex base = cis2pi(static_cast<double>(mp) * lp / M - static_cast<double>(m) * l / M - m * r);
                const double arg = u - (mp - m);
                h1 += base * cis2pi(0.5 * (1.0 + r) * arg) * sinc((1.0 - r) * arg);
                h2 += base * cis2pi(0.5 * r * arg) * sinc(r * arg);
            }
        }
        h1 *= (1.0 - r) / M;
        h2 *= r / M;
        total += p.gain * cis2pi(-u * r) * (a * h1 + cis2pi(u - static_cast<double>(kp) / N) * b * h2);
    }
    return total;
}

/// Full two-step matrix. Per path the entry separates as
///   gamma [ a(k'-k) H1[l',l] + e^{j2pi(u - k'/N)} b(k'-k) H2[l',l] ]
/// with a, b the Doppler geometric sums (depend on k'-k only) and H1, H2 the
/// M x M delay kernels; cost O(L (M^3 + N + M^2 N^2)).
inline EffectiveChannel build_two_step_matrix(const PathSet& paths, const GridConfig& cfg) {
    paths.validate(cfg);
    const int M = cfg.M();
    const int N = cfg.N();
    const auto MN = static_cast<Eigen::Index>(cfg.size());
    CMatrix H = CMatrix::Zero(MN, MN);

    std::vector<Complex> a(static_cast<std::size_t>(2 * N - 1)), b(a.size());
    std::vector<Complex> tail_phase(static_cast<std::size_t>(N));
    for (const auto& p : paths) {
        const double r = p.delay / cfg.T();
        const double u = p.doppler / cfg.delta_f();
        const Complex gamma = p.gain * cis2pi(-u * r);
        for (int d = -(N - 1); d <= N - 1; ++d) {
            const double dk = static_cast<double>(d) / N - u;
            a[static_cast<std::size_t>(d + N - 1)] = gamma * detail::doppler_sum(N, N, dk);
            b[static_cast<std::size_t>(d + N - 1)] = gamma * detail::doppler_sum(N - 1, N, dk);
        }
        for (int kp = 0; kp < N; ++kp) tail_phase[static_cast<std::size_t>(kp)] = cis2pi(u - static_cast<double>(kp) / N);
        const CMatrix H1 = detail::delay_kernel_matrix(true, r, u, M);
        const CMatrix H2 = detail::delay_kernel_matrix(false, r, u, M);

        for (int kp = 0; kp < N; ++kp) {
            for (int k = 0; k < N; ++k) {
                const Complex ca = a[static_cast<std::size_t>(kp - k + N - 1)];
                const Complex cb = tail_phase[static_cast<std::size_t>(kp)] * b[static_cast<std::size_t>(kp - k + N - 1)];
                H.block(kp * M, k * M, M, M) += ca * H1 + cb * H2;
            }
        }
    }
    return {std::move(H), ChannelKind::TwoStep, cfg};
}

// ---------------------------------------------------------------------------
// Zak receiver channel
// ---------------------------------------------------------------------------

/// Selects the Zak kernel. FlippedFloorPhase conjugates the quasi-periodic
/// floor phase; it exists only as a fault-injection fixture for validation.
enum class ZakKernelVariant { Exact, FlippedFloorPhase };

namespace detail {
/// h_i[k', l'] = h_i e^{j2pi u (l'/M - r)} e^{j2pi (k'/N - u) floor(l'/M - r)}
inline Complex zak_path_phase(const ChannelPath& p, int kp, int lp, const GridConfig& cfg, ZakKernelVariant variant) {
    const double r = p.delay / cfg.T();
    const double u = p.doppler / cfg.delta_f();
    const double lm = static_cast<double>(lp) / cfg.M();
    const double f = snapped_floor(lm - r);
    const double sign = variant == ZakKernelVariant::Exact ? 1.0 : -1.0;
    return p.gain * cis2pi(u * (lm - r)) * cis2pi(sign * (static_cast<double>(kp) / cfg.N() - u) * f);
}
}  // namespace detail

/// h_tilde[k', l', k, l] = sum_i h_i[k',l'] w1((k'-k) delta_f/N - nu_i) w2((l'-l) T/M - tau_i)
inline Complex zak_entry(int kp, int lp, int k, int l, const PathSet& paths, const GridConfig& cfg) {
    detail::check_indices(kp, lp, k, l, cfg);
    Complex total{};
    for (const auto& p : paths) {
        total += detail::zak_path_phase(p, kp, lp, cfg, ZakKernelVariant::Exact) *
                 w1((kp - k) * cfg.delta_f() / cfg.N() - p.doppler, cfg) * w2((lp - l) * cfg.T() / cfg.M() - p.delay, cfg);
    }
    return total;
}

/// Full Zak matrix. w1 depends on k'-k only, w2 on l'-l only and the path
/// phase on (k', l') only; kernels are tabulated once per path (O(M + N)).
inline EffectiveChannel build_zak_matrix(const PathSet& paths, const GridConfig& cfg,
                                         ZakKernelVariant variant = ZakKernelVariant::Exact) {
    paths.validate(cfg);
    const int M = cfg.M();
    const int N = cfg.N();
    const auto MN = static_cast<Eigen::Index>(cfg.size());
    CMatrix H = CMatrix::Zero(MN, MN);

    std::vector<Complex> doppler_kernel(static_cast<std::size_t>(2 * N - 1));
    std::vector<Complex> delay_kernel(static_cast<std::size_t>(2 * M - 1));
    std::vector<Complex> phase(cfg.size());
    for (const auto& p : paths) {
        for (int d = -(N - 1); d <= N - 1; ++d)
            doppler_kernel[static_cast<std::size_t>(d + N - 1)] = w1(d * cfg.delta_f() / N - p.doppler, cfg);
        for (int e = -(M - 1); e <= M - 1; ++e)
            delay_kernel[static_cast<std::size_t>(e + M - 1)] = w2(e * cfg.T() / M - p.delay, cfg);
        for (int kp = 0; kp < N; ++kp)
            for (int lp = 0; lp < M; ++lp)
                phase[static_cast<std::size_t>(kp * M + lp)] = detail::zak_path_phase(p, kp, lp, cfg, variant);

        for (int kp = 0; kp < N; ++kp) {
            for (int k = 0; k < N; ++k) {
                const Complex c = doppler_kernel[static_cast<std::size_t>(kp - k + N - 1)];
                for (int lp = 0; lp < M; ++lp) {
                    const Complex rowc = phase[static_cast<std::size_t>(kp * M + lp)] * c;
                    for (int l = 0; l < M; ++l)
                        H(kp * M + lp, k * M + l) += rowc * delay_kernel[static_cast<std::size_t>(lp - l + M - 1)];
                }
            }
        }
    }
    return {std::move(H), ChannelKind::Zak, cfg};
}

// ---------------------------------------------------------------------------
// Zak-receiver DD noise covariance
// ---------------------------------------------------------------------------

/// K_z = E[z z^H]: MNN0(1 + 1/N) on the diagonal, MNN0/N between Doppler bins
/// sharing a delay bin, zero across delay bins. Normalized,
/// K_z / (MNN0) = I + (1/N) J, J the all-ones coupling over Doppler per delay.
class NoiseCovariance {
  public:
    NoiseCovariance(const GridConfig& cfg, double N0) : cfg_(cfg), N0_(N0) {
        if (!(N0 > 0.0)) throw std::invalid_argument("NoiseCovariance: N0 must be positive");
    }

    double scale() const { return static_cast<double>(cfg_.size()) * N0_; }
    double diagonal_value() const { return scale() * (1.0 + 1.0 / cfg_.N()); }
    double cross_doppler_value() const { return scale() / cfg_.N(); }

    double entry(std::size_t row, std::size_t col) const {
        const auto a = dd_index(row, cfg_);
        const auto b = dd_index(col, cfg_);
        if (a.l != b.l) return 0.0;
        return a.k == b.k ? diagonal_value() : cross_doppler_value();
    }

    CMatrix dense() const {
        const auto MN = static_cast<Eigen::Index>(cfg_.size());
        CMatrix K(MN, MN);
        for (Eigen::Index i = 0; i < MN; ++i)
            for (Eigen::Index j = 0; j < MN; ++j) K(i, j) = entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        return K;
    }

    const GridConfig& config() const { return cfg_; }

  private:
    GridConfig cfg_;
    double N0_;
};

namespace detail {
/// Columns of A <- (I + c J) A, J the Doppler all-ones coupling per delay bin.
template <typename Derived>
void apply_doppler_coupling(Eigen::MatrixBase<Derived>& A, const GridConfig& cfg, double c) {
    const int M = cfg.M();
    const int N = cfg.N();
    for (Eigen::Index col = 0; col < A.cols(); ++col) {
        for (int l = 0; l < M; ++l) {
            Complex s{};
            for (int k = 0; k < N; ++k) s += A(k * M + l, col);
            s *= c;
            for (int k = 0; k < N; ++k) A(k * M + l, col) += s;
        }
    }
}
}  // namespace detail

/// (K_z/(MNN0))^{-1} v = v - (1/(2N)) J v  (rank-one inverse per delay bin:
/// (I + 1/N 11^T)^{-1} = I - 1/(2N) 11^T since 1^T 1 = N).
inline CVector noise_cov_apply_inverse(const CVector& v, const GridConfig& cfg) {
    if (static_cast<std::size_t>(v.size()) != cfg.size()) throw std::invalid_argument("noise_cov_apply_inverse: length mismatch");
    CVector out = v;
    detail::apply_doppler_coupling(out, cfg, -1.0 / (2.0 * cfg.N()));
    return out;
}

/// (K_z/(MNN0)) v = v + (1/N) J v
inline CVector noise_cov_apply_normalized(const CVector& v, const GridConfig& cfg) {
    if (static_cast<std::size_t>(v.size()) != cfg.size()) throw std::invalid_argument("noise_cov_apply_normalized: length mismatch");
    CVector out = v;
    detail::apply_doppler_coupling(out, cfg, 1.0 / cfg.N());
    return out;
}

/// Column-wise normalized inverse applied to a matrix.
inline CMatrix noise_cov_apply_inverse(const CMatrix& A, const GridConfig& cfg) {
    if (static_cast<std::size_t>(A.rows()) != cfg.size()) throw std::invalid_argument("noise_cov_apply_inverse: row count mismatch");
    CMatrix out = A;
    detail::apply_doppler_coupling(out, cfg, -1.0 / (2.0 * cfg.N()));
    return out;
}

}  // namespace otfs
