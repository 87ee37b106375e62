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

// Self-check suite behind `otfs_sim validate`: exact-oracle comparisons for
// both channel matrices, the DD noise covariance, and the property sets of the
// Zak kernels, the modulator and the receivers.

#pragma once
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "otfs/capacity.hpp"
#include "otfs/channel.hpp"
#include "otfs/core_types.hpp"
#include "otfs/modulator.hpp"
#include "otfs/random.hpp"
#include "otfs/receivers.hpp"
#include "otfs/zak_kernels.hpp"

namespace otfs {

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;     // worst observed value of the checked quantity
    double threshold = 0.0;  // bound it was compared against
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    bool quick = false;
    std::uint64_t seed = 1;
    GridConfig grid{15, 46, 2000.0};
    ZakKernelVariant zak_variant = ZakKernelVariant::Exact;  // FlippedFloorPhase only for fault injection
};

namespace validation {

inline PathSet random_paths(Rng& rng, const GridConfig& cfg, int L) {
    PathSet p;
    for (int i = 0; i < L; ++i)
        p.add({rng.complex_normal(1.0 / L), rng.uniform() * cfg.T(), (rng.uniform() - 0.5) * 8.0 * cfg.delta_f()});
    return p;
}

inline double rel_error(const CVector& got, const CVector& want) { return (got - want).norm() / want.norm(); }

/// Worst relative error of discrete_zak(exact channel output) against H x.
inline CheckResult zak_oracle(const ValidationOptions& o, int path_sets) {
    Rng rng(o.seed);
    double worst = 0.0;
    for (int s = 0; s < path_sets; ++s) {
        const PathSet paths = random_paths(rng, o.grid, 1 + s % 3);
        const DDGrid x = random_symbols(o.grid, rng);
        const DDGrid Y = zak_receive(apply_channel_exact(isfft(x, o.grid), paths, o.grid), o.grid);
        worst = std::max(worst, rel_error(Y.vec(), build_zak_matrix(paths, o.grid, o.zak_variant).matrix * x.vec()));
    }
    std::ostringstream d;
    d << path_sets << " random path sets, worst relative error " << worst;
    return {"zak_matrix_vs_sample_pipeline", worst < 1e-8, worst, 1e-8, d.str()};
}

/// Worst relative error of the Q = 64 Wigner + SFFT pipeline against H_hat x,
/// and the worst error reduction when Q doubles from 32.
inline std::vector<CheckResult> two_step_oracle(const ValidationOptions& o, int path_sets) {
    Rng rng(o.seed + 1000);
    double worst = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
    for (int s = 0; s < path_sets; ++s) {
        const PathSet paths = random_paths(rng, o.grid, 1 + s % 3);
        const DDGrid x = random_symbols(o.grid, rng);
        const ReceivedSignal y(isfft(x, o.grid), paths, o.grid);
        const CVector want = build_two_step_matrix(paths, o.grid).matrix * x.vec();
        const double e64 = rel_error(two_step_receive(y, o.grid, 64).vec(), want);
        const double e32 = rel_error(two_step_receive(y, o.grid, 32).vec(), want);
        worst = std::max(worst, e64);
        worst_ratio = std::min(worst_ratio, e32 / e64);
    }
    std::ostringstream d1, d2;
    d1 << path_sets << " random path sets, Q = 64, worst relative error " << worst;
    d2 << "worst error reduction Q 32 -> 64: " << worst_ratio << "x";
    return {{"two_step_matrix_vs_quadrature_pipeline", worst < 1e-3, worst, 1e-3, d1.str()},
            {"two_step_quadrature_convergence", worst_ratio >= 3.0, worst_ratio, 3.0, d2.str()}};
}

/// Monte Carlo DD noise covariance at the Zak receiver output. Diagonal
/// entries within 5% relative; cross-Doppler and zero-class entries within
/// 0.05 MNN0 absolute; the pooled cross-Doppler mean within 5% relative.
inline CheckResult noise_covariance(const ValidationOptions& o, int frames) {
    const GridConfig& cfg = o.grid;
    const auto MN = static_cast<Eigen::Index>(cfg.size());
    const int batch = std::min(frames, 500);
    const double N0 = 1.0;
    Rng rng(o.seed + 2000);
    CMatrix acc = CMatrix::Zero(MN, MN);
    CMatrix Z(MN, batch);
    TimeSamples y;
    y.sample_period = cfg.sample_period();
    int done = 0;
    while (done < frames) {
        const int b = std::min(batch, frames - done);
        for (int i = 0; i < b; ++i) {
            y.samples.assign(static_cast<std::size_t>(cfg.M()) * static_cast<std::size_t>(cfg.N() + 1), Complex{});
            y = add_noise(std::move(y), N0, cfg, rng);
            Z.col(i) = zak_receive(y, cfg).vec();
        }
        acc.selfadjointView<Eigen::Lower>().rankUpdate(Z.leftCols(b), 1.0);
        done += b;
    }
    const CMatrix C = CMatrix(acc.selfadjointView<Eigen::Lower>()) / static_cast<double>(frames);
    const NoiseCovariance K(cfg, N0);
    double worst_diag = 0.0, worst_abs = 0.0, cross_sum = 0.0;
    long cross_count = 0;
    for (Eigen::Index i = 0; i < MN; ++i)
        for (Eigen::Index j = 0; j < MN; ++j) {
            const double want = K.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (i == j) {
                worst_diag = std::max(worst_diag, std::abs(C(i, j).real() - want) / want);
            } else {
                worst_abs = std::max(worst_abs, std::abs(C(i, j) - want) / K.scale());
                if (want != 0.0) {
                    cross_sum += C(i, j).real();
                    ++cross_count;
                }
            }
        }
    const double pooled = cross_count ? std::abs(cross_sum / static_cast<double>(cross_count) / K.cross_doppler_value() - 1.0) : 0.0;
    std::ostringstream d;
    d << frames << " frames: diagonal worst rel " << worst_diag << ", off-diagonal worst abs/MNN0 " << worst_abs
      << ", pooled cross-Doppler rel " << pooled;
    const bool ok = worst_diag < 0.05 && worst_abs < 0.05 && pooled < 0.05;
    return {"noise_covariance_monte_carlo", ok, std::max({worst_diag, worst_abs, pooled}), 0.05, d.str()};
}

inline CheckResult quasi_periodicity(const ValidationOptions& o, int points) {
    Rng rng(o.seed + 3000);
    const double T = o.grid.T();
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double tau = (rng.uniform() - 0.5) * 20.0 * T;
        const double nu = (rng.uniform() - 0.5) * 4.0 * o.grid.delta_f();
        const int n = static_cast<int>(std::floor(rng.uniform() * 21.0)) - 10;
        const Complex z = zak_rect({tau, nu}, o.grid);
        worst = std::max(worst, std::abs(zak_rect({tau - n * T, nu}, o.grid) - cis2pi(-nu * n * T) * z));
    }
    std::ostringstream d;
    d << points << " random points, worst deviation " << worst;
    return {"zak_quasi_periodicity", worst < 1e-9, worst, 1e-9, d.str()};
}

inline CheckResult doppler_periodicity(const ValidationOptions& o, int points) {
    Rng rng(o.seed + 4000);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double tau = (rng.uniform() - 0.5) * 20.0 * o.grid.T();
        const double nu = (rng.uniform() - 0.5) * 4.0 * o.grid.delta_f();
        const int m = static_cast<int>(std::floor(rng.uniform() * 11.0)) - 5;
        worst = std::max(worst, std::abs(zak_rect({tau, nu + m * o.grid.delta_f()}, o.grid) - zak_rect({tau, nu}, o.grid)));
    }
    std::ostringstream d;
    d << points << " random points, worst deviation " << worst;
    return {"zak_doppler_periodicity", worst < 1e-9, worst, 1e-9, d.str()};
}

inline CheckResult kernel_nulls(const ValidationOptions& o) {
    double worst = 0.0;
    for (int k = 1; k < o.grid.N(); ++k) worst = std::max(worst, std::abs(w1(k * o.grid.delta_f() / o.grid.N(), o.grid)));
    for (int l = 1; l < o.grid.M(); ++l) worst = std::max(worst, std::abs(w2(l * o.grid.T() / o.grid.M(), o.grid)));
    const double peak = std::max(std::abs(w1(0.0, o.grid) - 1.0), std::abs(w2(0.0, o.grid) - 1.0));
    std::ostringstream d;
    d << "worst off-peak magnitude " << worst << ", peak deviation " << peak;
    return {"w1_w2_null_structure", worst < 1e-12 && peak < 1e-12, std::max(worst, peak), 1e-12, d.str()};
}

inline CheckResult basis_energy(const ValidationOptions& o) {
    const GridConfig& cfg = o.grid;
    double worst = 0.0;
    for (int k = 0; k < cfg.N(); ++k)
        for (int l = 0; l < cfg.M(); ++l) {
            DDGrid x(cfg);
            x(k, l) = 1.0;
            const TimeSamples s = heisenberg_samples(isfft(x, cfg), cfg);
            double e = 0.0;
            for (const auto& v : s.samples) e += std::norm(v);
            worst = std::max(worst, std::abs(cfg.sample_period() * e - 1.0 / static_cast<double>(cfg.size())));
        }
    std::ostringstream d;
    d << "all " << cfg.size() << " basis pulses, worst |energy - 1/MN| " << worst;
    return {"basis_energy_identity", worst < 1e-12, worst, 1e-12, d.str()};
}

/// Max deviation of the normalized inverse from I is 1/(2N) and shrinks with N.
inline CheckResult whitening_trend(const ValidationOptions& o) {
    std::vector<double> dev;
    bool exact = true;
    for (int N : {o.grid.N(), 10 * o.grid.N()}) {
        const GridConfig cfg(2, N, o.grid.delta_f());
        const auto n = static_cast<Eigen::Index>(cfg.size());
        const CMatrix inv = noise_cov_apply_inverse(CMatrix(CMatrix::Identity(n, n)), cfg);
        const double d = (inv - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        exact = exact && std::abs(d - 1.0 / (2.0 * N)) < 1e-15;
        dev.push_back(d);
    }
    std::ostringstream d;
    d << "max |K^-1 - I| at N = " << o.grid.N() << ": " << dev[0] << ", at N = " << 10 * o.grid.N() << ": " << dev[1];
    return {"whitening_trend", exact && dev[1] < dev[0], dev[1] / dev[0], 1.0, d.str()};
}

inline CheckResult complexity_counters(const ValidationOptions& o) {
    const GridConfig& cfg = o.grid;
    TimeSamples y;
    y.sample_period = cfg.sample_period();
    y.samples.assign(static_cast<std::size_t>(cfg.M()) * static_cast<std::size_t>(cfg.N() + 1), Complex{});
    OpCounter zak, two;
    zak_receive(y, cfg, &zak);
    two_step_receive([](double) { return Complex{}; }, cfg, 1, &two);
    std::ostringstream d;
    d << "zak " << zak.ops << " ops, two-step " << two.ops << " ops";
    return {"complexity_counters", zak.ops < two.ops, static_cast<double>(zak.ops), static_cast<double>(two.ops), d.str()};
}

inline CheckResult timed(const std::function<CheckResult()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace validation

/// Runs the suite. The quick subset uses fewer random path sets; the Monte Carlo
/// frame count stays at 10^4 because the covariance bounds need it.
inline std::vector<CheckResult> run_validation(const ValidationOptions& o) {
    using namespace validation;
    const int path_sets = o.quick ? 4 : 20;
    const int frames = 10000;
    std::vector<CheckResult> out;
    out.push_back(timed([&] { return zak_oracle(o, path_sets); }));
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto two = two_step_oracle(o, path_sets);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& r : two) {
            r.seconds = s / static_cast<double>(two.size());
            out.push_back(std::move(r));
        }
    }
    out.push_back(timed([&] { return noise_covariance(o, frames); }));
    out.push_back(timed([&] { return quasi_periodicity(o, 1000); }));
    out.push_back(timed([&] { return doppler_periodicity(o, 1000); }));
    out.push_back(timed([&] { return kernel_nulls(o); }));
    out.push_back(timed([&] { return basis_energy(o); }));
    out.push_back(timed([&] { return whitening_trend(o); }));
    out.push_back(timed([&] { return complexity_counters(o); }));
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

}  // namespace otfs
