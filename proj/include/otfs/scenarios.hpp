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

// En-route UAS control/non-payload link: two-path Rician channel and Monte
// Carlo spectral-efficiency sweeps over speed and SNR.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "otfs/capacity.hpp"
#include "otfs/channel.hpp"
#include "otfs/core_types.hpp"
#include "otfs/doppler_blocks.hpp"
#include "otfs/random.hpp"

namespace otfs {

struct UASConfig {
    double carrier_hz = 5.06e9;
    double speed_mps = 0.0;
    double K_db = 15.0;
    double beamwidth_deg = 3.5;
    double tau2_s = 33e-6;
    double c_mps = 299792458.0;
    GridConfig grid{15, 46, 2000.0};

    /// nu_1 = v f_c / c
    double max_doppler_hz() const { return speed_mps * carrier_hz / c_mps; }
};

/// Direct path h1 = sqrt(K/(K+1)), tau1 = 0, nu1 = v f_c / c; reflected path
/// h2 ~ CN(0, 1/(K+1)), tau2, nu2 = nu1 cos(pi - omega U), U ~ U[0, 1].
/// Draw order: h2 (two normals) then U.
inline PathSet sample_uas_channel(const UASConfig& cfg, Rng& rng) {
    if (!(cfg.tau2_s >= 0.0 && cfg.tau2_s < cfg.grid.T())) throw std::invalid_argument("UASConfig: tau2 must lie in [0, T)");
    if (cfg.speed_mps < 0.0) throw std::invalid_argument("UASConfig: speed must be nonnegative");
    const double K = db_to_linear(cfg.K_db);
    const double nu1 = cfg.max_doppler_hz();
    const double omega = cfg.beamwidth_deg * kPi / 180.0;
    const Complex h2 = rng.complex_normal(1.0 / (K + 1.0));
    const double U = rng.uniform();
    return PathSet{{Complex(std::sqrt(K / (K + 1.0)), 0.0), 0.0, nu1}, {h2, cfg.tau2_s, nu1 * std::cos(kPi - omega * U)}};
}

enum class SEMethod { Structured, Dense };

struct SweepSettings {
    UASConfig scenario{};
    double rho_db = 10.0;
    int trials = 2000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: OTFS_THREADS, else hardware parallelism
    SEMethod method = SEMethod::Structured;
};

struct MeanSE {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SweepPoint {
    double axis = 0.0;
    MeanSE zak_exact;
    MeanSE zak_approx;
    MeanSE two_step;
    MeanSE gap;  // paired zak_exact - two_step
};

struct SweepResult {
    std::string axis_name;
    std::vector<SweepPoint> points;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Worker count: explicit request, else OTFS_THREADS, else hardware parallelism.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OTFS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Mean and standard error with Neumaier-compensated sums, in index order so
/// the result does not depend on how trials were scheduled.
inline MeanSE mean_and_stderr(std::span<const double> v) {
    if (v.empty()) return {};
    auto compensated = [&](auto&& term) {
        double sum = 0.0, c = 0.0;
        for (double x : v) {
            const double t = term(x);
            const double s = sum + t;
            c += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
            sum = s;
        }
        return sum + c;
    };
    const auto n = static_cast<double>(v.size());
    const double mean = compensated([](double x) { return x; }) / n;
    if (v.size() < 2) return {mean, 0.0};
    const double ss = compensated([mean](double x) { return (x - mean) * (x - mean); });
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

namespace detail {
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct TrialSE {
    double zak_exact, zak_approx, two_step;
};

inline TrialSE dense_trial(const PathSet& paths, const GridConfig& grid, double rho) {
    const auto Hz = build_zak_matrix(paths, grid);
    const auto Ht = build_two_step_matrix(paths, grid);
    return {se_zak_exact(Hz, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz,
            se_zak_approx(Hz, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz,
            se_two_step(Ht, rho, LogDetMethod::Cholesky).se_bits_per_sec_per_hz};
}

inline SweepResult reduce(std::string axis_name, std::span<const double> axis, const std::vector<std::vector<TrialSE>>& per_trial,
                          const SweepSettings& s) {
    SweepResult out{std::move(axis_name), {}, s.trials, s.seed};
    const auto n = static_cast<std::size_t>(s.trials);
    std::vector<double> a(n), b(n), c(n), g(n);
    for (std::size_t i = 0; i < axis.size(); ++i) {
        for (std::size_t t = 0; t < n; ++t) {
            const auto& r = per_trial[t][i];
            a[t] = r.zak_exact;
            b[t] = r.zak_approx;
            c[t] = r.two_step;
            g[t] = r.zak_exact - r.two_step;
        }
        out.points.push_back({axis[i], mean_and_stderr(a), mean_and_stderr(b), mean_and_stderr(c), mean_and_stderr(g)});
    }
    return out;
}

inline void check_settings(const SweepSettings& s, std::size_t axis_len) {
    if (s.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    if (axis_len == 0) throw std::invalid_argument("sweep: axis must not be empty");
}
}  // namespace detail

/// Mean SE versus UAS speed at fixed rho. Trial t uses seed + t at every speed.
inline SweepResult sweep_speed(std::span<const double> speeds, const SweepSettings& s) {
    detail::check_settings(s, speeds.size());
    const double rho = db_to_linear(s.rho_db);
    std::vector<std::vector<detail::TrialSE>> per_trial(static_cast<std::size_t>(s.trials),
                                                        std::vector<detail::TrialSE>(speeds.size()));
    detail::parallel_for(s.trials, resolve_thread_count(s.threads), [&](int t) {
        for (std::size_t i = 0; i < speeds.size(); ++i) {
            UASConfig sc = s.scenario;
            sc.speed_mps = speeds[i];
            Rng rng(s.seed + static_cast<std::uint64_t>(t));
            const PathSet paths = sample_uas_channel(sc, rng);
            auto& r = per_trial[static_cast<std::size_t>(t)][i];
            if (s.method == SEMethod::Dense) {
                r = detail::dense_trial(paths, sc.grid, rho);
            } else {
                const auto g = ReceiverGrams::build(paths, sc.grid);
                r = {g.se(SEKind::ZakExact, rho).se_bits_per_sec_per_hz, g.se(SEKind::ZakApprox, rho).se_bits_per_sec_per_hz,
                     g.se(SEKind::TwoStep, rho).se_bits_per_sec_per_hz};
            }
        }
    });
    return detail::reduce("speed_mps", speeds, per_trial, s);
}

/// Mean SE versus rho (dB) at the scenario speed. One channel draw per trial
/// serves every rho.
inline SweepResult sweep_rho(std::span<const double> rhos_db, const SweepSettings& s) {
    detail::check_settings(s, rhos_db.size());
    std::vector<std::vector<detail::TrialSE>> per_trial(static_cast<std::size_t>(s.trials),
                                                        std::vector<detail::TrialSE>(rhos_db.size()));
    detail::parallel_for(s.trials, resolve_thread_count(s.threads), [&](int t) {
        Rng rng(s.seed + static_cast<std::uint64_t>(t));
        const PathSet paths = sample_uas_channel(s.scenario, rng);
        auto& row = per_trial[static_cast<std::size_t>(t)];
        if (s.method == SEMethod::Dense) {
            for (std::size_t i = 0; i < rhos_db.size(); ++i) row[i] = detail::dense_trial(paths, s.scenario.grid, db_to_linear(rhos_db[i]));
            return;
        }
        const auto g = ReceiverGrams::build(paths, s.scenario.grid);
        for (std::size_t i = 0; i < rhos_db.size(); ++i) {
            const double rho = db_to_linear(rhos_db[i]);
            row[i] = {g.se(SEKind::ZakExact, rho).se_bits_per_sec_per_hz, g.se(SEKind::ZakApprox, rho).se_bits_per_sec_per_hz,
                      g.se(SEKind::TwoStep, rho).se_bits_per_sec_per_hz};
        }
    });
    return detail::reduce("rho_db", rhos_db, per_trial, s);
}

inline std::vector<double> default_speed_grid() { return {0, 50, 100, 150, 200, 250, 300, 350, 400}; }

inline std::vector<double> default_rho_grid_db() {
    std::vector<double> out;
    for (int r = 0; r <= 20; r += 2) out.push_back(r);
    return out;
}

}  // namespace otfs
