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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace otfs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// e^{j 2 pi x}
inline Complex cis2pi(double x) {
    const double a = kTwoPi * x;
    return {std::cos(a), std::sin(a)};
}

/// Floor with snapping: values within 1e-12 of an integer are treated as that
/// integer, so quasi-periodic phases do not flip on rounding noise at bin edges.
inline double snapped_floor(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12) return r;
    return std::floor(x);
}

/// OTFS frame geometry. Critically sampled: T * delta_f == 1, T is derived.
class GridConfig {
  public:
    GridConfig(int M, int N, double delta_f) : M_(M), N_(N), delta_f_(delta_f) {
        if (M < 1 || N < 1) throw std::invalid_argument("GridConfig: M and N must be >= 1");
        if (!(delta_f > 0.0) || !std::isfinite(delta_f))
            throw std::invalid_argument("GridConfig: delta_f must be positive and finite");
    }

    static GridConfig from_symbol_duration(int M, int N, double T) {
        if (!(T > 0.0)) throw std::invalid_argument("GridConfig: T must be positive");
        return GridConfig(M, N, 1.0 / T);
    }

    int M() const { return M_; }
    int N() const { return N_; }
    double delta_f() const { return delta_f_; }
    double T() const { return 1.0 / delta_f_; }

    /// Number of DD (or TF) grid points, M * N.
    std::size_t size() const { return static_cast<std::size_t>(M_) * static_cast<std::size_t>(N_); }
    double frame_duration() const { return N_ * T(); }
    double bandwidth() const { return M_ * delta_f_; }
    double sample_period() const { return T() / M_; }

    bool operator==(const GridConfig&) const = default;

  private:
    int M_;
    int N_;
    double delta_f_;
};

struct DDIndex {
    int k;  // Doppler index, 0..N-1
    int l;  // delay index, 0..M-1
    bool operator==(const DDIndex&) const = default;
};

/// Linear position of DD entry (k, l): k*M + l.
inline std::size_t vec_index(int k, int l, const GridConfig& cfg) {
    if (k < 0 || k >= cfg.N() || l < 0 || l >= cfg.M())
        throw std::out_of_range("vec_index: (k, l) outside the grid");
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(cfg.M()) + static_cast<std::size_t>(l);
}

inline DDIndex dd_index(std::size_t linear, const GridConfig& cfg) {
    if (linear >= cfg.size()) throw std::out_of_range("dd_index: linear index outside the grid");
    const auto M = static_cast<std::size_t>(cfg.M());
    return {static_cast<int>(linear / M), static_cast<int>(linear % M)};
}

/// M x N delay-Doppler grid, stored in the k*M + l vectorization order.
class DDGrid {
  public:
    explicit DDGrid(const GridConfig& cfg) : cfg_(cfg), values_(CVector::Zero(static_cast<Eigen::Index>(cfg.size()))) {}

    DDGrid(const GridConfig& cfg, CVector values) : cfg_(cfg), values_(std::move(values)) {
        if (static_cast<std::size_t>(values_.size()) != cfg.size())
            throw std::invalid_argument("DDGrid: vector length does not match M*N");
    }

    const GridConfig& config() const { return cfg_; }
    Complex& operator()(int k, int l) { return values_(static_cast<Eigen::Index>(vec_index(k, l, cfg_))); }
    Complex operator()(int k, int l) const { return values_(static_cast<Eigen::Index>(vec_index(k, l, cfg_))); }

    const CVector& vec() const { return values_; }
    CVector& vec() { return values_; }

  private:
    GridConfig cfg_;
    CVector values_;
};

/// N x M time-frequency grid X[n, m], stored as n*M + m.
class TFGrid {
  public:
    explicit TFGrid(const GridConfig& cfg) : cfg_(cfg), values_(cfg.size(), Complex{}) {}

    const GridConfig& config() const { return cfg_; }
    Complex& operator()(int n, int m) { return values_[offset(n, m)]; }
    Complex operator()(int n, int m) const { return values_[offset(n, m)]; }

    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& values() { return values_; }

  private:
    std::size_t offset(int n, int m) const {
        if (n < 0 || n >= cfg_.N() || m < 0 || m >= cfg_.M())
            throw std::out_of_range("TFGrid: (n, m) outside the grid");
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(cfg_.M()) + static_cast<std::size_t>(m);
    }

    GridConfig cfg_;
    std::vector<Complex> values_;
};

/// Complex baseband samples at t = (start_index + i) * sample_period.
struct TimeSamples {
    std::vector<Complex> samples;
    std::int64_t start_index = 0;
    double sample_period = 0.0;

    std::size_t length() const { return samples.size(); }
    double time_of(std::size_t i) const { return (static_cast<double>(start_index) + static_cast<double>(i)) * sample_period; }
};

struct ChannelPath {
    Complex gain;
    double delay;    // seconds, 0 <= delay < T
    double doppler;  // Hz, any real value
};

class PathSet {
  public:
    PathSet() = default;
    PathSet(std::initializer_list<ChannelPath> paths) : paths_(paths) {}
    explicit PathSet(std::vector<ChannelPath> paths) : paths_(std::move(paths)) {}

    void add(const ChannelPath& p) { paths_.push_back(p); }
    std::size_t size() const { return paths_.size(); }
    bool empty() const { return paths_.empty(); }
    const ChannelPath& operator[](std::size_t i) const { return paths_[i]; }
    auto begin() const { return paths_.begin(); }
    auto end() const { return paths_.end(); }

    /// Throws unless the set is non-empty and every delay lies in [0, T).
    void validate(const GridConfig& cfg) const {
        if (paths_.empty()) throw std::invalid_argument("PathSet: at least one path required");
        for (const auto& p : paths_) {
            if (!(p.delay >= 0.0) || !(p.delay < cfg.T()))
                throw std::invalid_argument("PathSet: path delay must satisfy 0 <= tau < T");
            if (!std::isfinite(p.doppler)) throw std::invalid_argument("PathSet: Doppler must be finite");
        }
    }

  private:
    std::vector<ChannelPath> paths_;
};

enum class ChannelKind { TwoStep, Zak };

inline const char* to_string(ChannelKind kind) { return kind == ChannelKind::TwoStep ? "two-step" : "zak"; }

/// MN x MN effective DD channel; row k'M + l', column kM + l.
struct EffectiveChannel {
    CMatrix matrix;
    ChannelKind kind;
    GridConfig grid;
};

/// rho = E / (M N N0).
struct LinkBudget {
    double rho;
    double symbol_energy;
    double noise_psd;

    static LinkBudget from_energy(double E, double N0, const GridConfig& cfg) {
        if (!(N0 > 0.0)) throw std::invalid_argument("LinkBudget: N0 must be positive");
        return {E / (static_cast<double>(cfg.size()) * N0), E, N0};
    }
    static LinkBudget from_rho(double rho, double N0, const GridConfig& cfg) {
        return {rho, rho * static_cast<double>(cfg.size()) * N0, N0};
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace otfs
