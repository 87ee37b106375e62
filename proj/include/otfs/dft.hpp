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

#include <bit>
#include <cstdint>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "otfs/core_types.hpp"

namespace otfs::dft {

namespace detail {
inline Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> fft = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return fft;
}
}  // namespace detail

/// out[k] = sum_n in[n] e^{-j 2 pi k n / L}
inline std::vector<Complex> forward(const std::vector<Complex>& in) {
    std::vector<Complex> out;
    detail::engine().fwd(out, in);
    return out;
}

/// out[n] = sum_k in[k] e^{+j 2 pi k n / L}  (no 1/L factor)
inline std::vector<Complex> inverse_unscaled(const std::vector<Complex>& in) {
    std::vector<Complex> out;
    detail::engine().inv(out, in);
    return out;
}

/// Nominal cost of one length-L transform, L * ceil(log2 L), used by the
/// receivers' operation counters.
inline std::uint64_t transform_cost(std::uint64_t length) {
    if (length <= 1) return 1;
    return length * static_cast<std::uint64_t>(std::bit_width(length - 1));
}

}  // namespace otfs::dft

namespace otfs {

/// Operation counter for complexity accounting.
struct OpCounter {
    std::uint64_t ops = 0;
    void add(std::uint64_t n) { ops += n; }
};

}  // namespace otfs
