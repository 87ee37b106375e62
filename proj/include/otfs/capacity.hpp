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

// Spectral efficiency from effective DD channel matrices (dense route).
//
//   two-step:       C       = (1/MN) log2 |I + rho H^H H|
//   Zak, exact:     C_Zak   = (1/MN) log2 |I + rho H^H (K_z/(MNN0))^{-1} H|
//   Zak, large N:   C_Zak  ~= (1/MN) log2 |I + rho H^H H|

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "otfs/channel.hpp"
#include "otfs/core_types.hpp"

namespace otfs {

enum class LogDetMethod { Eigen, Cholesky };

enum class SEKind { ZakExact, ZakApprox, TwoStep, AnalyticClosedForm };

inline const char* to_string(SEKind kind) {
    switch (kind) {
        case SEKind::ZakExact: return "zak_exact";
        case SEKind::ZakApprox: return "zak_approx";
        case SEKind::TwoStep: return "two_step";
        case SEKind::AnalyticClosedForm: return "analytic";
    }
    return "?";
}

struct SEResult {
    double se_bits_per_sec_per_hz;
    SEKind kind;
};

namespace detail {
inline void check_hermitian(const CMatrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("logdet_hpd: matrix must be square");
    if (A.size() == 0) return;
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("logdet_hpd: matrix is not Hermitian");
}
}  // namespace detail

/// Ascending eigenvalues of a Hermitian matrix.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& A) {
    detail::check_hermitian(A);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    return es.eigenvalues();
}

/// log2 |A| for Hermitian positive-definite A.
inline double logdet_hpd(const CMatrix& A, LogDetMethod method = LogDetMethod::Eigen) {
    detail::check_hermitian(A);
    if (method == LogDetMethod::Eigen) {
        const Eigen::VectorXd ev = hermitian_eigenvalues(A);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) < -1e-9) throw std::domain_error("logdet_hpd: matrix has a negative eigenvalue");
            if (ev(i) <= 0.0) return -std::numeric_limits<double>::infinity();
            acc += std::log2(ev(i));
        }
        return acc;
    }
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success) throw std::domain_error("logdet_hpd: Cholesky failed, matrix not positive definite");
    const CMatrix& L = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) acc += 2.0 * std::log2(L(i, i).real());
    return acc;
}

/// I + rho H^H H, Hermitian by construction.
inline CMatrix identity_plus_gram(const CMatrix& H, double rho) {
    CMatrix A = CMatrix::Identity(H.cols(), H.cols());
    A.selfadjointView<Eigen::Lower>().rankUpdate(H.adjoint(), rho);
    return A.selfadjointView<Eigen::Lower>();
}

namespace detail {
inline void check_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("spectral efficiency: rho must be positive and finite");
}
inline void check_kind(const EffectiveChannel& H, ChannelKind expected) {
    if (H.kind != expected) throw std::invalid_argument("spectral efficiency: channel matrix has the wrong kind");
}
}  // namespace detail

inline SEResult se_two_step(const EffectiveChannel& H, double rho, LogDetMethod method = LogDetMethod::Eigen) {
    detail::check_kind(H, ChannelKind::TwoStep);
    detail::check_rho(rho);
    const double n = static_cast<double>(H.matrix.cols());
    return {logdet_hpd(identity_plus_gram(H.matrix, rho), method) / n, SEKind::TwoStep};
}

inline SEResult se_zak_approx(const EffectiveChannel& H, double rho, LogDetMethod method = LogDetMethod::Eigen) {
    detail::check_kind(H, ChannelKind::Zak);
    detail::check_rho(rho);
    const double n = static_cast<double>(H.matrix.cols());
    return {logdet_hpd(identity_plus_gram(H.matrix, rho), method) / n, SEKind::ZakApprox};
}

/// Uses the analytic inverse of the normalized DD noise covariance.
inline SEResult se_zak_exact(const EffectiveChannel& H, double rho, LogDetMethod method = LogDetMethod::Eigen) {
    detail::check_kind(H, ChannelKind::Zak);
    detail::check_rho(rho);
    const CMatrix KinvH = noise_cov_apply_inverse(H.matrix, H.grid);
    CMatrix G = H.matrix.adjoint() * KinvH;
    CMatrix A = CMatrix::Identity(G.rows(), G.cols()) + rho * 0.5 * (G + G.adjoint());
    const double n = static_cast<double>(H.matrix.cols());
    return {logdet_hpd(A, method) / n, SEKind::ZakExact};
}

/// Single path, zero delay, Doppler q delta_f: Zak and two-step closed forms
/// and the spectrum of the M x M diagonal block A of H_hat^H H_hat.
struct SinglePathClosedForms {
    double c_zak;
    double c_two_step;
    std::vector<double> a_eigenvalues;  // |h1|^2 x (M - q), then 0 x q
    int multiplicity_nonzero;
    int multiplicity_zero;
};

inline SinglePathClosedForms single_path_closed_forms(int q, int M, Complex h1, double rho) {
    if (M < 1) throw std::invalid_argument("single_path_closed_forms: M must be >= 1");
    if (q < 0 || q >= M) throw std::out_of_range("single_path_closed_forms: q must lie in [0, M)");
    detail::check_rho(rho);
    const double g = std::norm(h1);
    const double full = std::log2(1.0 + rho * g);
    SinglePathClosedForms out{full, (1.0 - static_cast<double>(q) / M) * full, {}, M - q, q};
    out.a_eigenvalues.assign(static_cast<std::size_t>(M - q), g);
    out.a_eigenvalues.resize(static_cast<std::size_t>(M), 0.0);
    return out;
}

}  // namespace otfs
