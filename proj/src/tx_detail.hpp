// SPDX-License-Identifier: Apache-2.0
//
// Internal helpers shared by the transmit-side solvers: noise normalization
// of effective channels, the equal-power-split MRT witness, and beam
// post-processing (rotation convention and power clamping).

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "irsbf/metrics.hpp"
#include "irsbf/model.hpp"

namespace irsbf::txdetail {

inline double sigma_of(const model::SystemConfig& cfg) {
    return std::sqrt(cfg.noise_w);
}

// Channels in noise units (sigma' = 1): a' = a / sigma.  SINR targets are
// ratios and therefore invariant under this scaling.
inline std::vector<Eigen::VectorXcd> noise_scaled(
    const model::SystemConfig& cfg, const std::vector<Eigen::VectorXcd>& a) {
    const double inv = 1.0 / sigma_of(cfg);
    std::vector<Eigen::VectorXcd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = inv * a[i];
    return out;
}

// Full-power equal-split MRT: w_{b,k} = sqrt(P_b/K_b) a_own/||a_own||
// (zero beam when the channel is zero).
inline metrics::TxBeams mrt_witness(const model::SystemConfig& cfg,
                                    const std::vector<Eigen::VectorXcd>& a) {
    const int K = cfg.total_users();
    metrics::TxBeams W;
    W.w.resize(cfg.num_bs);
    for (int b = 0; b < cfg.num_bs; ++b) {
        const int kb = cfg.users_per_cell[b];
        W.w[b] = Eigen::MatrixXcd::Zero(cfg.num_antennas, kb);
        const double amp = std::sqrt(cfg.pmax_w[b] / kb);
        for (int k = 0; k < kb; ++k) {
            const Eigen::VectorXcd& own = a[static_cast<std::size_t>(b) * K +
                                            cfg.user_index(b, k)];
            const double nrm = own.norm();
            if (nrm > 0.0) W.w[b].col(k) = (amp / nrm) * own;
        }
    }
    return W;
}

// Rotates each beam so its own-link inner product is real nonnegative, then
// clamps each BS block to its power budget (both SINR-invariant up to the
// clamp factor, which is 1 + O(solver tolerance)).
inline void finalize_beams(const model::SystemConfig& cfg,
                           const std::vector<Eigen::VectorXcd>& a,
                           metrics::TxBeams& W) {
    const int K = cfg.total_users();
    for (int b = 0; b < cfg.num_bs; ++b) {
        for (int k = 0; k < cfg.users_per_cell[b]; ++k) {
            const int j = cfg.user_index(b, k);
            const std::complex<double> amp =
                a[static_cast<std::size_t>(b) * K + j].dot(W.w[b].col(k));
            const double mag = std::abs(amp);
            if (mag > 0.0) W.w[b].col(k) *= std::conj(amp) / mag;
        }
        const double p = W.power(b);
        if (p > cfg.pmax_w[b] && p > 0.0)
            W.w[b] *= std::sqrt(cfg.pmax_w[b] / p);
    }
}

}  // namespace irsbf::txdetail
