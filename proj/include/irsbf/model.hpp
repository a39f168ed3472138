// SPDX-License-Identifier: Apache-2.0
//
// System model: geometry, path loss, and seeded channel realizations for an
// IRS-aided multi-cell MISO downlink.
//
// Channels follow the standard three-segment model:
//   * BS b -> IRS:      G_b in C^{N x M}, Rician with a rank-one LOS term
//                       built from ULA steering vectors,
//   * BS i -> user j:   direct channel h in C^M, Rayleigh,
//   * IRS  -> user j:   f in C^N, Rayleigh,
// all scaled so the per-entry second moment equals the distance path loss
// C0 * (d/d0)^(-alpha) with a per-segment exponent.
//
// ULA convention: arrays are half-wavelength spaced; for a link with bearing
// angle theta = atan2(dy, dx), element n of the steering vector is
// exp(j*pi*n*sin(theta)).

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace irsbf::model {

using cxd = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct SystemConfig {
    int num_bs = 0;                 // B
    int num_antennas = 0;           // M, per BS
    int num_irs = 0;                // N, reflecting elements
    std::vector<int> users_per_cell;            // K_b, size B
    std::vector<Vec2> bs_pos;                   // size B
    std::vector<std::vector<Vec2>> user_pos;    // [b][k]
    Vec2 irs_pos;

    double c0_db = -30.0;    // path loss at reference distance, dB
    double d0 = 1.0;         // reference distance, m
    double exp_bs_user = 3.6;
    double exp_bs_irs = 2.0;
    double exp_irs_user = 2.5;
    double rician_k = 2.0;   // K-factor of the BS-IRS links

    double noise_w = 1e-11;              // receiver noise power, watts
    std::vector<double> pmax_w;          // per-BS power budget, watts
    std::vector<std::vector<double>> weights;  // SINR weights alpha_{b,k}

    int total_users() const {
        int n = 0;
        for (int k : users_per_cell) n += k;
        return n;
    }
    // Global user index of user k in cell b: K_0 + ... + K_{b-1} + k.
    int user_index(int b, int k) const {
        int n = 0;
        for (int i = 0; i < b; ++i) n += users_per_cell[i];
        return n + k;
    }
    // Inverse of user_index.
    std::pair<int, int> user_of_index(int j) const {
        int b = 0;
        while (j >= users_per_cell[b]) j -= users_per_cell[b++];
        return {b, j};
    }
};

struct ChannelSet {
    // bs_irs[b]: N x M matrix G_b.
    std::vector<Eigen::MatrixXcd> bs_irs;
    // direct[i * K + j]: length-M channel from BS i to global user j.
    std::vector<Eigen::VectorXcd> direct;
    // irs_user[j]: length-N channel from the IRS to global user j.
    std::vector<Eigen::VectorXcd> irs_user;

    const Eigen::VectorXcd& direct_link(int bs, int user, int K) const {
        return direct[static_cast<std::size_t>(bs) * K + user];
    }
};

// Per-link cascaded matrices Phi_{i,j} = diag(conj(f_j)) * G_i (N x M); the
// channel seen through the IRS by user j from BS i, before reflection
// coefficients are applied.
struct CompositeChannels {
    // phi[i * K + j]
    std::vector<Eigen::MatrixXcd> phi;
    const Eigen::MatrixXcd& link(int bs, int user, int K) const {
        return phi[static_cast<std::size_t>(bs) * K + user];
    }
};

// Linear path-loss gain C0 * (d/d0)^(-exponent); distances below d0 clamp
// to d0.
double path_loss(double distance, double exponent, double c0_db, double d0);

// Half-wavelength ULA steering vector of length n for bearing angle theta.
Eigen::VectorXcd steering(int n, double theta);

double distance(const Vec2& a, const Vec2& b);

// Draws one channel realization.  Deterministic: a given (config, seed)
// produces bit-identical output, and each link has its own draw stream.
ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed);

// Builds the cascaded per-link matrices.
CompositeChannels composite(const SystemConfig& cfg, const ChannelSet& ch);

// Effective channel a_{i,j}(v) = Phi_{i,j}^H v + h_{i,j} for every link;
// result indexed [i * K + j], each of length M.
std::vector<Eigen::VectorXcd> effective_channels(
    const SystemConfig& cfg, const ChannelSet& ch,
    const CompositeChannels& comp, const Eigen::VectorXcd& v);

}  // namespace irsbf::model
