// SPDX-License-Identifier: Apache-2.0

#include "irsbf/model.hpp"

#include <cmath>

#include "irsbf/rng.hpp"

namespace irsbf::model {

double path_loss(double d, double exponent, double c0_db, double d0) {
    const double c0 = std::pow(10.0, c0_db / 10.0);
    const double r = std::max(d, d0) / d0;
    return c0 * std::pow(r, -exponent);
}

Eigen::VectorXcd steering(int n, double theta) {
    Eigen::VectorXcd a(n);
    const double step = M_PI * std::sin(theta);
    for (int i = 0; i < n; ++i)
        a(i) = std::polar(1.0, step * static_cast<double>(i));
    return a;
}

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed) {
    using rng::Stream;
    using rng::StreamKind;
    const int B = cfg.num_bs, M = cfg.num_antennas, N = cfg.num_irs;
    const int K = cfg.total_users();

    ChannelSet out;
    out.bs_irs.reserve(B);

    // BS -> IRS links: Rician.  The LOS part is the rank-one outer product
    // of the arrival and departure steering vectors; the NLOS part is iid
    // CN(0,1).  Both are scaled so the per-entry variance is the path loss.
    for (int b = 0; b < B; ++b) {
        const double d = distance(cfg.bs_pos[b], cfg.irs_pos);
        const double pl = path_loss(d, cfg.exp_bs_irs, cfg.c0_db, cfg.d0);
        const double dep = std::atan2(cfg.irs_pos.y - cfg.bs_pos[b].y,
                                      cfg.irs_pos.x - cfg.bs_pos[b].x);
        const double arr = std::atan2(cfg.bs_pos[b].y - cfg.irs_pos.y,
                                      cfg.bs_pos[b].x - cfg.irs_pos.x);
        const Eigen::MatrixXcd los =
            steering(N, arr) * steering(M, dep).adjoint();

        Stream st(seed, rng::stream_key(StreamKind::BsIrs, b));
        Eigen::MatrixXcd nlos(N, M);
        for (int m = 0; m < M; ++m)        // column-major draw order
            for (int n = 0; n < N; ++n) nlos(n, m) = st.next_cnormal();

        const double kr = cfg.rician_k;
        out.bs_irs.push_back(std::sqrt(pl) *
                             (std::sqrt(kr / (1.0 + kr)) * los +
                              std::sqrt(1.0 / (1.0 + kr)) * nlos));
    }

    // Direct BS -> user links: Rayleigh.
    out.direct.resize(static_cast<std::size_t>(B) * K);
    for (int i = 0; i < B; ++i) {
        for (int j = 0; j < K; ++j) {
            const auto [b, k] = cfg.user_of_index(j);
            const double d = distance(cfg.bs_pos[i], cfg.user_pos[b][k]);
            const double pl =
                path_loss(d, cfg.exp_bs_user, cfg.c0_db, cfg.d0);
            // Keyed by (bs, cell, in-cell user) so the stream does not
            // depend on how many users earlier cells hold.
            Stream st(seed, rng::stream_key(StreamKind::Direct, i, b, k));
            Eigen::VectorXcd h(M);
            for (int m = 0; m < M; ++m)
                h(m) = std::sqrt(pl) * st.next_cnormal();
            out.direct[static_cast<std::size_t>(i) * K + j] = std::move(h);
        }
    }

    // IRS -> user links: Rayleigh.
    out.irs_user.resize(K);
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        const double d = distance(cfg.irs_pos, cfg.user_pos[b][k]);
        const double pl = path_loss(d, cfg.exp_irs_user, cfg.c0_db, cfg.d0);
        Stream st(seed, rng::stream_key(StreamKind::IrsUser, b, k));
        Eigen::VectorXcd f(N);
        for (int n = 0; n < N; ++n) f(n) = std::sqrt(pl) * st.next_cnormal();
        out.irs_user[j] = std::move(f);
    }

    return out;
}

CompositeChannels composite(const SystemConfig& cfg, const ChannelSet& ch) {
    const int B = cfg.num_bs, K = cfg.total_users();
    CompositeChannels out;
    out.phi.resize(static_cast<std::size_t>(B) * K);
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < K; ++j)
            out.phi[static_cast<std::size_t>(i) * K + j] =
                ch.irs_user[j].conjugate().asDiagonal() * ch.bs_irs[i];
    return out;
}

std::vector<Eigen::VectorXcd> effective_channels(
    const SystemConfig& cfg, const ChannelSet& ch,
    const CompositeChannels& comp, const Eigen::VectorXcd& v) {
    const int B = cfg.num_bs, K = cfg.total_users();
    std::vector<Eigen::VectorXcd> a(static_cast<std::size_t>(B) * K);
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < K; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * K + j;
            a[idx] = comp.phi[idx].adjoint() * v + ch.direct[idx];
        }
    return a;
}

}  // namespace irsbf::model
