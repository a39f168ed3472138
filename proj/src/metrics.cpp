// SPDX-License-Identifier: Apache-2.0

#include "irsbf/metrics.hpp"

#include <cmath>
#include <limits>

#include "irsbf/kernels.hpp"

namespace irsbf::metrics {

double weight_of(const model::SystemConfig& cfg, int j) {
    const auto [b, k] = cfg.user_of_index(j);
    return cfg.weights[b][k];
}

QuadForms quad_forms(const model::SystemConfig& cfg,
                     const model::ChannelSet& ch,
                     const model::CompositeChannels& comp, const TxBeams& W) {
    const int B = cfg.num_bs, K = cfg.total_users();
    QuadForms qf;
    qf.num_irs = cfg.num_irs;
    qf.num_users = K;
    qf.c.resize(static_cast<std::size_t>(K) * K);
    qf.u.resize(static_cast<std::size_t>(K) * K);
    qf.d.resize(static_cast<std::size_t>(K) * K);
    for (int i = 0; i < B; ++i) {
        for (int u = 0; u < cfg.users_per_cell[i]; ++u) {
            const int tx = cfg.user_index(i, u);
            const Eigen::VectorXcd w = W.w[i].col(u);
            for (int rx = 0; rx < K; ++rx) {
                const std::size_t l = qf.link(tx, rx);
                const std::size_t il = static_cast<std::size_t>(i) * K + rx;
                qf.c[l] = comp.phi[il] * w;
                qf.d[l] = ch.direct[il].adjoint() * w;
                qf.u[l] = qf.c[l] * std::conj(qf.d[l]);
            }
        }
    }
    return qf;
}

LiftedForms lifted_forms(const QuadForms& qf) {
    const int K = qf.num_users, N = qf.num_irs;
    LiftedForms lf;
    lf.order = N + 1;
    lf.num_users = K;
    lf.R.resize(static_cast<std::size_t>(K) * K);
    lf.dsq.resize(static_cast<std::size_t>(K) * K);
    for (std::size_t l = 0; l < lf.R.size(); ++l) {
        Eigen::MatrixXcd R(N + 1, N + 1);
        R.topLeftCorner(N, N).noalias() = qf.c[l] * qf.c[l].adjoint();
        R.topRightCorner(N, 1) = qf.u[l];
        R.bottomLeftCorner(1, N) = qf.u[l].adjoint();
        R(N, N) = 0.0;
        lf.R[l] = std::move(R);
        lf.dsq[l] = std::norm(qf.d[l]);
    }
    return lf;
}

double link_power(const QuadForms& qf, int tx, int rx,
                  const ReflectVector& v) {
    const std::size_t l = qf.link(tx, rx);
    return kernels::quad_eval(qf.c[l].data(), qf.u[l].data(),
                              std::norm(qf.d[l]), v.data(), qf.num_irs);
}

Eigen::VectorXd sinr_all(const model::SystemConfig& cfg, const QuadForms& qf,
                         const ReflectVector& v) {
    const int K = qf.num_users;
    Eigen::VectorXd out(K);
    for (int rx = 0; rx < K; ++rx) {
        double desired = 0.0, interf = 0.0;
        for (int tx = 0; tx < K; ++tx) {
            const double p = link_power(qf, tx, rx, v);
            if (tx == rx)
                desired = p;
            else
                interf += p;
        }
        out(rx) = desired / (interf + cfg.noise_w);
    }
    return out;
}

Eigen::VectorXd sinr_all_effective(const model::SystemConfig& cfg,
                                   const std::vector<Eigen::VectorXcd>& a,
                                   const TxBeams& W) {
    const int B = cfg.num_bs, K = cfg.total_users();
    Eigen::VectorXd out(K);
    for (int rx = 0; rx < K; ++rx) {
        const auto [rb, rk] = cfg.user_of_index(rx);
        double desired = 0.0, interf = 0.0;
        for (int i = 0; i < B; ++i) {
            const Eigen::VectorXcd& ai = a[static_cast<std::size_t>(i) * K +
                                           rx];
            for (int u = 0; u < cfg.users_per_cell[i]; ++u) {
                const cxd g = ai.adjoint() * W.w[i].col(u);
                const double p = std::norm(g);
                if (i == rb && u == rk)
                    desired = p;
                else
                    interf += p;
            }
        }
        out(rx) = desired / (interf + cfg.noise_w);
    }
    return out;
}

MinResult argmin_from_weighted(const std::vector<double>& weighted) {
    MinResult res;
    res.value = std::numeric_limits<double>::infinity();
    for (double w : weighted) res.value = std::min(res.value, w);
    const double tol = 1e-12 * std::max(1.0, std::abs(res.value));
    for (int j = 0; j < static_cast<int>(weighted.size()); ++j)
        if (weighted[j] <= res.value + tol) res.argmin.push_back(j);
    return res;
}

namespace {
MinResult min_from_sinr(const model::SystemConfig& cfg,
                        const Eigen::VectorXd& sinr) {
    std::vector<double> weighted(sinr.size());
    for (int j = 0; j < sinr.size(); ++j)
        weighted[j] = sinr(j) / weight_of(cfg, j);
    return argmin_from_weighted(weighted);
}
}  // namespace

MinResult min_weighted_sinr(const model::SystemConfig& cfg,
                            const QuadForms& qf, const ReflectVector& v) {
    return min_from_sinr(cfg, sinr_all(cfg, qf, v));
}

MinResult min_weighted_sinr_effective(
    const model::SystemConfig& cfg, const std::vector<Eigen::VectorXcd>& a,
    const TxBeams& W) {
    return min_from_sinr(cfg, sinr_all_effective(cfg, a, W));
}

double min_weighted_sinr_value(const model::SystemConfig& cfg,
                               const QuadForms& qf, const ReflectVector& v) {
    const int K = qf.num_users;
    const int N = qf.num_irs;
    double best = std::numeric_limits<double>::infinity();
    for (int rx = 0; rx < K; ++rx) {
        double desired = 0.0, interf = 0.0;
        for (int tx = 0; tx < K; ++tx) {
            const std::size_t l = qf.link(tx, rx);
            const double p =
                kernels::quad_eval(qf.c[l].data(), qf.u[l].data(),
                                   std::norm(qf.d[l]), v.data(), N);
            if (tx == rx)
                desired = p;
            else
                interf += p;
        }
        const double w =
            desired / (interf + cfg.noise_w) / weight_of(cfg, rx);
        best = std::min(best, w);
    }
    return best;
}

double evaluate(const model::SystemConfig& cfg, const model::ChannelSet& ch,
                const model::CompositeChannels& comp, const TxBeams& W,
                const ReflectVector& v) {
    const auto a = model::effective_channels(cfg, ch, comp, v);
    return min_weighted_sinr_effective(cfg, a, W).value;
}

}  // namespace irsbf::metrics
