// SPDX-License-Identifier: Apache-2.0
//
// Transmit/reflect variables and SINR-style figures of merit.
//
// For fixed transmit beams the power a user j receives from the beam of
// user j' is a quadratic in the reflect vector v:
//   |a^H w|^2 = |c^H v + d|^2 = v^H (c c^H) v + 2 Re(v^H u) + |d|^2,
// with c = Phi w, d = h^H w, u = c * conj(d).  QuadForms caches (c, u, d)
// per ordered link; LiftedForms holds the homogenized (N+1) x (N+1) forms
//   R = [[c c^H, u], [u^H, 0]],   vbar = [v; 1],
// so that vbar^H R vbar + |d|^2 equals the same power.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "irsbf/model.hpp"

namespace irsbf::metrics {

using cxd = std::complex<double>;

// Per-BS transmit beams; w[b] is M x K_b, one column per served user.
struct TxBeams {
    std::vector<Eigen::MatrixXcd> w;

    const Eigen::MatrixXcd& at(int b) const { return w[b]; }
    // ||W_b||_F^2, the radiated power of BS b.
    double power(int b) const { return w[b].squaredNorm(); }
};

using ReflectVector = Eigen::VectorXcd;

// Cached rank-one quadratic forms, one per ordered (transmit user, receive
// user) pair; flat index tx * K + rx.
struct QuadForms {
    int num_irs = 0;
    int num_users = 0;
    std::vector<Eigen::VectorXcd> c;  // length N each
    std::vector<Eigen::VectorXcd> u;  // length N each
    std::vector<cxd> d;

    std::size_t link(int tx, int rx) const {
        return static_cast<std::size_t>(tx) * num_users + rx;
    }
};

struct LiftedForms {
    int order = 0;  // N + 1
    int num_users = 0;
    std::vector<Eigen::MatrixXcd> R;  // order x order, Hermitian
    std::vector<double> dsq;

    std::size_t link(int tx, int rx) const {
        return static_cast<std::size_t>(tx) * num_users + rx;
    }
};

// Objective value together with the set of users attaining it.
struct MinResult {
    double value = 0.0;
    std::vector<int> argmin;  // global user indices, ascending
};

// SINR weight of global user j.
double weight_of(const model::SystemConfig& cfg, int j);

QuadForms quad_forms(const model::SystemConfig& cfg,
                     const model::ChannelSet& ch,
                     const model::CompositeChannels& comp, const TxBeams& W);

LiftedForms lifted_forms(const QuadForms& qf);

// |c^H v + d|^2 for one ordered link.
double link_power(const QuadForms& qf, int tx, int rx,
                  const ReflectVector& v);

// SINR of every user, from cached quadratic forms (W baked in).
Eigen::VectorXd sinr_all(const model::SystemConfig& cfg, const QuadForms& qf,
                         const ReflectVector& v);

// SINR of every user from effective channels a[i*K+j] (v baked in).
Eigen::VectorXd sinr_all_effective(const model::SystemConfig& cfg,
                                   const std::vector<Eigen::VectorXcd>& a,
                                   const TxBeams& W);

// min_j SINR_j / alpha_j with the argmin set (ties within 1e-12 relative).
MinResult min_weighted_sinr(const model::SystemConfig& cfg,
                            const QuadForms& qf, const ReflectVector& v);
MinResult min_weighted_sinr_effective(const model::SystemConfig& cfg,
                                      const std::vector<Eigen::VectorXcd>& a,
                                      const TxBeams& W);

// Fast path used by randomization scoring: objective value only.
double min_weighted_sinr_value(const model::SystemConfig& cfg,
                               const QuadForms& qf, const ReflectVector& v);

// End-to-end convenience: sample nothing, evaluate min weighted SINR of
// (W, v) against the given channels.
double evaluate(const model::SystemConfig& cfg, const model::ChannelSet& ch,
                const model::CompositeChannels& comp, const TxBeams& W,
                const ReflectVector& v);

MinResult argmin_from_weighted(const std::vector<double>& weighted);

}  // namespace irsbf::metrics
