// SPDX-License-Identifier: Apache-2.0
#include "irsbf/lowcx_ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "irsbf/inexact_ao.hpp"
#include "irsbf/kernels.hpp"
#include "tx_detail.hpp"

namespace irsbf::lowcx_ao {
namespace {

using cxd = std::complex<double>;

// Gradient of the active user's majorant, complex form as documented on
// subgrad().  All link data enters through rank-one products only, via the
// dispatch kernels (this is the hot loop of the low-complexity half-step).
Eigen::VectorXcd grad_of_user(const model::SystemConfig& cfg,
                              const metrics::QuadForms& qf,
                              const metrics::ReflectVector& v, double t,
                              const metrics::ReflectVector& v0, int j) {
    const int K = cfg.total_users();
    const auto n = static_cast<std::size_t>(qf.num_irs);
    const double kappa = metrics::weight_of(cfg, j) * t;
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(qf.num_irs);
    for (int jj = 0; jj < K; ++jj) {
        if (jj == j) continue;
        const std::size_t l = qf.link(jj, j);
        const cxd chv = kernels::cdot(qf.c[l].data(), v.data(), n);  // c^H v
        kernels::axpy(2.0 * kappa * chv, qf.c[l].data(), g.data(), n);
        kernels::axpy(cxd(2.0 * kappa, 0.0), qf.u[l].data(), g.data(), n);
    }
    const std::size_t own = qf.link(j, j);
    const cxd chv0 = kernels::cdot(qf.c[own].data(), v0.data(), n);
    kernels::axpy(-2.0 * chv0, qf.c[own].data(), g.data(), n);
    kernels::axpy(cxd(-2.0, 0.0), qf.u[own].data(), g.data(), n);
    return g;
}

}  // namespace

GValue objective_G(const model::SystemConfig& cfg,
                   const metrics::QuadForms& qf,
                   const metrics::ReflectVector& v, double t,
                   const metrics::ReflectVector& v0) {
    const int K = cfg.total_users();
    GValue best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        const double f = inexact_ao::surrogate_F_up(cfg, qf, v, t, v0, b, k);
        if (f > best.value) {
            best.value = f;
            best.active_user = j;
        }
    }
    return best;
}

Eigen::VectorXcd subgrad(const model::SystemConfig& cfg,
                         const metrics::QuadForms& qf,
                         const metrics::ReflectVector& v, double t,
                         const metrics::ReflectVector& v0) {
    const GValue g = objective_G(cfg, qf, v, t, v0);
    return grad_of_user(cfg, qf, v, t, v0, g.active_user);
}

metrics::ReflectVector project_unit_disk(const Eigen::VectorXcd& x) {
    metrics::ReflectVector out = x;
    kernels::project_unit_disk(out.data(), static_cast<std::size_t>(out.size()));
    return out;
}

SubgradResult subgrad_descend(const model::SystemConfig& cfg,
                              const metrics::QuadForms& qf, double t,
                              const metrics::ReflectVector& v0, double gamma,
                              int T,
                              std::vector<metrics::ReflectVector>* path) {
    SubgradResult res;
    res.v_best = v0;
    res.steps = 0;
    if (path) {
        path->clear();
        path->push_back(v0);
    }

    metrics::ReflectVector v = v0;
    GValue cur = objective_G(cfg, qf, v, t, v0);
    res.g_best = cur.value;

    for (int k = 1; k <= T; ++k) {
        const Eigen::VectorXcd g =
            grad_of_user(cfg, qf, v, t, v0, cur.active_user);
        const double gn = g.norm();
        if (gn == 0.0) break;  // stationary for the active majorant
        v -= (gamma / gn) * g;
        kernels::project_unit_disk(v.data(), static_cast<std::size_t>(v.size()));
        res.steps = k;
        if (path) path->push_back(v);
        cur = objective_G(cfg, qf, v, t, v0);
        if (cur.value < res.g_best) {
            res.g_best = cur.value;
            res.v_best = v;
        }
    }
    return res;
}

report::SolveReport run_lowcx_ao(const model::SystemConfig& cfg,
                                 const model::ChannelSet& ch,
                                 const model::CompositeChannels& comp,
                                 const metrics::ReflectVector& init_v,
                                 const LowcxAoOptions& opts) {
    const auto t_begin = std::chrono::steady_clock::now();
    report::SolveReport rep;
    rep.algorithm = "lowcx_ao";

    metrics::ReflectVector v = init_v;
    std::vector<Eigen::VectorXcd> a = model::effective_channels(cfg, ch, comp, v);
    metrics::TxBeams W = txdetail::mrt_witness(cfg, a);
    double t = metrics::min_weighted_sinr_effective(cfg, a, W).value;

    rep.trace.push_back(t);
    rep.beams = W;
    rep.v = v;
    rep.objective = t;
    rep.termination = report::Termination::MaxIters;

    for (int it = 1; it <= opts.max_iters; ++it) {
        const inexact_ao::P4Result p4 = inexact_ao::solve_p4(cfg, a, W, t);
        W = p4.beams;

        const metrics::QuadForms qf = metrics::quad_forms(cfg, ch, comp, W);
        const double t_mid = metrics::min_weighted_sinr_value(cfg, qf, v);
        const SubgradResult sg =
            subgrad_descend(cfg, qf, t_mid, v, opts.gamma, opts.T);
        metrics::ReflectVector v_next = sg.v_best;
        if (opts.unit_amplitude)
            kernels::phase_only(v_next.data(),
                                static_cast<std::size_t>(v_next.size()));
        const double t_next = metrics::min_weighted_sinr_value(cfg, qf, v_next);
        const bool failed = p4.solver_failure;

        rep.trace.push_back(t_next);
        rep.iterations = it;
        if (t_next > rep.objective) {
            rep.objective = t_next;
            rep.beams = W;
            rep.v = v_next;
        }

        if (t_next - t <= opts.eps * std::max(t, 0.0)) {
            if (t_next < t - 1e-8 * (1.0 + t)) {
                rep.termination = report::Termination::ObjectiveDecreased;
            } else if (failed) {
                rep.termination = report::Termination::SolverFailure;
                rep.detail = "sub-step solver failure in the final iteration";
            } else {
                rep.termination = report::Termination::Converged;
            }
            break;
        }
        t = t_next;
        v = std::move(v_next);
        a = model::effective_channels(cfg, ch, comp, v);
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t_begin)
                      .count();
    return rep;
}

}  // namespace irsbf::lowcx_ao
