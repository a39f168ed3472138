// SPDX-License-Identifier: Apache-2.0
#include "irsbf/inexact_ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include "irsbf/conic.hpp"
#include "irsbf/kernels.hpp"
#include "tx_detail.hpp"

namespace irsbf::inexact_ao {
namespace {

using model::SystemConfig;
using metrics::TxBeams;

// Gradient of the desired-signal quadratic |c^H v + d|^2 with respect to
// conj(v):  C v0 + u = c (c^H v0) + u.
Eigen::VectorXcd own_gradient(const metrics::QuadForms& qf, std::size_t own,
                              const metrics::ReflectVector& v0) {
    return qf.c[own] * qf.c[own].dot(v0) + qf.u[own];
}

}  // namespace

P4Result solve_p4(const model::SystemConfig& cfg,
                  const std::vector<Eigen::VectorXcd>& a,
                  const metrics::TxBeams& w_prev, double t_prev) {
    const int B = cfg.num_bs;
    const int M = cfg.num_antennas;
    const int K = cfg.total_users();
    const double sigma = txdetail::sigma_of(cfg);
    const std::vector<Eigen::VectorXcd> as = txdetail::noise_scaled(cfg, a);

    conic::ProgramBuilder pb(2 * M * K + 1);
    std::vector<int> off(K);
    for (int j = 0; j < K; ++j)
        off[j] = pb.add_complex_var("w" + std::to_string(j), M);
    const int xi = pb.add_real_var("xi");
    pb.set_objective(xi, -1.0);  // maximize the uniform slack

    // Rotation convention on the desired links.
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        (void)k;
        const Eigen::VectorXcd& q = as[static_cast<std::size_t>(b) * K + j];
        double rho = 1.0;
        for (int m = 0; m < M; ++m)
            rho = std::max({rho, std::abs(q(m).real()), std::abs(q(m).imag())});
        const int e = pb.begin_equality(0.0);
        for (int m = 0; m < M; ++m) {
            pb.eq_coeff(e, off[j] + m, -q(m).imag() / rho);
            pb.eq_coeff(e, off[j] + M + m, q(m).real() / rho);
        }
    }

    // Per-user slack cone: Re(a_own^H w_own) - xi >=
    // sqrt(alpha t_prev) || [cross links; sigma'] ||.
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        (void)k;
        const double sc =
            std::sqrt(metrics::weight_of(cfg, j) * std::max(t_prev, 0.0));
        const Eigen::VectorXcd& own = as[static_cast<std::size_t>(b) * K + j];

        double rho = 1.0;  // also covers the unit xi coefficient
        for (int m = 0; m < M; ++m)
            rho = std::max({rho, std::abs(own(m).real()),
                            std::abs(own(m).imag())});
        for (int jj = 0; jj < K; ++jj) {
            if (jj == j) continue;
            const auto [i, u] = cfg.user_of_index(jj);
            (void)u;
            const Eigen::VectorXcd& q = as[static_cast<std::size_t>(i) * K + j];
            for (int m = 0; m < M; ++m)
                rho = std::max({rho, sc * std::abs(q(m).real()),
                                sc * std::abs(q(m).imag())});
        }

        const int r0 = pb.begin_soc_block(2 * K);
        pb.coeff_inner_re(r0, off[j], own, -1.0 / rho);
        pb.coeff(r0, xi, 1.0 / rho);
        int r = r0 + 1;
        for (int jj = 0; jj < K; ++jj) {
            if (jj == j) continue;
            const auto [i, u] = cfg.user_of_index(jj);
            (void)u;
            const Eigen::VectorXcd& q = as[static_cast<std::size_t>(i) * K + j];
            pb.coeff_inner_re(r++, off[jj], q, -sc / rho);
            pb.coeff_inner_im(r++, off[jj], q, -sc / rho);
        }
        pb.set_h(r, sc / rho);  // sigma' = 1 scaled by sqrt(alpha t_prev)
    }

    for (int b = 0; b < B; ++b) {
        const double amp = std::sqrt(cfg.pmax_w[b]);
        const double rho = std::max(1.0, amp);
        const int r0 = pb.begin_soc_block(1 + 2 * M * cfg.users_per_cell[b]);
        pb.set_h(r0, amp / rho);
        int r = r0 + 1;
        for (int k = 0; k < cfg.users_per_cell[b]; ++k) {
            const int j = cfg.user_index(b, k);
            for (int m = 0; m < 2 * M; ++m)
                pb.coeff(r++, off[j] + m, -1.0 / rho);
        }
    }

    conic::ConicProgram prog = pb.take();
    conic::SolverOptions sopt;
    // The slack objective drives the iterates onto the cone boundary; the
    // second refinement pass keeps the dual residual converged there.
    sopt.refinement = 2;
    conic::ConicSolution sol = conic::solve(prog, sopt);

    P4Result res;
    if (sol.status != conic::SolveStatus::Optimal) {
        // (P4) is always feasible; anything else is a numerical failure.
        res.beams = w_prev;
        res.xi_star = 0.0;
        res.t_star = metrics::min_weighted_sinr_effective(cfg, a, w_prev).value;
        res.solver_failure = true;
        return res;
    }

    TxBeams W;
    W.w.resize(B);
    for (int b = 0; b < B; ++b) {
        W.w[b] = Eigen::MatrixXcd(M, cfg.users_per_cell[b]);
        for (int k = 0; k < cfg.users_per_cell[b]; ++k) {
            const int j = cfg.user_index(b, k);
            W.w[b].col(k) = sol.complex_block(prog, "w" + std::to_string(j));
        }
    }
    txdetail::finalize_beams(cfg, a, W);

    res.xi_star = sol.real_var(prog, "xi") * sigma;
    const double t_new = metrics::min_weighted_sinr_effective(cfg, a, W).value;
    const double t_keep =
        metrics::min_weighted_sinr_effective(cfg, a, w_prev).value;
    if (t_new >= t_keep) {
        res.beams = std::move(W);
        res.t_star = t_new;
    } else {
        // Numerical safety net: the previous beams stay feasible for (P4)
        // with zero slack, so the step never moves downhill.
        res.beams = w_prev;
        res.t_star = t_keep;
    }
    return res;
}

double surrogate_F(const model::SystemConfig& cfg,
                   const metrics::QuadForms& qf,
                   const metrics::ReflectVector& v, double t, int b, int k) {
    const int K = cfg.total_users();
    const int j = cfg.user_index(b, k);
    double cross = 0.0;
    for (int jj = 0; jj < K; ++jj)
        if (jj != j) cross += metrics::link_power(qf, jj, j, v);
    return metrics::weight_of(cfg, j) * t * (cross + cfg.noise_w) -
           metrics::link_power(qf, j, j, v);
}

double surrogate_F_up(const model::SystemConfig& cfg,
                      const metrics::QuadForms& qf,
                      const metrics::ReflectVector& v, double t,
                      const metrics::ReflectVector& v0, int b, int k) {
    const int K = cfg.total_users();
    const int j = cfg.user_index(b, k);
    double cross = 0.0;
    for (int jj = 0; jj < K; ++jj)
        if (jj != j) cross += metrics::link_power(qf, jj, j, v);
    const std::size_t own = qf.link(j, j);
    const Eigen::VectorXcd g = own_gradient(qf, own, v0);
    const double tangent = metrics::link_power(qf, j, j, v0) +
                           2.0 * (g.dot(v) - g.dot(v0)).real();
    return metrics::weight_of(cfg, j) * t * (cross + cfg.noise_w) - tangent;
}

P51Result solve_p5_1(const model::SystemConfig& cfg,
                     const metrics::QuadForms& qf, double t_star,
                     const metrics::ReflectVector& v0) {
    const int K = cfg.total_users();
    const int N = qf.num_irs;
    const double inv_noise = 1.0 / cfg.noise_w;
    const double inv_sigma = 1.0 / txdetail::sigma_of(cfg);

    conic::ProgramBuilder pb(2 * N + 1);
    const int voff = pb.add_complex_var("v", N);
    const int z = pb.add_real_var("z");
    pb.set_objective(z, 1.0);

    // Per-user constraint F_up <= z in noise units, as
    //   alpha t sum_cross |c'^H v + d'|^2 <= rho(v, z),
    //   rho = z' - alpha t + own'(v0) + 2 Re(g'^H (v - v0)),
    // encoded division-free as || [2 y; rho - 1] || <= rho + 1 (or as a
    // plain affine row when t_star = 0 and the quadratic side vanishes).
    struct UserRow {
        double kappa = 0.0;               // alpha t
        double hconst = 0.0;              // constant part of rho
        Eigen::VectorXcd glin;            // 2 g' (rho's linear coefficient)
        std::vector<std::size_t> cross;   // ordered cross links
    };
    std::vector<UserRow> rows(K);
    for (int j = 0; j < K; ++j) {
        UserRow& ur = rows[j];
        ur.kappa = metrics::weight_of(cfg, j) * std::max(t_star, 0.0);
        const std::size_t own = qf.link(j, j);
        const Eigen::VectorXcd g = inv_noise * own_gradient(qf, own, v0);
        ur.glin = 2.0 * g;
        ur.hconst = -ur.kappa +
                    inv_noise * metrics::link_power(qf, j, j, v0) -
                    2.0 * g.dot(v0).real();
        for (int jj = 0; jj < K; ++jj)
            if (jj != j) ur.cross.push_back(qf.link(jj, j));
    }

    if (t_star <= 0.0) {
        for (const UserRow& ur : rows) {
            double rho = 1.0;
            for (int n = 0; n < N; ++n)
                rho = std::max({rho, std::abs(ur.glin(n).real()),
                                std::abs(ur.glin(n).imag())});
            rho = std::max(rho, std::abs(ur.hconst));
            const int row = pb.begin_orthant_row(ur.hconst / rho);
            pb.coeff(row, z, -1.0 / rho);
            pb.coeff_inner_re(row, voff, ur.glin, -1.0 / rho);
        }
    } else {
        for (const UserRow& ur : rows) {
            const double sc = std::sqrt(ur.kappa);
            double rho = 1.0;
            rho = std::max(rho, std::abs(ur.hconst + 1.0));
            rho = std::max(rho, std::abs(ur.hconst - 1.0));
            for (int n = 0; n < N; ++n)
                rho = std::max({rho, std::abs(ur.glin(n).real()),
                                std::abs(ur.glin(n).imag())});
            for (std::size_t link : ur.cross) {
                const std::complex<double> d = inv_sigma * qf.d[link];
                rho = std::max({rho, 2.0 * sc * std::abs(d.real()),
                                2.0 * sc * std::abs(d.imag())});
                for (int n = 0; n < N; ++n) {
                    const std::complex<double> c = inv_sigma * qf.c[link](n);
                    rho = std::max({rho, 2.0 * sc * std::abs(c.real()),
                                    2.0 * sc * std::abs(c.imag())});
                }
            }

            const int r0 = pb.begin_soc_block(2 * K);
            // Head: rho(v, z) + 1.
            pb.set_h(r0, (ur.hconst + 1.0) / rho);
            pb.coeff(r0, z, -1.0 / rho);
            pb.coeff_inner_re(r0, voff, ur.glin, -1.0 / rho);
            int r = r0 + 1;
            for (std::size_t link : ur.cross) {
                const Eigen::VectorXcd c = inv_sigma * qf.c[link];
                const std::complex<double> d = inv_sigma * qf.d[link];
                // Re/Im of v^H c + d; Im(v^H c) = -Im(c^H v) flips the
                // inner-product sign (it matters here because of the
                // affine offset d).
                pb.set_h(r, 2.0 * sc * d.real() / rho);
                pb.coeff_inner_re(r++, voff, c, -2.0 * sc / rho);
                pb.set_h(r, 2.0 * sc * d.imag() / rho);
                pb.coeff_inner_im(r++, voff, c, 2.0 * sc / rho);
            }
            // Tail end: rho(v, z) - 1.
            pb.set_h(r, (ur.hconst - 1.0) / rho);
            pb.coeff(r, z, -1.0 / rho);
            pb.coeff_inner_re(r, voff, ur.glin, -1.0 / rho);
        }
    }

    for (int n = 0; n < N; ++n) {
        const int r0 = pb.begin_soc_block(3);
        pb.set_h(r0, 1.0);
        pb.coeff(r0 + 1, voff + n, -1.0);
        pb.coeff(r0 + 2, voff + N + n, -1.0);
    }

    conic::ConicProgram prog = pb.take();
    conic::SolverOptions sopt;
    sopt.refinement = 2;  // see solve_p4
    conic::ConicSolution sol = conic::solve(prog, sopt);

    // Certificate of the point v: max_j F_up(v); at v0 the tangency makes
    // this max_j F(v0).
    const auto cert_at = [&](const metrics::ReflectVector& v) {
        double zmax = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < K; ++j) {
            const auto [b, k] = cfg.user_of_index(j);
            zmax = std::max(zmax,
                            surrogate_F_up(cfg, qf, v, t_star, v0, b, k));
        }
        return zmax;
    };

    P51Result res;
    if (sol.status != conic::SolveStatus::Optimal) {
        res.v = v0;
        res.z_star = cert_at(v0);
        res.solver_failure = true;
        return res;
    }

    metrics::ReflectVector v = sol.complex_block(prog, "v");
    kernels::project_unit_disk(v.data(), static_cast<std::size_t>(N));

    // Numerical safety net mirroring solve_p4: v0 achieves max F <= 0, so
    // the step never moves downhill.  The certificate always describes the
    // returned point.
    const double before = metrics::min_weighted_sinr_value(cfg, qf, v0);
    const double after = metrics::min_weighted_sinr_value(cfg, qf, v);
    if (after >= before) {
        res.z_star = sol.real_var(prog, "z") * cfg.noise_w;
        res.v = std::move(v);
    } else {
        res.z_star = cert_at(v0);
        res.v = v0;
    }
    return res;
}

report::SolveReport run_inexact_ao(const model::SystemConfig& cfg,
                                   const model::ChannelSet& ch,
                                   const model::CompositeChannels& comp,
                                   const metrics::ReflectVector& init_v,
                                   const InexactAoOptions& opts) {
    const auto t_begin = std::chrono::steady_clock::now();
    report::SolveReport rep;
    rep.algorithm = "inexact_ao";

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
        const P4Result p4 = solve_p4(cfg, a, W, t);
        W = p4.beams;

        const metrics::QuadForms qf = metrics::quad_forms(cfg, ch, comp, W);
        const double t_mid = metrics::min_weighted_sinr_value(cfg, qf, v);
        const P51Result p51 = solve_p5_1(cfg, qf, t_mid, v);
        metrics::ReflectVector v_next = p51.v;
        if (opts.unit_amplitude)
            kernels::phase_only(v_next.data(),
                                static_cast<std::size_t>(v_next.size()));
        const double t_next = metrics::min_weighted_sinr_value(cfg, qf, v_next);
        const bool failed = p4.solver_failure || p51.solver_failure;

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

}  // namespace irsbf::inexact_ao
