// SPDX-License-Identifier: Apache-2.0
//
// Benchmark schemes: closed-form maximum-ratio and zero-forcing beams,
// random unit-modulus reflection, the no-surface baseline, and the
// unit-amplitude wrapper around the optimizing algorithms.

#include "irsbf/bench.hpp"

#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "irsbf/exact_ao.hpp"
#include "irsbf/inexact_ao.hpp"
#include "irsbf/lowcx_ao.hpp"
#include "irsbf/rng.hpp"
#include "tx_detail.hpp"

namespace irsbf::bench {

namespace {

using cxd = std::complex<double>;

// Nearest representable unit-modulus value: divide by the computed modulus
// until |z| rounds to exactly 1 (at most a few corrections; typically one).
cxd to_unit(cxd z) {
    for (int k = 0; k < 4 && std::abs(z) != 1.0; ++k) z /= std::abs(z);
    return z;
}

}  // namespace

MrtResult mrt_beams(const model::SystemConfig& cfg,
                    const std::vector<Eigen::VectorXcd>& a) {
    MrtResult res;
    res.beams = txdetail::mrt_witness(cfg, a);
    const int K = cfg.total_users();
    for (int b = 0; b < cfg.num_bs; ++b)
        for (int k = 0; k < cfg.users_per_cell[b]; ++k) {
            const int j = cfg.user_index(b, k);
            if (a[static_cast<std::size_t>(b) * K + j].norm() == 0.0)
                res.degenerate_users.push_back(j);
        }
    return res;
}

ZfResult zf_beams(const model::SystemConfig& cfg,
                  const std::vector<Eigen::VectorXcd>& a) {
    ZfResult res;
    for (int b = 0; b < cfg.num_bs; ++b)
        if (cfg.users_per_cell[b] != 1) {
            res.applicable = false;
            res.detail = "zero-forcing comparison requires one user per cell";
            return res;
        }
    const int B = cfg.num_bs;
    const int M = cfg.num_antennas;
    if (M < B) {
        res.applicable = false;
        res.detail = "zero-forcing nulling needs at least as many antennas "
                     "as cells";
        return res;
    }

    res.beams.w.resize(B);
    for (int i = 0; i < B; ++i) {
        const Eigen::VectorXcd& own = a[static_cast<std::size_t>(i) * B + i];
        // Null toward every user served by the other cells.
        Eigen::VectorXcd dir;
        if (B == 1) {
            dir = own;
        } else {
            Eigen::MatrixXcd cross(M, B - 1);
            int col = 0;
            for (int j = 0; j < B; ++j)
                if (j != i)
                    cross.col(col++) = a[static_cast<std::size_t>(i) * B + j];
            Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cross);
            if (qr.rank() < B - 1) {
                res.applicable = false;
                res.detail = "cross channels of cell " + std::to_string(i) +
                             " are rank deficient";
                return res;
            }
            const Eigen::MatrixXcd q =
                qr.householderQ() * Eigen::MatrixXcd::Identity(M, B - 1);
            dir = own - q * (q.adjoint() * own);
        }
        if (dir.norm() <= 1e-8 * own.norm()) res.degenerate_cells.push_back(i);
        res.beams.w[i] = Eigen::MatrixXcd::Zero(M, 1);
        const double nrm = dir.norm();
        if (nrm > 0.0)
            res.beams.w[i].col(0) = (std::sqrt(cfg.pmax_w[i]) / nrm) * dir;
    }
    return res;
}

metrics::ReflectVector random_reflect(int n, std::uint64_t seed) {
    rng::Stream s(seed, rng::stream_key(rng::StreamKind::Scheme));
    metrics::ReflectVector v(n);
    for (int i = 0; i < n; ++i) {
        const double ph =
            6.283185307179586476925286766559 * s.next_uniform();
        v(i) = to_unit(cxd(std::cos(ph), std::sin(ph)));
    }
    return v;
}

NoIrsResult no_irs_solve(const model::SystemConfig& cfg,
                         const model::ChannelSet& ch, double tol_rel) {
    NoIrsResult res;
    exact_ao::TxbfResult tx =
        exact_ao::solve_txbf_effective(cfg, ch.direct, tol_rel);
    res.beams = std::move(tx.beams);
    res.t_star = tx.t_star;
    res.solver_failure = tx.solver_failure;
    res.detail = std::move(tx.detail);
    return res;
}

metrics::ReflectVector unit_amplitude_project(const metrics::ReflectVector& v) {
    metrics::ReflectVector out(v.size());
    for (int i = 0; i < v.size(); ++i)
        out(i) = (v(i) == cxd(0.0, 0.0)) ? cxd(1.0, 0.0) : to_unit(v(i));
    return out;
}

namespace {

// Alternation of closed-form transmit beams with the convex reflect
// half-step, stopping by the same rule as the bisection-based loop:
// improvement below eps, or an objective decrease (possible here because
// the closed-form beams are not max-min optimal).
template <typename BeamsFn>
SchemeRun run_closed_form_ao(const char* name, BeamsFn&& make_beams,
                             const model::SystemConfig& cfg,
                             const model::ChannelSet& ch,
                             const model::CompositeChannels& comp,
                             const BenchOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    SchemeRun run;
    run.rep.algorithm = name;
    run.rep.termination = report::Termination::MaxIters;

    metrics::ReflectVector v =
        metrics::ReflectVector::Ones(cfg.num_irs);
    double obj_prev = 0.0;
    bool have_prev = false;
    double best_obj = -std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iters; ++it) {
        const auto a = model::effective_channels(cfg, ch, comp, v);
        metrics::TxBeams W;
        if (!make_beams(a, W, run)) return run;  // typed inapplicability

        const metrics::QuadForms qf = metrics::quad_forms(cfg, ch, comp, W);
        const double t_mid = metrics::min_weighted_sinr_value(cfg, qf, v);

        const inexact_ao::P51Result p51 =
            inexact_ao::solve_p5_1(cfg, qf, t_mid, v);
        if (p51.solver_failure) {
            run.rep.termination = report::Termination::SolverFailure;
            run.rep.detail = "reflect half-step failed";
            break;
        }
        metrics::ReflectVector v_next = p51.v;
        const double obj = metrics::min_weighted_sinr_value(cfg, qf, v_next);

        run.rep.trace.push_back(obj);
        run.rep.iterations = it;
        if (obj > best_obj) {
            best_obj = obj;
            run.rep.beams = W;
            run.rep.v = v_next;
            run.rep.objective = obj;
        }

        if (obj == t_mid) {
            run.rep.termination = report::Termination::Converged;
            break;
        }
        if (have_prev) {
            if (obj < obj_prev * (1.0 - 1e-9)) {
                run.rep.termination = report::Termination::ObjectiveDecreased;
                break;
            }
            if (obj - obj_prev <= opts.eps * std::max(obj_prev, 0.0)) {
                run.rep.termination = report::Termination::Converged;
                break;
            }
        }
        obj_prev = obj;
        have_prev = true;
        v = std::move(v_next);
    }

    run.rep.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return run;
}

// Report plumbing shared by the one-shot schemes (fixed reflect vector,
// single transmit solve): the reported objective is the achieved min
// weighted SINR of the returned beams, not the bisection bracket.
SchemeRun finish_one_shot(const char* name, const model::SystemConfig& cfg,
                          const std::vector<Eigen::VectorXcd>& a,
                          metrics::ReflectVector v, metrics::TxBeams beams,
                          bool solver_failure, std::string detail,
                          std::chrono::steady_clock::time_point t0) {
    SchemeRun run;
    run.rep.algorithm = name;
    run.rep.v = std::move(v);
    run.rep.iterations = 1;
    if (solver_failure) {
        run.rep.termination = report::Termination::SolverFailure;
        run.rep.detail = std::move(detail);
    } else {
        run.rep.beams = std::move(beams);
        run.rep.objective =
            metrics::min_weighted_sinr_effective(cfg, a, run.rep.beams).value;
        run.rep.trace.push_back(run.rep.objective);
        run.rep.termination = report::Termination::Converged;
    }
    run.rep.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return run;
}

}  // namespace

SchemeRun run_scheme(const Scheme& scheme, const model::SystemConfig& cfg,
                     const model::ChannelSet& ch,
                     const model::CompositeChannels& comp, std::uint64_t seed,
                     const BenchOptions& opts) {
    switch (scheme.id) {
        case SchemeId::AoMrt:
            return run_closed_form_ao(
                "ao_mrt",
                [&](const std::vector<Eigen::VectorXcd>& a,
                    metrics::TxBeams& W, SchemeRun&) {
                    W = mrt_beams(cfg, a).beams;
                    return true;
                },
                cfg, ch, comp, opts);

        case SchemeId::AoZf:
            return run_closed_form_ao(
                "ao_zf",
                [&](const std::vector<Eigen::VectorXcd>& a,
                    metrics::TxBeams& W, SchemeRun& run) {
                    ZfResult zf = zf_beams(cfg, a);
                    if (!zf.applicable) {
                        run.applicable = false;
                        run.inapplicable_reason = std::move(zf.detail);
                        return false;
                    }
                    W = std::move(zf.beams);
                    return true;
                },
                cfg, ch, comp, opts);

        case SchemeId::RandomReflect: {
            const auto t0 = std::chrono::steady_clock::now();
            metrics::ReflectVector v = random_reflect(cfg.num_irs, seed);
            const auto a = model::effective_channels(cfg, ch, comp, v);
            exact_ao::TxbfResult tx =
                exact_ao::solve_txbf_effective(cfg, a, opts.bisect_tol);
            return finish_one_shot("random_reflect", cfg, a, std::move(v),
                                   std::move(tx.beams), tx.solver_failure,
                                   std::move(tx.detail), t0);
        }

        case SchemeId::NoIrs: {
            const auto t0 = std::chrono::steady_clock::now();
            NoIrsResult nr = no_irs_solve(cfg, ch, opts.bisect_tol);
            return finish_one_shot(
                "no_irs", cfg, ch.direct,
                metrics::ReflectVector::Zero(cfg.num_irs),
                std::move(nr.beams), nr.solver_failure, std::move(nr.detail),
                t0);
        }

        case SchemeId::UnitAmplitudeWrap: {
            SchemeRun run;
            const metrics::ReflectVector v0 =
                metrics::ReflectVector::Ones(cfg.num_irs);
            if (scheme.inner == "alg1") {
                exact_ao::ExactAoOptions eopts;
                eopts.eps = opts.eps;
                eopts.max_iters = opts.max_iters;
                eopts.bisect_tol = opts.bisect_tol;
                eopts.unit_amplitude = true;
                rng::Stream stream(
                    seed, rng::stream_key(rng::StreamKind::Randomize));
                run.rep =
                    exact_ao::run_exact_ao(cfg, ch, comp, v0, eopts, stream);
            } else if (scheme.inner == "alg2") {
                inexact_ao::InexactAoOptions iopts;
                iopts.eps = opts.eps;
                iopts.max_iters = opts.max_iters;
                iopts.unit_amplitude = true;
                run.rep = inexact_ao::run_inexact_ao(cfg, ch, comp, v0, iopts);
            } else if (scheme.inner == "alg3") {
                lowcx_ao::LowcxAoOptions lopts;
                lopts.eps = opts.eps;
                lopts.max_iters = opts.max_iters;
                lopts.gamma = opts.gamma;
                lopts.T = opts.T;
                lopts.unit_amplitude = true;
                run.rep = lowcx_ao::run_lowcx_ao(cfg, ch, comp, v0, lopts);
            } else {
                run.applicable = false;
                run.inapplicable_reason =
                    "unknown inner algorithm '" + scheme.inner + "'";
                return run;
            }
            run.rep.algorithm = "unit_amp:" + scheme.inner;
            return run;
        }
    }
    SchemeRun run;
    run.applicable = false;
    run.inapplicable_reason = "unknown scheme";
    return run;
}

}  // namespace irsbf::bench
