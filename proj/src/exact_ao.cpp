// SPDX-License-Identifier: Apache-2.0

#include "irsbf/exact_ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

#include "irsbf/conic.hpp"
#include "irsbf/kernels.hpp"
#include "tx_detail.hpp"

namespace irsbf::exact_ao {
namespace {

using model::SystemConfig;
using metrics::TxBeams;

constexpr int kMaxProbes = 64;

// Solver settings for the feasibility probes.  The lifted matrix of the
// reflect step is exposed to callers with tight invariants (diagonal caps,
// unit homogenization entry, near-PSD spectrum), so probes are solved well
// below those tolerances.
conic::SolverOptions probe_options() {
    conic::SolverOptions o;
    o.abstol = 1e-9;
    o.reltol = 1e-8;
    o.feastol = 1e-9;
    o.max_iters = 100;
    o.refinement = 2;
    // The bisection has its own retry-and-shrink protocol for failed
    // probes; a loosely converged lifted matrix must not slip through it.
    o.accept_loose = false;
    return o;
}

using txdetail::finalize_beams;
using txdetail::mrt_witness;
using txdetail::noise_scaled;

struct TxProbeOutcome {
    conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
    TxBeams beams;
};

// Feasibility of (max-min >= t) at fixed effective channels, in noise units:
// per user one SOC  sqrt(1 + 1/(alpha t)) Re(a_own^H w_own) >=
// || [a_{i,u}^H w_{i,u} for all (i,u); 1] ||  with Im(a_own^H w_own) = 0,
// plus one power SOC per BS.  Blocks are scaled to O(1) entries.
TxProbeOutcome tx_probe(const SystemConfig& cfg,
                        const std::vector<Eigen::VectorXcd>& as, double t,
                        const conic::SolverOptions& sopt) {
    const int B = cfg.num_bs;
    const int M = cfg.num_antennas;
    const int K = cfg.total_users();

    conic::ProgramBuilder pb(2 * M * K);
    std::vector<int> off(K);
    for (int j = 0; j < K; ++j)
        off[j] = pb.add_complex_var("w" + std::to_string(j), M);

    // Rotation: Im(a_own^H w_own) = 0, scaled to O(1) coefficients.
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
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

    // Per-user SINR cone.
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        const double alpha = metrics::weight_of(cfg, j);
        const double sc = std::sqrt(1.0 + 1.0 / (alpha * t));
        const Eigen::VectorXcd& own = as[static_cast<std::size_t>(b) * K + j];

        double rho = 1.0;  // covers the sigma'=1 tail entry
        for (int jj = 0; jj < K; ++jj) {
            const auto [i, u] = cfg.user_of_index(jj);
            (void)u;
            const Eigen::VectorXcd& q = as[static_cast<std::size_t>(i) * K + j];
            for (int m = 0; m < M; ++m)
                rho = std::max(
                    {rho, std::abs(q(m).real()), std::abs(q(m).imag())});
        }
        for (int m = 0; m < M; ++m)
            rho = std::max({rho, sc * std::abs(own(m).real()),
                            sc * std::abs(own(m).imag())});

        const int r0 = pb.begin_soc_block(2 + 2 * K);
        pb.coeff_inner_re(r0, off[j], own, -sc / rho);
        int r = r0 + 1;
        for (int jj = 0; jj < K; ++jj) {
            const auto [i, u] = cfg.user_of_index(jj);
            (void)u;
            const Eigen::VectorXcd& q = as[static_cast<std::size_t>(i) * K + j];
            pb.coeff_inner_re(r++, off[jj], q, -1.0 / rho);
            pb.coeff_inner_im(r++, off[jj], q, -1.0 / rho);
        }
        pb.set_h(r, 1.0 / rho);
    }

    // Per-BS power cone ||vec(W_b)|| <= sqrt(P_b).
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
    conic::ConicSolution sol = conic::solve(prog, sopt);

    TxProbeOutcome out;
    out.status = sol.status;
    if (sol.status == conic::SolveStatus::Optimal) {
        out.beams.w.resize(B);
        for (int b = 0; b < B; ++b) {
            out.beams.w[b] = Eigen::MatrixXcd(M, cfg.users_per_cell[b]);
            for (int k = 0; k < cfg.users_per_cell[b]; ++k) {
                const int j = cfg.user_index(b, k);
                out.beams.w[b].col(k) =
                    sol.complex_block(prog, "w" + std::to_string(j));
            }
        }
    }
    return out;
}

// Shared bisection core over tx feasibility probes.
TxbfResult bisect_tx(const SystemConfig& cfg,
                     const std::vector<Eigen::VectorXcd>& a, double t_upper,
                     double tol_rel, const TxBeams* warm) {
    // Default tolerances suffice here: the beams are re-rotated and
    // power-clamped after the bisection, unlike the exposed lifted matrix.
    const conic::SolverOptions sopt;
    const std::vector<Eigen::VectorXcd> as = noise_scaled(cfg, a);

    TxbfResult res;
    res.beams = (warm && static_cast<int>(warm->w.size()) == cfg.num_bs)
                    ? *warm
                    : mrt_witness(cfg, a);
    for (int b = 0; b < cfg.num_bs; ++b) {
        const double p = res.beams.power(b);
        if (p > cfg.pmax_w[b] && p > 0.0)
            res.beams.w[b] *= std::sqrt(cfg.pmax_w[b] / p);
    }

    // The witness value is itself a certified feasible target.
    double lo = metrics::min_weighted_sinr_effective(cfg, a, res.beams).value;
    res.probes.push_back({lo, true});
    double hi = std::max(t_upper, lo);

    int probes = 0;
    while (probes < kMaxProbes && hi - lo > tol_rel * hi) {
        double t = 0.5 * (lo + hi);
        TxProbeOutcome out = tx_probe(cfg, as, t, sopt);
        if (out.status == conic::SolveStatus::NumericalFailure) {
            // Retry once nearer the feasible side; a second failure aborts.
            t = 0.5 * (lo + t);
            out = tx_probe(cfg, as, t, sopt);
            if (out.status == conic::SolveStatus::NumericalFailure) {
                res.solver_failure = true;
                res.detail = "transmit probe failed twice near t=" +
                             std::to_string(t);
                break;
            }
        }
        const bool feas = out.status == conic::SolveStatus::Optimal;
        res.probes.push_back({t, feas});
        if (feas) {
            lo = t;
            res.beams = std::move(out.beams);
        } else {
            hi = t;
        }
        ++probes;
    }

    res.t_star = lo;
    res.t_hi = hi;
    finalize_beams(cfg, a, res.beams);
    return res;
}

// ---------------------------------------------------------------------------
// Reflect step.

// Variable layout of the lifted Hermitian matrix V (order L): packed lower
// triangle of Re V followed by the strict lower triangle of Im V.
struct HermLayout {
    int order = 0;
    Eigen::MatrixXi re;  // re(r,c), r >= c
    Eigen::MatrixXi im;  // im(r,c), r > c
    int nvars = 0;

    explicit HermLayout(int L) : order(L), re(L, L), im(L, L) {
        re.setConstant(-1);
        im.setConstant(-1);
        int n = 0;
        for (int c = 0; c < L; ++c)
            for (int r = c; r < L; ++r) re(r, c) = n++;
        for (int c = 0; c < L; ++c)
            for (int r = c + 1; r < L; ++r) im(r, c) = n++;
        nvars = n;
    }
};

// Per-user probe data with the noise scaling baked in: the constraint at
// target t is  Tr((R_own - alpha t S_cross) V) + dsq_own - alpha t
// (cross_dsq + 1) >= 0  in noise units.
struct ReflectUserData {
    Eigen::MatrixXcd r_own;    // R_own / noise
    Eigen::MatrixXcd s_cross;  // sum of cross R / noise
    double dsq_own = 0.0;      // own |d|^2 / noise
    double cross_dsq = 0.0;    // sum of cross |d|^2 / noise
    double alpha = 1.0;
};

std::vector<ReflectUserData> reflect_user_data(const SystemConfig& cfg,
                                               const metrics::LiftedForms& lf) {
    const int K = cfg.total_users();
    const int L = lf.order;
    const double inv = 1.0 / cfg.noise_w;
    std::vector<ReflectUserData> data(K);
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        (void)k;
        ReflectUserData& d = data[j];
        d.alpha = metrics::weight_of(cfg, j);
        d.r_own = inv * lf.R[lf.link(j, j)];
        d.dsq_own = inv * lf.dsq[lf.link(j, j)];
        d.s_cross = Eigen::MatrixXcd::Zero(L, L);
        d.cross_dsq = 0.0;
        for (int jj = 0; jj < K; ++jj) {
            if (jj == j) continue;
            d.s_cross += inv * lf.R[lf.link(jj, j)];
            d.cross_dsq += inv * lf.dsq[lf.link(jj, j)];
        }
    }
    return data;
}

struct SdpProbeOutcome {
    conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
    Eigen::MatrixXcd V;
};

// Feasibility of the lifted program at target t: per-user linear trace
// constraints, diagonal caps V_nn <= 1, homogenization V_LL = 1, and the
// real embedding [[Re V, -Im V], [Im V, Re V]] >= 0.
SdpProbeOutcome reflect_probe(const std::vector<ReflectUserData>& users,
                              const HermLayout& lay, double t,
                              const conic::SolverOptions& sopt) {
    const int L = lay.order;
    conic::ProgramBuilder pb(lay.nvars);

    for (const ReflectUserData& d : users) {
        const double at = d.alpha * t;
        const Eigen::MatrixXcd reff = d.r_own - at * d.s_cross;
        const double h = d.dsq_own - at * (d.cross_dsq + 1.0);

        double rho = std::max(1.0, std::abs(h));
        for (int c = 0; c < L; ++c) {
            rho = std::max(rho, std::abs(reff(c, c).real()));
            for (int r = c + 1; r < L; ++r)
                rho = std::max({rho, 2.0 * std::abs(reff(r, c).real()),
                                2.0 * std::abs(reff(r, c).imag())});
        }

        const int row = pb.begin_orthant_row(h / rho);
        for (int c = 0; c < L; ++c) {
            const double vr = reff(c, c).real();
            if (vr != 0.0) pb.coeff(row, lay.re(c, c), -vr / rho);
            for (int r = c + 1; r < L; ++r) {
                const double wr = 2.0 * reff(r, c).real();
                const double wi = 2.0 * reff(r, c).imag();
                if (wr != 0.0) pb.coeff(row, lay.re(r, c), -wr / rho);
                if (wi != 0.0) pb.coeff(row, lay.im(r, c), -wi / rho);
            }
        }
    }

    // Unit caps on the reflén diagonal (the homogenization entry is pinned
    // by the equality below).
    for (int n = 0; n < L - 1; ++n) {
        const int row = pb.begin_orthant_row(1.0);
        pb.coeff(row, lay.re(n, n), 1.0);
    }

    const int e = pb.begin_equality(1.0);
    pb.eq_coeff(e, lay.re(L - 1, L - 1), 1.0);

    const int p0 = pb.begin_psd_block(2 * L);
    for (int c = 0; c < L; ++c) {
        for (int r = c; r < L; ++r) {
            pb.psd_coeff(p0, 2 * L, r, c, lay.re(r, c), -1.0);
            pb.psd_coeff(p0, 2 * L, L + r, L + c, lay.re(r, c), -1.0);
        }
        for (int r = c + 1; r < L; ++r) {
            pb.psd_coeff(p0, 2 * L, L + r, c, lay.im(r, c), -1.0);
            pb.psd_coeff(p0, 2 * L, L + c, r, lay.im(r, c), 1.0);
        }
    }

    conic::ConicProgram prog = pb.take();
    conic::ConicSolution sol = conic::solve(prog, sopt);

    SdpProbeOutcome out;
    out.status = sol.status;
    if (sol.status == conic::SolveStatus::Optimal) {
        out.V.resize(L, L);
        for (int c = 0; c < L; ++c) {
            out.V(c, c) = sol.x(lay.re(c, c));
            for (int r = c + 1; r < L; ++r) {
                const std::complex<double> z(sol.x(lay.re(r, c)),
                                             sol.x(lay.im(r, c)));
                out.V(r, c) = z;
                out.V(c, r) = std::conj(z);
            }
        }
    }
    return out;
}

// min over users of the lifted weighted-SINR ratio at V (raw units).
double lifted_min_weighted(const SystemConfig& cfg,
                           const metrics::LiftedForms& lf,
                           const Eigen::MatrixXcd& V) {
    const int K = cfg.total_users();
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
        const double own =
            (lf.R[lf.link(j, j)] * V).trace().real() + lf.dsq[lf.link(j, j)];
        double cross = 0.0;
        for (int jj = 0; jj < K; ++jj) {
            if (jj == j) continue;
            cross +=
                (lf.R[lf.link(jj, j)] * V).trace().real() + lf.dsq[lf.link(jj, j)];
        }
        const double val =
            own / (metrics::weight_of(cfg, j) * (cross + cfg.noise_w));
        best = std::min(best, val);
    }
    return best;
}

// Cauchy-Schwarz cap on the relaxed optimum: for every user and every lifted
// feasible V (diagonal <= 1, PSD), the own-signal term is at most
// (sum_n |c_n| + |d|)^2, so min_j of that over alpha_j sigma^2 bounds t.
double reflect_upper_bound(const SystemConfig& cfg,
                           const metrics::QuadForms& qf) {
    const int K = cfg.total_users();
    double cap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
        const std::size_t own = qf.link(j, j);
        const double amp =
            qf.c[own].lpNorm<1>() + std::abs(qf.d[own]);
        const double val =
            amp * amp / (metrics::weight_of(cfg, j) * cfg.noise_w);
        cap = std::min(cap, val);
    }
    return cap * (1.0 + 1e-6);
}

}  // namespace

TxSocpEncoding tx_socp_encoding(const model::SystemConfig& cfg,
                                const std::vector<Eigen::VectorXcd>& a,
                                const metrics::TxBeams& W, double t) {
    const int K = cfg.total_users();
    TxSocpEncoding enc;
    enc.user_index.resize(K);
    enc.A.resize(K, K);
    enc.scale.resize(K);
    for (int j = 0; j < K; ++j) {
        enc.user_index[j] = j;  // m(b,k) = K_1 + ... + K_{b-1} + k
        const double alpha = metrics::weight_of(cfg, j);
        enc.scale(j) = std::sqrt(1.0 + 1.0 / (alpha * t));
        for (int jj = 0; jj < K; ++jj) {
            const auto [i, u] = cfg.user_of_index(jj);
            enc.A(j, jj) =
                a[static_cast<std::size_t>(i) * K + j].dot(W.at(i).col(u));
        }
    }
    return enc;
}

TxbfResult solve_txbf_effective(const model::SystemConfig& cfg,
                                const std::vector<Eigen::VectorXcd>& a,
                                double tol_rel,
                                const metrics::TxBeams* warm) {
    const int K = cfg.total_users();
    double hi = 0.0;
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        (void)k;
        const double nrm = a[static_cast<std::size_t>(b) * K + j].squaredNorm();
        hi = std::max(hi, cfg.pmax_w[b] * nrm /
                              (metrics::weight_of(cfg, j) * cfg.noise_w));
    }
    return bisect_tx(cfg, a, hi, tol_rel, warm);
}

TxbfResult solve_txbf(const model::SystemConfig& cfg,
                      const model::ChannelSet& ch,
                      const model::CompositeChannels& comp,
                      const metrics::ReflectVector& v, double tol_rel,
                      const metrics::TxBeams* warm) {
    const int K = cfg.total_users();
    const std::vector<Eigen::VectorXcd> a =
        model::effective_channels(cfg, ch, comp, v);
    // Upper bound valid for every unit-disk reflect vector, not just v.
    double hi = 0.0;
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        (void)k;
        double amp = ch.direct_link(b, j, K).norm();
        const Eigen::MatrixXcd& phi = comp.link(b, j, K);
        for (int n = 0; n < phi.rows(); ++n) amp += phi.row(n).norm();
        hi = std::max(hi, cfg.pmax_w[b] * amp * amp /
                              (metrics::weight_of(cfg, j) * cfg.noise_w));
    }
    return bisect_tx(cfg, a, hi, tol_rel, warm);
}

metrics::ReflectVector principal_reflect(const SdrSolution& sdr) {
    const int L = static_cast<int>(sdr.V.rows());
    const int N = L - 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sdr.V);
    const double lam = std::max(es.eigenvalues()(L - 1), 0.0);
    const Eigen::VectorXcd w = std::sqrt(lam) * es.eigenvectors().col(L - 1);
    const std::complex<double> q = w(N);
    metrics::ReflectVector v(N);
    if (std::norm(q) < 1e-24) {
        v = w.head(N);
        kernels::phase_only(v.data(), static_cast<std::size_t>(N));
    } else {
        v = w.head(N) * (std::conj(q) / std::norm(q));
    }
    kernels::project_unit_disk(v.data(), static_cast<std::size_t>(N));
    return v;
}

RandomizeResult gaussian_randomize(const model::SystemConfig& cfg,
                                   const metrics::QuadForms& qf,
                                   const SdrSolution& sdr, int num_draws,
                                   rng::Stream& stream) {
    const int L = static_cast<int>(sdr.V.rows());
    const int N = L - 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sdr.V);
    Eigen::MatrixXcd root = es.eigenvectors();
    for (int i = 0; i < L; ++i)
        root.col(i) *= std::sqrt(std::max(es.eigenvalues()(i), 0.0));

    RandomizeResult best;
    best.value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd r(L);
    metrics::ReflectVector cand(N);
    for (int d = 0; d < num_draws; ++d) {
        for (int i = 0; i < L; ++i) r(i) = stream.next_cnormal();
        const Eigen::VectorXcd vt = root * r;
        if (std::abs(vt(N)) == 0.0) continue;  // degenerate draw: discard
        const std::complex<double> ref = std::conj(vt(N));
        for (int n = 0; n < N; ++n) cand(n) = vt(n) * ref;
        kernels::phase_only(cand.data(), static_cast<std::size_t>(N));
        const double val = metrics::min_weighted_sinr_value(cfg, qf, cand);
        ++best.valid_draws;
        if (val > best.value) {
            best.value = val;
            best.v = cand;
        }
    }
    if (best.valid_draws == 0) {
        best.v = metrics::ReflectVector::Ones(N);
        best.value = metrics::min_weighted_sinr_value(cfg, qf, best.v);
    }
    return best;
}

ReflectResult solve_reflect_sdr(const model::SystemConfig& cfg,
                                const metrics::QuadForms& qf,
                                const metrics::LiftedForms& lf,
                                const metrics::ReflectVector& v_incumbent,
                                double tol_rel, int num_rand,
                                rng::Stream& stream) {
    const int L = lf.order;
    const conic::SolverOptions sopt = probe_options();
    const HermLayout lay(L);
    const std::vector<ReflectUserData> users = reflect_user_data(cfg, lf);

    ReflectResult res;
    res.v = v_incumbent;
    const double t_inc = metrics::min_weighted_sinr_value(cfg, qf, v_incumbent);
    res.t_achieved = t_inc;

    Eigen::VectorXcd vbar(L);
    vbar.head(L - 1) = v_incumbent;
    vbar(L - 1) = 1.0;
    res.sdr.V = vbar * vbar.adjoint();  // witness lifted matrix

    double lo = t_inc;
    double hi = std::max(reflect_upper_bound(cfg, qf), lo);
    bool have_probe_v = false;

    int probes = 0;
    while (probes < kMaxProbes && hi - lo > tol_rel * hi) {
        double t = 0.5 * (lo + hi);
        SdpProbeOutcome out = reflect_probe(users, lay, t, sopt);
        if (out.status == conic::SolveStatus::NumericalFailure) {
            t = 0.5 * (lo + t);
            out = reflect_probe(users, lay, t, sopt);
            if (out.status == conic::SolveStatus::NumericalFailure) {
                res.solver_failure = true;
                res.detail =
                    "reflect probe failed twice near t=" + std::to_string(t);
                break;
            }
        }
        if (out.status == conic::SolveStatus::Optimal) {
            lo = t;
            res.sdr.V = std::move(out.V);
            have_probe_v = true;
        } else {
            hi = t;
        }
        ++probes;
    }

    if (!have_probe_v && !res.solver_failure && lo > 0.0) {
        // Every probe above the incumbent was infeasible; ask the solver for
        // a lifted matrix at the certified value itself.
        SdpProbeOutcome out = reflect_probe(users, lay, lo, sopt);
        if (out.status == conic::SolveStatus::Optimal) res.sdr.V = std::move(out.V);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(res.sdr.V);
    res.sdr.eigenvalues = es.eigenvalues().reverse();
    const double lam1 = std::max(res.sdr.eigenvalues(0), 0.0);
    res.sdr.rank_estimate = 0;
    for (int i = 0; i < L; ++i)
        if (res.sdr.eigenvalues(i) > 1e-6 * lam1) ++res.sdr.rank_estimate;

    metrics::ReflectVector cand;
    double cand_val;
    if (res.sdr.rank_estimate <= 1) {
        cand = principal_reflect(res.sdr);
        cand_val = metrics::min_weighted_sinr_value(cfg, qf, cand);
    } else {
        RandomizeResult rr = gaussian_randomize(cfg, qf, res.sdr,
                                                std::max(num_rand, 1), stream);
        cand = std::move(rr.v);
        cand_val = rr.value;
    }

    if (cand_val < t_inc) {
        res.degraded = true;  // keep the incumbent
    } else {
        res.v = std::move(cand);
        res.t_achieved = cand_val;
    }

    res.sdr.t_relaxed = std::max(
        {lo, lifted_min_weighted(cfg, lf, res.sdr.V), res.t_achieved});
    return res;
}

report::SolveReport run_exact_ao(const model::SystemConfig& cfg,
                                 const model::ChannelSet& ch,
                                 const model::CompositeChannels& comp,
                                 const metrics::ReflectVector& init_v,
                                 const ExactAoOptions& opts,
                                 rng::Stream& stream) {
    const auto t0 = std::chrono::steady_clock::now();
    report::SolveReport rep;
    rep.algorithm = "exact_ao";

    metrics::ReflectVector v = init_v;
    metrics::TxBeams W;
    bool have_beams = false;
    double obj_prev = 0.0;
    bool have_prev = false;
    double best_obj = -std::numeric_limits<double>::infinity();
    rep.termination = report::Termination::MaxIters;

    for (int it = 1; it <= opts.max_iters; ++it) {
        TxbfResult tx = solve_txbf(cfg, ch, comp, v, opts.bisect_tol,
                                   have_beams ? &W : nullptr);
        if (tx.solver_failure) {
            rep.termination = report::Termination::SolverFailure;
            rep.detail = tx.detail;
            break;
        }
        W = std::move(tx.beams);
        have_beams = true;

        const metrics::QuadForms qf = metrics::quad_forms(cfg, ch, comp, W);
        const metrics::LiftedForms lf = metrics::lifted_forms(qf);
        const double t_tx = metrics::min_weighted_sinr_value(cfg, qf, v);

        ReflectResult rf = solve_reflect_sdr(cfg, qf, lf, v, opts.bisect_tol,
                                             opts.num_rand, stream);
        if (rf.solver_failure) {
            rep.termination = report::Termination::SolverFailure;
            rep.detail = rf.detail;
            break;
        }
        metrics::ReflectVector v_next = std::move(rf.v);
        double obj = rf.t_achieved;
        if (opts.unit_amplitude) {
            kernels::phase_only(v_next.data(),
                                static_cast<std::size_t>(v_next.size()));
            obj = metrics::min_weighted_sinr_value(cfg, qf, v_next);
        }

        rep.trace.push_back(obj);
        rep.iterations = it;
        if (obj > best_obj) {
            best_obj = obj;
            rep.beams = W;
            rep.v = v_next;
            rep.objective = obj;
        }

        if (rf.degraded) {
            rep.termination = report::Termination::ObjectiveDecreased;
            rep.detail = "reflect randomization did not beat the incumbent";
            break;
        }
        if (obj == t_tx) {
            // The reflect step reproduced the pre-step value exactly: a
            // fixed point of the alternation.
            rep.termination = report::Termination::Converged;
            break;
        }
        if (have_prev) {
            if (obj < obj_prev * (1.0 - 1e-9)) {
                rep.termination = report::Termination::ObjectiveDecreased;
                break;
            }
            if (obj - obj_prev <= opts.eps * std::max(obj_prev, 0.0)) {
                rep.termination = report::Termination::Converged;
                break;
            }
        }
        obj_prev = obj;
        have_prev = true;
        v = std::move(v_next);
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return rep;
}

}  // namespace irsbf::exact_ao
