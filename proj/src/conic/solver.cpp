// SPDX-License-Identifier: Apache-2.0
//
// Homogeneous self-dual interior-point solver for conic programs over
// orthant / second-order / PSD cones, with Nesterov-Todd scaling and a
// Mehrotra predictor-corrector.
//
// The per-iteration KKT systems
//     [ 0  A'  G'   ] [ ux ]   [ bx ]
//     [ A  0   0    ] [ uy ] = [ by ]
//     [ G  0  -W'W  ] [ uz ]   [ bz ]
// are reduced to the Schur complement H = G' (W'W)^{-1} G, factored densely.
// H is assembled from the sparse columns of G block by block; for PSD
// blocks, with T = rti rti' and column j representing the symmetric matrix
// X_j = sum_p alpha_p e_{a_p} e_{b_p}',
//     H_jl = Tr(X_j T X_l T) = sum_{p,q} alpha_p alpha_q T(b_p,c_q) T(d_q,a_p),
// which costs only nnz_j * nnz_l per entry.  This is what makes the SDP
// feasibility probes cheap: their G columns are elementary Hermitian
// embeddings with a handful of entries each.

#include "irsbf/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "cone_internal.hpp"

namespace irsbf::conic {

namespace {

using namespace internal;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kStep = 0.99;  // fraction of the distance to the boundary
constexpr int kExpon = 3;       // centering exponent

// Doubles the strictly-lower PSD entries of a cone vector; used before
// multiplying by G' so that lower-stored symmetric blocks contribute their
// off-diagonal entries twice.
VectorXd doubled_lower(const VectorXd& z, const Dims& dims) {
    VectorXd out = z;
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        Eigen::Map<MatrixXd> X(out.data() + dims.sofs[k], m, m);
        for (int c = 0; c < m - 1; ++c)
            X.col(c).tail(m - 1 - c) *= 2.0;
    }
    return out;
}

struct PsdEntry {
    int a, b;  // directed index pair
    double val;
};

// Pre-digested sparsity of G, grouped by cone block.
struct KktStructure {
    // Orthant: row-major nonzeros.
    std::vector<std::vector<std::pair<int, double>>> orth_rows;
    // SOC block -> list of (column, sparse column entries (local row, val)).
    std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>>
        soc_cols;
    // PSD block -> list of (column, directed entries).
    std::vector<std::vector<std::pair<int, std::vector<PsdEntry>>>> psd_cols;
};

KktStructure digest(const Eigen::SparseMatrix<double>& G, const Dims& dims) {
    KktStructure st;
    st.orth_rows.resize(dims.l);
    st.soc_cols.resize(dims.q.size());
    st.psd_cols.resize(dims.s.size());
    for (int j = 0; j < G.outerSize(); ++j) {
        std::vector<std::vector<std::pair<int, double>>> soc_local(
            dims.q.size());
        std::vector<std::vector<PsdEntry>> psd_local(dims.s.size());
        for (Eigen::SparseMatrix<double>::InnerIterator it(G, j); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (row < dims.l) {
                st.orth_rows[row].emplace_back(j, it.value());
                continue;
            }
            bool placed = false;
            for (std::size_t k = 0; k < dims.q.size(); ++k) {
                if (row >= dims.qofs[k] && row < dims.qofs[k] + dims.q[k]) {
                    soc_local[k].emplace_back(row - dims.qofs[k],
                                              it.value());
                    placed = true;
                    break;
                }
            }
            if (placed) continue;
            for (std::size_t k = 0; k < dims.s.size(); ++k) {
                const int m = dims.s[k];
                const int lo = dims.sofs[k];
                if (row >= lo && row < lo + m * m) {
                    const int local = row - lo;
                    const int c = local / m, r = local % m;
                    // builder stores lower triangle; expand symmetrically
                    psd_local[k].push_back({r, c, it.value()});
                    if (r != c) psd_local[k].push_back({c, r, it.value()});
                    break;
                }
            }
        }
        for (std::size_t k = 0; k < dims.q.size(); ++k)
            if (!soc_local[k].empty())
                st.soc_cols[k].emplace_back(j, std::move(soc_local[k]));
        for (std::size_t k = 0; k < dims.s.size(); ++k)
            if (!psd_local[k].empty())
                st.psd_cols[k].emplace_back(j, std::move(psd_local[k]));
    }
    return st;
}

// Solves the reduced 2x2 KKT systems
//     [ M  A' ] [ ux ]   [ r  ]          M = G' (W'W)^{-1} G,
//     [ A  0  ] [ uy ] = [ by ],
// by eliminating the equality rows with a QR factorization A' = [Q1 Q2][R;0]
// computed once (A never changes), then a Cholesky factorization of the
// nullspace block Q2' M Q2 each iteration.  This mirrors the classical
// approach for equality-constrained Newton systems and stays accurate when M
// becomes ill-conditioned near the central-path endpoint, where the naive
// Schur complement A M^{-1} A' loses the dual block entirely.
class KktSolver {
  public:
    KktSolver(const ConicProgram& prog, const Dims& dims)
        : G_(prog.G),
          A_(prog.A),
          dims_(dims),
          n_(prog.nvars),
          p_(static_cast<int>(prog.A.rows())),
          st_(digest(prog.G, dims)) {
        if (p_ > 0) {
            MatrixXd At = MatrixXd(A_.transpose());
            qr_.compute(At);
            // rank check: R must have a nonvanishing diagonal
            const double rscale =
                std::max(1.0, qr_.matrixQR()
                                  .topRows(p_)
                                  .cwiseAbs()
                                  .maxCoeff());
            for (int i = 0; i < p_; ++i)
                if (std::abs(qr_.matrixQR()(i, i)) < 1e-12 * rscale)
                    a_full_rank_ = false;
        }
    }

    bool full_rank() const { return a_full_rank_; }

    bool factor(const Scaling& W) {
        MatrixXd H = MatrixXd::Zero(n_, n_);

        // Orthant rows: H += sum_i di_i^2 g_i g_i'.
        for (int i = 0; i < dims_.l; ++i) {
            const double w = W.di(i) * W.di(i);
            const auto& row = st_.orth_rows[i];
            for (std::size_t a = 0; a < row.size(); ++a)
                for (std::size_t b = 0; b <= a; ++b) {
                    const auto [ja, va] = row[a];
                    const auto [jb, vb] = row[b];
                    H(std::max(ja, jb), std::min(ja, jb)) += w * va * vb;
                }
        }

        // SOC blocks: H += (W^{-1} Gq)' (W^{-1} Gq), W^{-1} symmetric.
        for (std::size_t k = 0; k < dims_.q.size(); ++k) {
            const auto& cols = st_.soc_cols[k];
            if (cols.empty()) continue;
            const int m = dims_.q[k];
            const int nc = static_cast<int>(cols.size());
            MatrixXd U(m, nc);
            const VectorXd& v = W.v[k];
            for (int cidx = 0; cidx < nc; ++cidx) {
                VectorXd g = VectorXd::Zero(m);
                for (const auto& [lr, val] : cols[cidx].second) g(lr) = val;
                // W^{-1} g = (2 vbar (vbar'g) - J g) / beta with vbar = Jv
                double vbg = v(0) * g(0) - v.tail(m - 1).dot(g.tail(m - 1));
                VectorXd u(m);
                u(0) = 2.0 * vbg * v(0) - g(0);
                u.tail(m - 1) =
                    g.tail(m - 1) - 2.0 * vbg * v.tail(m - 1);
                U.col(cidx) = u / W.beta[k];
            }
            MatrixXd Hsub = U.transpose() * U;
            for (int a = 0; a < nc; ++a)
                for (int b = 0; b <= a; ++b) {
                    const int ja = cols[a].first, jb = cols[b].first;
                    H(std::max(ja, jb), std::min(ja, jb)) += Hsub(a, b);
                }
        }

        // PSD blocks via the directed-entry trace formula.
        for (std::size_t k = 0; k < dims_.s.size(); ++k) {
            const auto& cols = st_.psd_cols[k];
            if (cols.empty()) continue;
            const MatrixXd T = W.rti[k] * W.rti[k].transpose();
            const int nc = static_cast<int>(cols.size());
            for (int a = 0; a < nc; ++a) {
                const auto& ea = cols[a].second;
                for (int b = 0; b <= a; ++b) {
                    const auto& eb = cols[b].second;
                    double acc = 0.0;
                    for (const auto& p : ea)
                        for (const auto& q : eb)
                            acc += p.val * q.val * T(p.b, q.a) * T(q.b, p.a);
                    const int ja = cols[a].first, jb = cols[b].first;
                    H(std::max(ja, jb), std::min(ja, jb)) += acc;
                }
            }
        }

        // K = [Q1 Q2]' * M * [Q1 Q2]; Cholesky of the (2,2) block.
        K_ = H.selfadjointView<Eigen::Lower>();
        if (p_ > 0) {
            K_ = qr_.householderQ().adjoint() * K_;
            K_ = K_ * qr_.householderQ();
        }
        const int m = n_ - p_;
        hchol_.compute(K_.bottomRightCorner(m, m));
        if (hchol_.info() != Eigen::Success) {
            // One retry with a proportional diagonal shift.
            const double shift =
                1e-13 * std::max(1.0, K_.diagonal().tail(m).maxCoeff());
            MatrixXd K22 = K_.bottomRightCorner(m, m);
            K22.diagonal().array() += shift;
            hchol_.compute(K22);
            if (hchol_.info() != Eigen::Success) return false;
        }
        return true;
    }

    // In place: (bx, by, bz) -> (ux, uy, zeta) with zeta = W^{-T}(G ux - bz).
    void solve(VectorXd& x, VectorXd& y, VectorXd& z,
               const Scaling& W) const {
        VectorXd t = z;
        scale(t, W, dims_, /*trans=*/true, /*inverse=*/true);   // W^{-T} bz
        VectorXd t2 = t;
        scale(t2, W, dims_, /*trans=*/false, /*inverse=*/true);  // W^{-1} ..
        // r = bx + G' (W'W)^{-1} bz, rotated into the [Q1 Q2] basis
        VectorXd xq = x + G_.transpose() * doubled_lower(t2, dims_);
        if (p_ > 0) xq = qr_.householderQ().adjoint() * xq;

        VectorXd ux;
        if (p_ > 0) {
            const auto R =
                qr_.matrixQR().topRows(p_).triangularView<Eigen::Upper>();
            VectorXd q1r = xq.head(p_);  // Q1' r
            // v solves R' v = by;  w solves K22 w = Q2' r - K21 v
            VectorXd v = R.transpose().solve(y);
            VectorXd w = hchol_.solve(
                VectorXd(xq.tail(n_ - p_) -
                         K_.bottomLeftCorner(n_ - p_, p_) * v));
            VectorXd uq(n_);
            uq << v, w;
            // uy = R^{-1} (Q1' r - [K11 K12] uq)
            y = R.solve(VectorXd(q1r - K_.topRows(p_) * uq));
            ux = qr_.householderQ() * uq;
        } else {
            ux = hchol_.solve(xq);
        }
        VectorXd zeta = G_ * ux - z;
        scale(zeta, W, dims_, /*trans=*/true, /*inverse=*/true);
        x = ux;
        z = zeta;
    }

  private:
    const Eigen::SparseMatrix<double>& G_;
    const Eigen::SparseMatrix<double>& A_;
    Dims dims_;
    int n_, p_;
    KktStructure st_;
    bool a_full_rank_ = true;
    Eigen::HouseholderQR<MatrixXd> qr_;  // of A'
    MatrixXd K_;
    Eigen::LLT<MatrixXd> hchol_;         // of K22
};

// e-vector addition: x += a on the orthant entries, SOC heads, PSD diagonals.
void add_e(VectorXd& x, double a, const Dims& dims) {
    x.head(dims.l).array() += a;
    for (std::size_t k = 0; k < dims.q.size(); ++k) x(dims.qofs[k]) += a;
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        Eigen::Map<MatrixXd> X(x.data() + dims.sofs[k], m, m);
        X.diagonal().array() += a;
    }
}

struct Conelp {
    const ConicProgram& prog;
    const SolverOptions& opts;
    Dims dims;
    KktSolver kkt;

    int n, p;
    VectorXd c, h, b;

    bool trace = false;  // IRSBF_CONIC_TRACE=1 prints per-iteration rows

    Conelp(const ConicProgram& pr, const SolverOptions& op)
        : prog(pr),
          opts(op),
          dims(Dims::from(pr.cones)),
          kkt(pr, dims),
          n(pr.nvars),
          p(static_cast<int>(pr.A.rows())),
          c(pr.c),
          h(pr.h),
          b(pr.b) {
        const char* env = std::getenv("IRSBF_CONIC_TRACE");
        trace = env && *env && *env != '0';
    }

    // Best near-optimal iterate seen so far; a late-stage numerical
    // breakdown falls back to it instead of discarding a converged point.
    // The score mirrors the optimality test: how many multiples of the
    // requested tolerances the iterate is away from passing it.
    bool have_best = false;
    double best_score = std::numeric_limits<double>::infinity();
    VectorXd best_x;
    double best_pcost = 0.0, best_pres = 0.0, best_dres = 0.0,
           best_gap = 0.0;

    void record_best(const VectorXd& x, double tau, double pcost,
                     double pres, double dres, double gap, double relgap) {
        const double score =
            std::max({pres / opts.feastol, dres / opts.feastol,
                      std::min(gap / opts.abstol, relgap / opts.reltol)});
        if (score >= best_score) return;
        best_score = score;
        best_x = x / tau;
        best_pcost = pcost;
        best_pres = pres;
        best_dres = dres;
        best_gap = gap;
        have_best = true;
    }

    ConicSolution fail(const std::string& why, int iters, double pres,
                       double dres, double gap, const VectorXd& x,
                       double tau) const {
        constexpr double kRelax = 100.0;
        if (opts.accept_loose && have_best && best_score <= kRelax) {
            ConicSolution sol;
            sol.status = SolveStatus::Optimal;
            sol.x = best_x;
            sol.objective = best_pcost;
            sol.iterations = iters;
            sol.pres = best_pres;
            sol.dres = best_dres;
            sol.gap = best_gap;
            sol.detail = "close to optimal (" + why + ")";
            return sol;
        }
        ConicSolution sol;
        sol.status = SolveStatus::NumericalFailure;
        sol.detail = why;
        sol.iterations = iters;
        sol.pres = pres;
        sol.dres = dres;
        sol.gap = gap;
        sol.x = tau > 0 ? VectorXd(x / tau) : x;
        sol.objective = sol.x.size() ? c.dot(sol.x) : 0.0;
        return sol;
    }

    ConicSolution run() {
        const double resx0 = std::max(1.0, c.norm());
        const double resy0 = std::max(1.0, b.norm());
        const double resz0 = std::max(1.0, snrm2(h, dims));
        const int cdim = dims.cdim;
        const int cdim_diag = dims.cdim_diag;

        if (!kkt.full_rank())
            return fail("equality constraint matrix is rank deficient", 0,
                        0, 0, 0, VectorXd::Zero(n), 1.0);

        // --- initial points from least-norm KKT solves with W = I ---
        Scaling W = Scaling::identity(dims);
        if (!kkt.factor(W))
            return fail("initial KKT factorization failed (rank deficiency)",
                        0, 0, 0, 0, VectorXd::Zero(n), 1.0);

        VectorXd x = VectorXd::Zero(n), y = b, s = h;
        VectorXd ydummy = y;
        kkt.solve(x, ydummy, s, W);
        y = VectorXd::Zero(p);
        s = -s;
        const double ts0 = max_step(s, dims);

        VectorXd dx = -c, z = VectorXd::Zero(cdim);
        VectorXd ydual = VectorXd::Zero(p);
        kkt.solve(dx, ydual, z, W);
        y = ydual;
        const double tz0 = max_step(z, dims);

        const double nrms = snrm2(s, dims), nrmz = snrm2(z, dims);

        {
            // The constructed points may already be optimal.
            const double gap0 = sdot(s, z, dims);
            const double pcost0 = c.dot(x);
            const double dcost0 = -b.dot(y) - sdot(h, z, dims);
            double relgap0 = std::numeric_limits<double>::infinity();
            if (pcost0 < 0.0)
                relgap0 = gap0 / -pcost0;
            else if (dcost0 > 0.0)
                relgap0 = gap0 / dcost0;
            if (ts0 <= 0 && tz0 <= 0 &&
                (gap0 <= opts.abstol || relgap0 <= opts.reltol)) {
                ConicSolution sol;
                sol.status = SolveStatus::Optimal;
                sol.x = x;
                sol.objective = pcost0;
                sol.iterations = 0;
                sol.gap = gap0;
                sol.detail = "optimal at initialization";
                return sol;
            }
        }
        if (ts0 >= -1e-8 * std::max(nrms, 1.0)) add_e(s, 1.0 + ts0, dims);
        if (tz0 >= -1e-8 * std::max(nrmz, 1.0)) add_e(z, 1.0 + tz0, dims);

        double tau = 1.0, kappa = 1.0;
        double gap = sdot(s, z, dims);

        VectorXd lmbda(cdim_diag), lmbdasq(cdim_diag);
        double lmbda_g = 0.0, lmbdasq_g = 0.0;
        double dg = 1.0, dgi = 1.0;

        VectorXd x1, y1, z1, th;
        VectorXd rx(n), ry(p), rz(cdim), hrx(n), hry(p), hrz(cdim);
        VectorXd dsv(cdim), dzv(cdim), ws3(cdim);
        VectorXd dxv(n), dyv(p);
        VectorXd sigs(dims.sums), sigz(dims.sums);
        double wkappa3 = 0.0;

        double pres = 0, dres = 0, pcost = 0, dcost = 0;

        for (int iters = 0; iters <= opts.max_iters; ++iters) {
            // --- residuals ---
            hrx = -(A_t(y)) - G_t(z);
            const double hresx = hrx.norm();
            rx = hrx - c * tau;
            const double resx = rx.norm() / tau;

            hry = A_n(x);
            const double hresy = hry.norm();
            ry = hry - b * tau;
            const double resy = ry.norm() / tau;

            hrz = G_n(x) + s;
            const double hresz = snrm2(hrz, dims);
            rz = hrz - h * tau;
            const double resz = snrm2(rz, dims) / tau;

            const double cx = c.dot(x), by = b.dot(y),
                         hz = sdot(h, z, dims);
            const double rt = kappa + cx + by + hz;

            pcost = cx / tau;
            dcost = -(by + hz) / tau;
            double relgap = std::numeric_limits<double>::infinity();
            if (pcost < 0.0)
                relgap = gap / -pcost;
            else if (dcost > 0.0)
                relgap = gap / dcost;
            pres = std::max(resy / resy0, resz / resz0);
            dres = resx / resx0;
            record_best(x, tau, pcost, pres, dres, gap, relgap);

            if (trace)
                std::fprintf(stderr,
                             "%3d: pcost=% .6e dcost=% .6e gap=%8.1e "
                             "pres=%8.1e dres=%8.1e k/t=%8.1e\n",
                             iters, pcost, dcost, gap, pres, dres,
                             kappa / tau);

            const bool has_pinf = hz + by < 0.0;
            const double pinfres =
                has_pinf ? hresx / resx0 / (-hz - by)
                         : std::numeric_limits<double>::infinity();
            const bool has_dinf = cx < 0.0;
            const double dinfres =
                has_dinf
                    ? std::max(hresy / resy0, hresz / resz0) / (-cx)
                    : std::numeric_limits<double>::infinity();

            if (pres <= opts.feastol && dres <= opts.feastol &&
                (gap <= opts.abstol || relgap <= opts.reltol)) {
                ConicSolution sol;
                sol.status = SolveStatus::Optimal;
                sol.x = x / tau;
                sol.objective = pcost;
                sol.iterations = iters;
                sol.pres = pres;
                sol.dres = dres;
                sol.gap = gap;
                return sol;
            }
            if (pinfres <= opts.feastol) {
                ConicSolution sol;
                sol.status = SolveStatus::Infeasible;
                sol.iterations = iters;
                sol.detail = "primal infeasibility certificate";
                sol.pres = pinfres;
                return sol;
            }
            if (dinfres <= opts.feastol)
                return fail("dual infeasibility certificate (unbounded)",
                            iters, pres, dres, gap, x, tau);
            if (iters == opts.max_iters)
                return fail("iteration limit", iters, pres, dres, gap, x,
                            tau);

            // --- scaling ---
            if (iters == 0) {
                if (!compute_scaling(W, s, z, lmbda, dims))
                    return fail("scaling computation failed", iters, pres,
                                dres, gap, x, tau);
                dg = std::sqrt(kappa / tau);
                dgi = std::sqrt(tau / kappa);
                lmbda_g = std::sqrt(tau * kappa);
            }
            ssqr(lmbdasq, lmbda, dims);
            lmbdasq_g = lmbda_g * lmbda_g;

            if (!kkt.factor(W))
                return fail("KKT factorization failed", iters, pres, dres,
                            gap, x, tau);

            // (x1, y1, z1) = -dgi * KKT^{-1} (c, b, h)
            x1 = -c;
            y1 = b;
            z1 = h;
            kkt.solve(x1, y1, z1, W);
            x1 *= dgi;
            y1 *= dgi;
            z1 *= dgi;
            th = h;
            scale(th, W, dims, /*trans=*/true, /*inverse=*/true);

            const double mu =
                (lmbda.squaredNorm() + lmbda_g * lmbda_g) /
                (1.0 + cdim_diag);
            double sigma = 0.0, step = 0.0, tt = 0.0, tk = 0.0;

            for (int pass = 0; pass < 2; ++pass) {
                // rhs in (ds, dkappa): -d(lambda o lambda) adjusted.
                dsv.setZero();
                dsv.head(dims.l + dims.sumq) =
                    lmbdasq.head(dims.l + dims.sumq);
                for (std::size_t k = 0; k < dims.s.size(); ++k) {
                    const int m = dims.s[k];
                    Eigen::Map<MatrixXd> X(dsv.data() + dims.sofs[k], m, m);
                    X.diagonal() = lmbdasq.segment(dims.sdiag[k], m);
                }
                double dkappa = lmbdasq_g;
                if (pass == 1) {
                    dsv += ws3;
                    add_e(dsv, -sigma * mu, dims);
                    dkappa += wkappa3 - sigma * mu;
                }
                dxv = (1.0 - sigma) * rx;
                dyv = (1.0 - sigma) * ry;
                dzv = (1.0 - sigma) * rz;
                double dtau = (1.0 - sigma) * rt;

                if (!f6(dxv, dyv, dzv, dtau, dsv, dkappa, W, lmbda,
                        lmbda_g, dg, dgi, x1, y1, z1, th))
                    return fail("KKT refinement failed", iters, pres, dres,
                                gap, x, tau);

                if (pass == 0) {
                    ws3 = dsv;
                    sprod(ws3, dzv, dims, /*diag_y=*/false);
                    wkappa3 = dtau * dkappa;
                }

                scale2(lmbda, dsv, dims, /*inverse=*/false);
                scale2(lmbda, dzv, dims, /*inverse=*/false);

                double tsb, tzb;
                if (pass == 0) {
                    tsb = max_step(dsv, dims);
                    tzb = max_step(dzv, dims);
                } else {
                    tsb = max_step_eig(dsv, sigs, dims);
                    tzb = max_step_eig(dzv, sigz, dims);
                }
                tt = -dtau / lmbda_g;
                tk = -dkappa / lmbda_g;
                const double t =
                    std::max({0.0, tsb, tzb, tt, tk});
                if (t == 0.0)
                    step = 1.0;
                else
                    step = (pass == 0) ? std::min(1.0, 1.0 / t)
                                       : std::min(1.0, kStep / t);
                if (pass == 0) sigma = std::pow(1.0 - step, kExpon);
            }

            // --- update iterates ---
            x += step * dxv;
            y += step * dyv;

            const int nlq = dims.l + dims.sumq;
            dsv.head(nlq) *= step;
            dzv.head(nlq) *= step;
            dsv.head(dims.l).array() += 1.0;
            dzv.head(dims.l).array() += 1.0;
            for (std::size_t k = 0; k < dims.q.size(); ++k) {
                dsv(dims.qofs[k]) += 1.0;
                dzv(dims.qofs[k]) += 1.0;
            }
            scale2(lmbda, dsv, dims, /*inverse=*/true);
            scale2(lmbda, dzv, dims, /*inverse=*/true);

            sigs = (1.0 + step * sigs.array()).matrix();
            sigz = (1.0 + step * sigz.array()).matrix();
            for (std::size_t k = 0; k < dims.s.size(); ++k) {
                const int m = dims.s[k];
                const int dofs = dims.sdiag[k] - (dims.l + dims.sumq);
                sigs.segment(dofs, m).array() /=
                    lmbda.segment(dims.sdiag[k], m).array();
                sigz.segment(dofs, m).array() /=
                    lmbda.segment(dims.sdiag[k], m).array();
                Eigen::Map<MatrixXd> Ds(dsv.data() + dims.sofs[k], m, m);
                Eigen::Map<MatrixXd> Dz(dzv.data() + dims.sofs[k], m, m);
                for (int i = 0; i < m; ++i) {
                    Ds.col(i) *= std::sqrt(sigs(dofs + i));
                    Dz.col(i) *= std::sqrt(sigz(dofs + i));
                }
            }

            if (!update_scaling(W, lmbda, dsv, dzv, dims))
                return fail("scaling update failed", iters, pres, dres, gap,
                            x, tau);

            dg *= std::sqrt(1.0 - step * tk) / std::sqrt(1.0 - step * tt);
            dgi = 1.0 / dg;
            lmbda_g *= std::sqrt(1.0 - step * tt) *
                       std::sqrt(1.0 - step * tk);

            // unscale: s = W' lambda, z = W^{-1} lambda
            unscale_from_lambda(s, lmbda, W, /*as_dual=*/false);
            unscale_from_lambda(z, lmbda, W, /*as_dual=*/true);

            kappa = lmbda_g / dgi;
            tau = lmbda_g * dgi;
            gap = std::pow(lmbda.norm() / tau, 2.0);
        }
        return fail("unreachable", opts.max_iters, pres, dres, gap, x, tau);
    }

    // --- helpers bound to prog ---
    VectorXd A_n(const VectorXd& v) const {
        return p > 0 ? VectorXd(prog.A * v) : VectorXd::Zero(0);
    }
    VectorXd A_t(const VectorXd& v) const {
        return p > 0 ? VectorXd(prog.A.transpose() * v)
                     : VectorXd::Zero(n);
    }
    VectorXd G_n(const VectorXd& v) const { return prog.G * v; }
    VectorXd G_t(const VectorXd& v) const {
        return prog.G.transpose() * doubled_lower(v, dims);
    }

    void unscale_from_lambda(VectorXd& out, const VectorXd& lmbda,
                             const Scaling& W, bool as_dual) const {
        out.setZero();
        out.head(dims.l + dims.sumq) = lmbda.head(dims.l + dims.sumq);
        for (std::size_t k = 0; k < dims.s.size(); ++k) {
            const int m = dims.s[k];
            Eigen::Map<MatrixXd> X(out.data() + dims.sofs[k], m, m);
            X.diagonal() = lmbda.segment(dims.sdiag[k], m);
        }
        if (!as_dual)
            scale(out, W, dims, /*trans=*/true, /*inverse=*/false);
        else
            scale(out, W, dims, /*trans=*/false, /*inverse=*/true);
    }

    // Solves the 6-variable Newton system in place with one pass of
    // iterative refinement; returns false on numerical failure.
    bool f6(VectorXd& fx, VectorXd& fy, VectorXd& fz, double& ftau,
            VectorXd& fs, double& fkappa, const Scaling& W,
            const VectorXd& lmbda, double lmbda_g, double dg, double dgi,
            const VectorXd& x1, const VectorXd& y1, const VectorXd& z1,
            const VectorXd& th) {
        VectorXd wx, wy, wz, ws;
        double wtau = 0, wkappa = 0;
        if (opts.refinement > 0) {
            wx = fx;
            wy = fy;
            wz = fz;
            ws = fs;
            wtau = ftau;
            wkappa = fkappa;
        }
        f6_no_ir(fx, fy, fz, ftau, fs, fkappa, W, lmbda, lmbda_g, dg, dgi,
                 x1, y1, z1, th);
        for (int r = 0; r < opts.refinement; ++r) {
            VectorXd vx = wx, vy = wy, vz = wz, vs = ws;
            double vtau = wtau, vkappa = wkappa;
            res(fx, fy, fz, ftau, fs, fkappa, vx, vy, vz, vtau, vs, vkappa,
                W, dg, lmbda, lmbda_g);
            f6_no_ir(vx, vy, vz, vtau, vs, vkappa, W, lmbda, lmbda_g, dg,
                     dgi, x1, y1, z1, th);
            fx += vx;
            fy += vy;
            fz += vz;
            ftau += vtau;
            fs += vs;
            fkappa += vkappa;
        }
        return fx.allFinite() && fz.allFinite() && std::isfinite(ftau) &&
               std::isfinite(fkappa);
    }

    void f6_no_ir(VectorXd& fx, VectorXd& fy, VectorXd& fz, double& ftau,
                  VectorXd& fs, double& fkappa, const Scaling& W,
                  const VectorXd& lmbda, double lmbda_g, double dg,
                  double dgi, const VectorXd& x1, const VectorXd& y1,
                  const VectorXd& z1, const VectorXd& th) {
        (void)dg;
        fy = -fy;
        sinv(fs, lmbda, dims);
        fs = -fs;
        VectorXd w3 = fs;
        scale(w3, W, dims, /*trans=*/true, /*inverse=*/false);
        fz += w3;
        fz = -fz;

        kkt.solve(fx, fy, fz, W);

        fkappa = -fkappa / lmbda_g;
        ftau += fkappa / dgi;
        ftau = dgi *
               (ftau + c.dot(fx) + b.dot(fy) + sdot(th, fz, dims)) /
               (1.0 + sdot(z1, z1, dims));
        fx += ftau * x1;
        fy += ftau * y1;
        fz += ftau * z1;
        fs -= fz;
        fkappa -= ftau;
    }

    // v := v - M u for the full self-dual system (residual evaluation).
    void res(const VectorXd& ux, const VectorXd& uy, const VectorXd& uz,
             double utau, const VectorXd& us, double ukappa, VectorXd& vx,
             VectorXd& vy, VectorXd& vz, double& vtau, VectorXd& vs,
             double& vkappa, const Scaling& W, double dg,
             const VectorXd& lmbda, double lmbda_g) const {
        VectorXd wz3 = uz;
        scale(wz3, W, dims, /*trans=*/false, /*inverse=*/true);  // W^{-1} uz
        vx -= A_t(uy) + G_t(wz3) + c * (utau / dg);
        vy += A_n(ux) - b * (utau / dg);
        VectorXd ws3 = us;
        scale(ws3, W, dims, /*trans=*/true, /*inverse=*/false);  // W' us
        vz += G_n(ux) - h * (utau / dg) + ws3;
        vtau += dg * ukappa + c.dot(ux) + (p ? b.dot(uy) : 0.0) +
                sdot(h, wz3, dims);
        ws3 = us + uz;
        sprod(ws3, lmbda, dims, /*diag_y=*/true);
        vs += ws3;
        vkappa += lmbda_g * (utau + ukappa);
    }
};

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
    prog.validate();
    Conelp engine(prog, opts);
    return engine.run();
}

}  // namespace irsbf::conic
