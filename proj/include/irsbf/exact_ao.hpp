// SPDX-License-Identifier: Apache-2.0
//
// Exact alternating optimization of max-min weighted SINR: the transmit step
// maximizes t by bisection over second-order-cone feasibility probes, the
// reflect step lifts v to a PSD matrix, bisects over semidefinite feasibility
// probes, and recovers a unit-disk vector by Gaussian randomization (or the
// principal eigenvector when the lifted matrix is numerically rank one).
//
// Probes are built in noise-normalized units (channels scaled by 1/sigma,
// powers by 1/sigma^2) so the conic solver sees O(1) data; the objective t is
// a SINR ratio and is invariant under that scaling.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "irsbf/metrics.hpp"
#include "irsbf/model.hpp"
#include "irsbf/report.hpp"
#include "irsbf/rng.hpp"

namespace irsbf::exact_ao {

// SOC data of the transmit feasibility probe at a candidate target t,
// evaluated at a concrete set of beams: the user linear index map
// m(b,k) = K_1 + ... + K_{b-1} + k, the K x K cross-link matrix
// [A]_{m(b,k), m(i,u)} = a_{i,b,k}^H w_{i,u}, and the per-user cone scalings
// sqrt(1 + 1/(alpha_{b,k} t)).  Row m(b,k) of A stacked with sigma_{b,k} is
// the cone tail for user (b,k); the scaled (b,k) diagonal entry is its head.
struct TxSocpEncoding {
    std::vector<int> user_index;  // user_index[cfg.user_index(b,k)] = m(b,k)
    Eigen::MatrixXcd A;           // K x K
    Eigen::VectorXd scale;        // sqrt(1 + 1/(alpha t)) per user
};

TxSocpEncoding tx_socp_encoding(const model::SystemConfig& cfg,
                                const std::vector<Eigen::VectorXcd>& a,
                                const metrics::TxBeams& W, double t);

// One bisection probe: was the feasibility program at target t feasible?
struct TxProbe {
    double t = 0.0;
    bool feasible = false;
};

struct TxbfResult {
    metrics::TxBeams beams;   // from the last feasible probe (or the witness)
    double t_star = 0.0;      // certified feasible target (bracket low end)
    double t_hi = 0.0;        // final bracket high end
    std::vector<TxProbe> probes;
    bool solver_failure = false;
    std::string detail;
};

// Maximizes t such that every user's weighted SINR reaches t, over beams
// obeying the per-BS power budgets, at fixed effective channels a (indexed
// [i * K + j], BS i to global user j).  Bisects over [t of a feasible
// witness, Cauchy-Schwarz upper bound]; `warm`, when given, seeds the
// witness (otherwise full-power equal-split MRT is used).
TxbfResult solve_txbf_effective(const model::SystemConfig& cfg,
                                const std::vector<Eigen::VectorXcd>& a,
                                double tol_rel,
                                const metrics::TxBeams* warm = nullptr);

// Same, with the effective channels a = Phi^H v + h built from (ch, comp, v)
// and the bisection upper bound taken over all feasible reflect vectors
// (valid for any |v_n| <= 1, not just the given one).
TxbfResult solve_txbf(const model::SystemConfig& cfg,
                      const model::ChannelSet& ch,
                      const model::CompositeChannels& comp,
                      const metrics::ReflectVector& v, double tol_rel,
                      const metrics::TxBeams* warm = nullptr);

// Relaxed reflect-step solution: the lifted (N+1) x (N+1) matrix from the
// last feasible semidefinite probe, its certified target, and its spectrum.
struct SdrSolution {
    Eigen::MatrixXcd V;
    double t_relaxed = 0.0;
    int rank_estimate = 0;        // eigenvalues above 1e-6 * largest
    Eigen::VectorXd eigenvalues;  // descending
};

// v with [v; 1] the scaled principal eigenvector of sdr.V, entries clamped
// to the unit disk.  Exact when sdr.V is rank one.
metrics::ReflectVector principal_reflect(const SdrSolution& sdr);

struct RandomizeResult {
    metrics::ReflectVector v;
    double value = 0.0;  // min weighted SINR of v under the probed beams
    int valid_draws = 0;
};

// Draws vt = U Sigma^{1/2} r with r ~ CN(0, I), forms the unit-modulus
// candidate v_n = exp(j arg(vt_n / vt_{N+1})) (draws with vt_{N+1} = 0 are
// discarded), and returns the candidate with the best min weighted SINR.
RandomizeResult gaussian_randomize(const model::SystemConfig& cfg,
                                   const metrics::QuadForms& qf,
                                   const SdrSolution& sdr, int num_draws,
                                   rng::Stream& stream);

struct ReflectResult {
    metrics::ReflectVector v;
    double t_achieved = 0.0;
    SdrSolution sdr;
    bool degraded = false;  // no candidate beat the incumbent; v = incumbent
    bool solver_failure = false;
    std::string detail;
};

// Reflect step at fixed beams (baked into qf/lf): bisects t over
// semidefinite feasibility probes of the lifted program, then recovers a
// feasible v from the final lifted matrix.  Falls back to the incumbent
// (degraded = true) when no recovered candidate improves on it.
ReflectResult solve_reflect_sdr(const model::SystemConfig& cfg,
                                const metrics::QuadForms& qf,
                                const metrics::LiftedForms& lf,
                                const metrics::ReflectVector& v_incumbent,
                                double tol_rel, int num_rand,
                                rng::Stream& stream);

struct ExactAoOptions {
    double eps = 1e-3;        // relative objective improvement threshold
    int max_iters = 30;
    double bisect_tol = 1e-3; // relative bracket width for both bisections
    int num_rand = 1000;
    bool unit_amplitude = false;  // project v to unit modulus after updates
};

// Alternates solve_txbf and solve_reflect_sdr from init_v, recording the
// objective after each pair; stops on convergence, on an objective decrease
// (including a degraded reflect step), or at the iteration cap, and returns
// the best iterate seen.
report::SolveReport run_exact_ao(const model::SystemConfig& cfg,
                                 const model::ChannelSet& ch,
                                 const model::CompositeChannels& comp,
                                 const metrics::ReflectVector& init_v,
                                 const ExactAoOptions& opts,
                                 rng::Stream& stream);

}  // namespace irsbf::exact_ao
