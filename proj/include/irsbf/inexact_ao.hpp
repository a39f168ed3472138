// SPDX-License-Identifier: Apache-2.0
//
// Inexact alternating optimization of max-min weighted SINR: each transmit
// update solves one slack-maximization SOCP anchored at the previous target
// (no inner bisection), and each reflect update solves one convex surrogate
// program obtained by linearizing the desired-signal quadratic at the
// current reflect vector.  Both half-steps provably never decrease the
// objective, so the loop needs no randomization and is fully deterministic.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsbf/metrics.hpp"
#include "irsbf/model.hpp"
#include "irsbf/report.hpp"

namespace irsbf::inexact_ao {

struct P4Result {
    metrics::TxBeams beams;
    double xi_star = 0.0;  // optimal uniform slack, raw amplitude units
    double t_star = 0.0;   // min weighted SINR of beams at the same channels
    bool solver_failure = false;  // beams = w_prev and xi = 0 when set
};

// Transmit half-step at fixed effective channels a (indexed [i * K + j]):
// maximize xi such that  Re(a_own^H w_own) - xi >=
// sqrt(alpha t_prev) || [cross-link terms; sigma] ||  for every user, under
// rotation conventions and per-BS power budgets.  (w_prev, xi = 0) is always
// feasible, so xi* >= 0 and t_star >= t_prev up to solver tolerance.
P4Result solve_p4(const model::SystemConfig& cfg,
                  const std::vector<Eigen::VectorXcd>& a,
                  const metrics::TxBeams& w_prev, double t_prev);

// Auxiliary function of user (b,k) at target t:
// alpha t (sum of interference quadratics + sigma^2) minus the
// desired-signal quadratic.  Nonpositive iff the user's weighted SINR
// reaches t.
double surrogate_F(const model::SystemConfig& cfg,
                   const metrics::QuadForms& qf,
                   const metrics::ReflectVector& v, double t, int b, int k);

// Convex majorant of surrogate_F: the desired-signal quadratic is replaced
// by its first-order expansion at v0, the cross term taken as twice the
// real part.  F_up >= F everywhere with equality at v = v0.
double surrogate_F_up(const model::SystemConfig& cfg,
                      const metrics::QuadForms& qf,
                      const metrics::ReflectVector& v, double t,
                      const metrics::ReflectVector& v0, int b, int k);

struct P51Result {
    metrics::ReflectVector v;
    double z_star = 0.0;          // min over v of max over users of F_up
    bool solver_failure = false;  // v = v0 and z = 0 when set
};

// Reflect half-step: minimize z subject to F_up(v) <= z for every user and
// |v_n| <= 1, expanded at v0 with t_star the current objective value.  v0
// itself achieves max F <= 0, so z** <= 0 and the objective at the returned
// vector never drops below t_star (up to solver tolerance).
P51Result solve_p5_1(const model::SystemConfig& cfg,
                     const metrics::QuadForms& qf, double t_star,
                     const metrics::ReflectVector& v0);

struct InexactAoOptions {
    double eps = 1e-3;  // relative objective improvement threshold
    int max_iters = 50;
    bool unit_amplitude = false;  // project v to unit modulus after updates
};

// Alternates solve_p4 and solve_p5_1 starting from equal-power-split MRT
// beams and init_v.  trace[0] is the initial objective; one entry is
// appended per iteration, non-decreasing up to solver tolerance.  Sub-step
// solver failures fall back to the previous iterate; the run reports
// solver_failure only when its final iteration had one.
report::SolveReport run_inexact_ao(const model::SystemConfig& cfg,
                                   const model::ChannelSet& ch,
                                   const model::CompositeChannels& comp,
                                   const metrics::ReflectVector& init_v,
                                   const InexactAoOptions& opts);

}  // namespace irsbf::inexact_ao
