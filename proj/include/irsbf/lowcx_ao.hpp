// SPDX-License-Identifier: Apache-2.0
//
// Low-complexity variant of the inexact alternating optimization: the
// reflect half-step's convex surrogate program is replaced by T projected
// subgradient steps on G(v) = max over users of the majorant F_up.  Every
// step touches each link's rank-one data exactly once (no factorizations),
// so the half-step cost grows linearly with the surface size.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsbf/metrics.hpp"
#include "irsbf/model.hpp"
#include "irsbf/report.hpp"

namespace irsbf::lowcx_ao {

// Pointwise maximum of the per-user majorants, with the lowest-index user
// attaining it.
struct GValue {
    double value = 0.0;
    int active_user = 0;  // global user index
};

// G(v) = max_j F_up(v; t, v0, j).  The majorant is anchored at v0 exactly
// as in the surrogate reflect program.
GValue objective_G(const model::SystemConfig& cfg,
                   const metrics::QuadForms& qf,
                   const metrics::ReflectVector& v, double t,
                   const metrics::ReflectVector& v0);

// Subgradient of G at v: the gradient of the active user's majorant, in
// complex form, so that G(v + delta) ~= G(v) + Re(g^H delta); equivalently
// (Re g, Im g) is the gradient over the stacked (Re v, Im v) coordinates.
// Ties pick the lowest-index active user.
Eigen::VectorXcd subgrad(const model::SystemConfig& cfg,
                         const metrics::QuadForms& qf,
                         const metrics::ReflectVector& v, double t,
                         const metrics::ReflectVector& v0);

// Entrywise projection onto the closed unit disk (typed wrapper over the
// kernel): x_n stays if |x_n| <= 1, otherwise x_n / |x_n|.
metrics::ReflectVector project_unit_disk(const Eigen::VectorXcd& x);

struct SubgradResult {
    metrics::ReflectVector v_best;
    double g_best = 0.0;  // G(v_best)
    int steps = 0;        // steps taken; < T only on a vanishing subgradient
};

// Projected subgradient descent on G starting from v0 under the constant
// step-length rule: v_k = Proj(v_{k-1} - (gamma / ||g||) g), so every
// pre-projection step has length exactly gamma.  Returns the best point
// over {v_0, ..., v_T} (the start included), hence g_best <= G(v0).  A
// zero subgradient stops early: the iterate is stationary for the active
// majorant.  `path`, when given, receives v_0 .. v_last for inspection.
SubgradResult subgrad_descend(const model::SystemConfig& cfg,
                              const metrics::QuadForms& qf, double t,
                              const metrics::ReflectVector& v0, double gamma,
                              int T,
                              std::vector<metrics::ReflectVector>* path =
                                  nullptr);

struct LowcxAoOptions {
    double eps = 1e-3;  // relative objective improvement threshold
    int max_iters = 50;
    double gamma = 0.01;          // constant step length of reflect steps
    int T = 100;                  // subgradient steps per reflect half-step
    bool unit_amplitude = false;  // project v to unit modulus after updates
};

// Same outer loop as run_inexact_ao with subgrad_descend as the reflect
// half-step.  Monotone for the same reason: the tracked best point never
// falls below the incumbent's majorant value, so the min weighted SINR
// never drops.
report::SolveReport run_lowcx_ao(const model::SystemConfig& cfg,
                                 const model::ChannelSet& ch,
                                 const model::CompositeChannels& comp,
                                 const metrics::ReflectVector& init_v,
                                 const LowcxAoOptions& opts);

}  // namespace irsbf::lowcx_ao
