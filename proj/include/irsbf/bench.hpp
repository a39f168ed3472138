// SPDX-License-Identifier: Apache-2.0
//
// Benchmark schemes: closed-form transmit beams (maximum-ratio and
// zero-forcing) alternated with the surrogate reflect step, random
// unit-modulus reflection, the no-surface baseline, and the unit-amplitude
// wrapper around the alternating algorithms.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "irsbf/metrics.hpp"
#include "irsbf/model.hpp"
#include "irsbf/report.hpp"

namespace irsbf::bench {

enum class SchemeId {
    AoMrt,              // MRT beams alternated with the surrogate reflect step
    AoZf,               // zero-forcing beams alternated likewise
    RandomReflect,      // random unit-modulus v, then one exact transmit solve
    NoIrs,              // direct channels only, one exact transmit solve
    UnitAmplitudeWrap,  // an alternating algorithm with |v_n| = 1 enforced
};

struct Scheme {
    SchemeId id = SchemeId::AoMrt;
    std::string inner;  // UnitAmplitudeWrap: "alg2" or "alg3"
};

struct MrtResult {
    metrics::TxBeams beams;
    std::vector<int> degenerate_users;  // global indices with a zero channel
};

// Full-power equal-split maximum-ratio beams: w_{b,k} colinear with the
// serving effective channel a (indexed [i * K + j]), ||w_{b,k}||^2 =
// P_b / K_b.  A zero channel yields a zero beam and a flag; its power share
// is left unused.
MrtResult mrt_beams(const model::SystemConfig& cfg,
                    const std::vector<Eigen::VectorXcd>& a);

struct ZfResult {
    metrics::TxBeams beams;
    bool applicable = true;  // false: multi-user cells, M < B, or rank loss
    std::string detail;      // why, when not applicable
    std::vector<int> degenerate_cells;  // near-zero desired gain after nulling
};

// Zero-forcing beams for single-user cells: each BS projects its serving
// channel onto the orthogonal complement of its channels to all other
// cells' users and transmits at full power along the projection, so the
// cross-cell leakage |a_{i,b}^H w_i| vanishes to working precision.
// Requires M >= B and a full-rank cross-channel block per BS.
ZfResult zf_beams(const model::SystemConfig& cfg,
                  const std::vector<Eigen::VectorXcd>& a);

// Unit-modulus reflect vector with i.i.d. phases uniform on [0, 2pi),
// deterministic per seed.
metrics::ReflectVector random_reflect(int n, std::uint64_t seed);

struct NoIrsResult {
    metrics::TxBeams beams;
    double t_star = 0.0;
    bool solver_failure = false;
    std::string detail;
};

// Exact transmit solve against the direct channels alone (the reflected
// path ignored entirely); independent of the surface size and of the
// BS-surface / surface-user channels.
NoIrsResult no_irs_solve(const model::SystemConfig& cfg,
                         const model::ChannelSet& ch, double tol_rel = 1e-3);

// Entrywise phase extraction v_n -> v_n / |v_n|; zero maps to 1.
metrics::ReflectVector unit_amplitude_project(const metrics::ReflectVector& v);

struct BenchOptions {
    double eps = 1e-3;         // relative improvement threshold (AO schemes)
    int max_iters = 50;        // outer iteration cap (AO schemes)
    double bisect_tol = 1e-3;  // transmit bisection tolerance (fixed-v runs)
    double gamma = 0.01;       // wrapped alg3 step length
    int T = 100;               // wrapped alg3 subgradient steps
};

struct SchemeRun {
    bool applicable = true;          // false: scheme preconditions unmet
    std::string inapplicable_reason; // set when !applicable
    report::SolveReport rep;         // valid only when applicable
};

// Runs one benchmark scheme on one channel realization.  The alternating
// schemes follow the exact-variant stopping rule (improvement below eps, or
// stop on an objective decrease) and report the best iterate seen; `seed`
// feeds only the scheme's own randomness (the reflect draw).
SchemeRun run_scheme(const Scheme& scheme, const model::SystemConfig& cfg,
                     const model::ChannelSet& ch,
                     const model::CompositeChannels& comp, std::uint64_t seed,
                     const BenchOptions& opts = {});

}  // namespace irsbf::bench
