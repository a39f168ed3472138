// SPDX-License-Identifier: Apache-2.0
//
// Common result type returned by every optimization run: the objective trace
// across outer iterations, the final iterate, and why the run stopped.

#pragma once

#include <string>
#include <vector>

#include "irsbf/metrics.hpp"

namespace irsbf::report {

enum class Termination {
    Converged,          // improvement fell below the threshold
    ObjectiveDecreased, // objective went down (randomized reflect step)
    MaxIters,           // iteration budget exhausted
    SolverFailure,      // a conic subproblem failed numerically
};

const char* to_string(Termination t);

struct SolveReport {
    std::string algorithm;        // short identifier, e.g. "exact_ao"
    std::vector<double> trace;    // min weighted SINR (linear) per iteration
    metrics::TxBeams beams;       // best iterate seen
    metrics::ReflectVector v;
    double objective = 0.0;       // min weighted SINR of (beams, v)
    int iterations = 0;           // outer iterations executed
    double wall_ms = 0.0;
    Termination termination = Termination::Converged;
    std::string detail;           // free-form diagnostics
};

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::ObjectiveDecreased: return "objective_decreased";
        case Termination::MaxIters: return "max_iters";
        case Termination::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

}  // namespace irsbf::report
