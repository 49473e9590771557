#pragma once

// Hamiltonian flow of a single momentum-map component, integrated with an
// adaptive implicit-midpoint scheme on the embedded coordinates. Constraint
// drift is re-projected after every accepted step and reported, not hidden.

#include "semitoric/systems.hpp"

namespace semitoric {

struct FlowOptions {
    double tol = 1e-10;      // per-step local error target
    double max_time = 1e3;   // |t| cap from the module contract
    int max_steps = 2000000;
};

struct FlowResult {
    PhasePoint point;        // embedded chart
    long steps = 0;
    double max_drift = 0.0;  // largest constraint re-projection applied
};

FlowResult flow_integrate(const System& sys, int component, const PhasePoint& start,
                          double t, const FlowOptions& opts = {});

} // namespace semitoric
