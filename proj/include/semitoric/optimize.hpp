#pragma once

// Constrained extremals of one momentum-map component over a fiber of
// another: multi-start projected gradient ascent with a Lagrange-Newton
// polish. Shared by the image envelopes and the rank-1 critical curve
// sampler.

#include <optional>

#include "semitoric/systems.hpp"

namespace semitoric {

struct FiberExtremum {
    PhasePoint point;       // chart point where the extremum is attained
    double value = 0.0;     // extremal H value
    double stationarity = 0.0; // |grad H - mu grad J| at the reported point
    double multiplier = 0.0;
    bool certified = false; // stationarity below the certification threshold
};

struct FiberOptions {
    int starts = 16;
    int max_iters = 400;
    double stationarity_tol = 1e-8;
    // Optional clipping radius for the chart fiber seeds of non-proper J.
    double seed_scale = 1.0;
};

// Extremize component `obj` over the fiber {component `con` = level}.
// Returns nullopt when no seed can be projected onto the fiber (empty fiber
// as far as the search window can tell).
std::optional<FiberExtremum> fiber_extremum(const System& sys, int con, double level,
                                            int obj, bool maximize,
                                            const FiberOptions& opts = {});

} // namespace semitoric
