#pragma once

// Image of the momentum map: the envelope functions H-(x) <= H+(x) over the
// J-line, the bifurcation set (boundary plus interior rank-0 values), and a
// fiber-connectivity probe.

#include <string>
#include <vector>

#include "semitoric/optimize.hpp"
#include "semitoric/systems.hpp"

namespace semitoric {

struct Window {
    double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

struct EnvelopeSample {
    double x = 0.0;
    double lo = 0.0, hi = 0.0;
    bool certified = true;  // both extremal points certified stationary
    bool hi_clipped = false; // H unbounded on the fiber; hi is the window top
};

struct ImageEnvelope {
    std::string system;
    Window window;
    double j_min = 0.0, j_max = 0.0; // sampled J-range after window clipping
    bool j_clipped = false;
    std::vector<EnvelopeSample> samples;
    std::vector<Eigen::Vector2d> focus_values; // interior rank-0 images
};

// H+-(x) on a grid of `resolution` J-values across the window, each computed
// by multi-start constrained optimization over the fiber J = x and certified
// stationary. Throws EmptyFiber when the window misses J(M) entirely.
ImageEnvelope envelope_functions(const System& sys, const Window& window, int resolution,
                                 std::uint64_t seed = 0);

struct BifurcationSet {
    std::vector<Eigen::Vector2d> boundary;      // sampled boundary curve
    std::vector<Eigen::Vector2d> rank0_images;  // all rank-0 critical values
    std::vector<Eigen::Vector2d> interior;      // the finite interior part
};

BifurcationSet bifurcation_set(const System& sys, const Window& window, int resolution,
                               std::uint64_t seed = 0);

// Heuristic count of connected components of the sampled fiber over c:
// samples fiber points, links those closer than a mesh scale, and counts
// clusters. A diagnostic, not a theorem.
int fiber_probe(const System& sys, const Eigen::Vector2d& c, int samples = 400);

} // namespace semitoric
