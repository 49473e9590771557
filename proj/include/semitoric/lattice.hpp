#pragma once

// Step 2 of the inverse strategy: develop the joint eigenvalues into an
// integer lattice. A nearest-neighbor graph (never crossing the vertical
// cut rays above detected focus values) is developed breadth-first from a
// seed chart; integer coordinates propagate through local affine fits with
// unimodular bookkeeping, and the result is normalized so that the first
// coordinate tracks the exact J-lines, the second increases with the
// spectrum's second coordinate, the bottom hull edge is flat, and the
// translation anchors the lexicographically smallest eigenvalue.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "semitoric/polygon.hpp"
#include "semitoric/spectrum.hpp"

namespace semitoric {

struct CutRayD {
    double x = 0.0;
    double y = 0.0; // node height; the ray points upward
};

struct DevelopOptions {
    double neighbor_factor = 3.0;   // graph radius, in units of hbar
    double fit_factor = 1.8;        // local affine fit radius, in hbar
    double obstruction_factor = 0.25; // residual threshold, in hbar
    double exclusion_factor = 5.0;  // node disk excluded from obstruction checks
    int seed_override = -1;         // test hook: force the seed index
};

struct DevelopedLattice {
    double hbar = 0.0;
    int n = 0; // spin level (hbar = 2/(n+1)); used for exact rational scaling
    std::vector<Eigen::Vector2d> points;
    std::vector<Eigen::Vector2i> coords;
    std::vector<double> residual; // local affine residual, spectrum units
    std::vector<CutRayD> cuts;
    std::vector<int> chart_of;            // strip index between cuts
    std::vector<double> chart_residual;   // per-strip max residual (away from nodes)
    double worst_residual = 0.0;          // max over charts, selection score
    int seed = -1;

    int chart_count() const { return static_cast<int>(cuts.size()) + 1; }
};

DevelopedLattice develop_lattice(const JointSpectrum& spec,
                                 const std::vector<Eigen::Vector2d>& singular_values,
                                 const DevelopOptions& opts = {});

// Integer affine comparison across the vertical line x = x0 inside the band
// y in [y0, y1]: the left chart's affine continuation is matched against
// the right chart's assignment. Identity means no lattice defect.
Eigen::Matrix2i crossing_matrix(const DevelopedLattice& lat, double x0, double y0,
                                double y1);

// Loop transition around cut `node`: crossing above the node (the loop
// closes below it, where the development is single-valued). Throws
// NonUnipotent when the matrix is not conjugate to [[1,k],[0,1]].
Eigen::Matrix2i monodromy_matrix(const DevelopedLattice& lat, int node);
int monodromy_index(const DevelopedLattice& lat, int node);

struct RecoveredPolygonResult {
    WeightedPolygon polygon;                  // snapped rational representative
    std::vector<Eigen::Vector2d> raw_vertices; // hull vertices before snapping
};
RecoveredPolygonResult recover_polygon(const DevelopedLattice& lat);

struct RecoveredVolumeResult {
    double raw = 0.0;
    Rational snapped{0};
    Eigen::Vector2d node_lattice_position{0.0, 0.0}; // in hbar * k units
};
RecoveredVolumeResult recover_volume(const DevelopedLattice& lat, int node);

} // namespace semitoric
