#pragma once

// Exact rational arithmetic for Delzant polytopes and semitoric weighted
// polygons: validity checks, the shear group action, cut flips and the
// equivalence test. Delzant determinants are exact integers, never floats.
//
// Unbounded polygons (images of non-compact systems) carry two rays:
// `ray_in` points from the first vertex to infinity backwards along the
// boundary, `ray_out` from the last vertex forwards; the region is the
// intersection of the half-planes left of the counterclockwise traversal.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semitoric/rational.hpp"

namespace semitoric {

struct RationalPolygon {
    std::vector<RatPoint> vertices; // counterclockwise, strictly convex
    bool unbounded = false;
    RatPoint ray_in{}, ray_out{};
};

struct Cut {
    Rational lambda;
    int eps = +1;
};

struct WeightedPolygon {
    RationalPolygon polygon;
    std::vector<Cut> cuts;             // sorted strictly by lambda
    std::vector<Rational> heights;     // node heights h_j, 0 < h_j < cut length
    std::vector<std::int64_t> twisting;
};

void validate_polygon(const RationalPolygon& p);
void validate_weighted(const WeightedPolygon& w);

// Exact area of a bounded polygon (shoelace).
Rational polygon_area(const RationalPolygon& p);

// y-interval of the intersection of the vertical line x = lambda with the
// polygon; nullopt when the line misses the interior.
std::optional<std::pair<Rational, Rational>> vertical_section(const RationalPolygon& p,
                                                              const Rational& lambda);

struct VertexCertificate {
    int vertex = 0;
    std::int64_t det = 0;          // primitive edge determinant at the vertex
    bool on_cut = false;           // checked with the cut-unwinding shear
    bool fake = false;             // straight after unwinding (not a corner)
};

struct DelzantResult {
    bool ok = false;
    std::vector<VertexCertificate> failures; // offending vertices with dets
    std::vector<VertexCertificate> certificates;
    bool approximate_cut_checks = false; // set when cut-line corners were
                                         // classified with the unwinding rule
};

DelzantResult delzant_check(const RationalPolygon& p);
// Semitoric variant: corners away from cuts must be unimodular; corners on a
// cut line above the node are accepted as fake or hidden via the unit
// monodromy shear (documented approximation, flagged in the result).
DelzantResult delzant_check(const WeightedPolygon& w);

// The matrix group action (x, y) -> (x, kx + y), applied to vertices, rays
// and cuts alike. Throws ConvexityLoss if the image fails validation (cannot
// happen for the pure global shear, but piecewise callers share the code).
RationalPolygon polygon_group_action(const RationalPolygon& p, std::int64_t k);
WeightedPolygon polygon_group_action(const WeightedPolygon& w, std::int64_t k);

RationalPolygon translate(const RationalPolygon& p, const RatPoint& t);
WeightedPolygon translate(const WeightedPolygon& w, const RatPoint& t);

// Flip the orientation of cut j: eps -> -eps, realized as the piecewise
// vertical shear fixing the cut line (identity left of it, slope eps_new on
// the right half-plane). Involutive. Throws ConvexityLoss when the image
// leaves the convex class.
WeightedPolygon flip_cut(const WeightedPolygon& w, std::size_t j);

// Equivalence of weighted polygons under translation, the global shear
// action and per-cut flips.
bool weighted_polygon_equiv(const WeightedPolygon& a, const WeightedPolygon& b);

// Primitive integer direction of a rational vector.
std::pair<std::int64_t, std::int64_t> primitive_direction(const RatPoint& d);

} // namespace semitoric
