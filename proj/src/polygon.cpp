#include "semitoric/polygon.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "semitoric/errors.hpp"

namespace semitoric {

namespace {

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    return a / std::gcd(a, b) * b;
}

// Direction vectors pointing away from vertex i along its two edges.
// For unbounded polygons the missing neighbors are replaced by the rays.
std::pair<RatPoint, RatPoint> edge_dirs_at(const RationalPolygon& p, std::size_t i) {
    const auto m = p.vertices.size();
    RatPoint prev_dir, next_dir;
    if (p.unbounded) {
        prev_dir = i == 0 ? p.ray_in : p.vertices[i - 1] - p.vertices[i];
        next_dir = i + 1 == m ? p.ray_out : p.vertices[i + 1] - p.vertices[i];
    } else {
        prev_dir = p.vertices[(i + m - 1) % m] - p.vertices[i];
        next_dir = p.vertices[(i + 1) % m] - p.vertices[i];
    }
    return {prev_dir, next_dir};
}

// Traversal directions of the counterclockwise boundary, in order.
std::vector<RatPoint> traversal_dirs(const RationalPolygon& p) {
    std::vector<RatPoint> dirs;
    const auto m = p.vertices.size();
    if (p.unbounded) {
        dirs.push_back(RatPoint{-p.ray_in.x, -p.ray_in.y});
        for (std::size_t i = 0; i + 1 < m; ++i) dirs.push_back(p.vertices[i + 1] - p.vertices[i]);
        dirs.push_back(p.ray_out);
    } else {
        for (std::size_t i = 0; i < m; ++i)
            dirs.push_back(p.vertices[(i + 1) % m] - p.vertices[i]);
    }
    return dirs;
}

void canonical_rotation(RationalPolygon& p) {
    if (p.unbounded || p.vertices.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        const auto &a = p.vertices[i], &b = p.vertices[best];
        if (a.x < b.x || (a.x == b.x && a.y < b.y)) best = i;
    }
    std::rotate(p.vertices.begin(), p.vertices.begin() + best, p.vertices.end());
}

void drop_flat_vertices(RationalPolygon& p) {
    bool changed = true;
    while (changed && p.vertices.size() >= (p.unbounded ? 2u : 4u)) {
        changed = false;
        for (std::size_t i = 0; i < p.vertices.size(); ++i) {
            const auto [u, v] = edge_dirs_at(p, i);
            if (cross(u, v) == Rational(0)) {
                p.vertices.erase(p.vertices.begin() + i);
                changed = true;
                break;
            }
        }
    }
}

} // namespace

std::pair<std::int64_t, std::int64_t> primitive_direction(const RatPoint& d) {
    if (d.x == Rational(0) && d.y == Rational(0))
        throw NonRationalEdge("zero direction vector");
    const std::int64_t l = lcm64(d.x.den(), d.y.den());
    std::int64_t ix = d.x.num() * (l / d.x.den());
    std::int64_t iy = d.y.num() * (l / d.y.den());
    const std::int64_t g = std::gcd(ix < 0 ? -ix : ix, iy < 0 ? -iy : iy);
    return {ix / g, iy / g};
}

void validate_polygon(const RationalPolygon& p) {
    if (p.unbounded) {
        if (p.vertices.empty()) throw ConvexityLoss("unbounded polygon needs a vertex");
    } else if (p.vertices.size() < 3) {
        throw ConvexityLoss("bounded polygon needs at least 3 vertices");
    }
    const auto dirs = traversal_dirs(p);
    for (std::size_t i = 0; i + 1 < dirs.size(); ++i)
        if (cross(dirs[i], dirs[i + 1]).sign() <= 0)
            throw ConvexityLoss("polygon is not strictly convex at traversal step " +
                                std::to_string(i));
    if (!p.unbounded) {
        if (cross(dirs.back(), dirs.front()).sign() <= 0)
            throw ConvexityLoss("polygon is not strictly convex at the wrap-around");
    } else {
        // strips (parallel rays, same direction) are legal unbounded regions
        const Rational c = cross(p.ray_out, p.ray_in);
        const Rational dot = p.ray_out.x * p.ray_in.x + p.ray_out.y * p.ray_in.y;
        if (c.sign() < 0 || (c.sign() == 0 && dot.sign() <= 0))
            throw ConvexityLoss("rays do not bound a convex unbounded region");
    }
}

Rational polygon_area(const RationalPolygon& p) {
    if (p.unbounded) throw ConvexityLoss("area of an unbounded polygon");
    Rational twice(0);
    const auto m = p.vertices.size();
    for (std::size_t i = 0; i < m; ++i)
        twice += cross(p.vertices[i], p.vertices[(i + 1) % m]);
    return twice / Rational(2);
}

std::optional<std::pair<Rational, Rational>> vertical_section(const RationalPolygon& p,
                                                              const Rational& lambda) {
    bool any = false;
    Rational lo(0), hi(0);
    const auto consider = [&](const Rational& y) {
        if (!any) {
            lo = hi = y;
            any = true;
        } else {
            if (y < lo) lo = y;
            if (hi < y) hi = y;
        }
    };
    const auto m = p.vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
        const RatPoint a = p.vertices[i];
        if (a.x == lambda) consider(a.y);
        if (p.unbounded && i + 1 == m) break;
        const RatPoint b = p.vertices[(i + 1) % m];
        if ((a.x < lambda && lambda < b.x) || (b.x < lambda && lambda < a.x)) {
            const Rational t = (lambda - a.x) / (b.x - a.x);
            consider(a.y + t * (b.y - a.y));
        }
    }
    if (p.unbounded) {
        const auto ray_hit = [&](const RatPoint& v, const RatPoint& d) {
            if (d.x == Rational(0)) return;
            const Rational t = (lambda - v.x) / d.x;
            if (t.sign() > 0) consider(v.y + t * d.y);
        };
        ray_hit(p.vertices.front(), p.ray_in);
        ray_hit(p.vertices.back(), p.ray_out);
    }
    if (!any || lo == hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

void validate_weighted(const WeightedPolygon& w) {
    validate_polygon(w.polygon);
    if (w.cuts.size() != w.heights.size() || w.cuts.size() != w.twisting.size())
        throw ConvexityLoss("cut, height and twisting lists must have equal length");
    for (std::size_t j = 0; j < w.cuts.size(); ++j) {
        if (j > 0 && !(w.cuts[j - 1].lambda < w.cuts[j].lambda))
            throw ConvexityLoss("cuts must be strictly sorted by lambda");
        if (w.cuts[j].eps != 1 && w.cuts[j].eps != -1)
            throw ConvexityLoss("cut orientation must be +-1");
        const auto sect = vertical_section(w.polygon, w.cuts[j].lambda);
        if (!sect)
            throw ConvexityLoss("cut line " + w.cuts[j].lambda.str() +
                                " does not meet the polygon interior");
        const Rational len = sect->second - sect->first;
        if (!(Rational(0) < w.heights[j] && w.heights[j] < len))
            throw ConvexityLoss("node height " + w.heights[j].str() +
                                " violates 0 < h < " + len.str());
    }
}

namespace {

VertexCertificate check_vertex(const RationalPolygon& p, std::size_t i,
                               const std::vector<Cut>* cuts,
                               const std::vector<RatPoint>* nodes) {
    VertexCertificate cert;
    cert.vertex = static_cast<int>(i);
    auto [u, v] = edge_dirs_at(p, i);
    // A vertex on the cut ray (on the cut line, on the node's eps side) is
    // compared after unwinding the unit monodromy shear on the right-hand
    // side.
    if (cuts) {
        for (std::size_t j = 0; j < cuts->size(); ++j) {
            const auto& c = (*cuts)[j];
            const bool on_ray =
                p.vertices[i].x == c.lambda &&
                (c.eps == +1 ? !(p.vertices[i].y < (*nodes)[j].y)
                             : !((*nodes)[j].y < p.vertices[i].y));
            if (on_ray) {
                cert.on_cut = true;
                const Rational slope(c.eps);
                const auto unwind = [&](RatPoint d) {
                    if (d.x.sign() > 0) d.y += slope * d.x;
                    return d;
                };
                u = unwind(u);
                v = unwind(v);
                break;
            }
        }
    }
    const auto pu = primitive_direction(u);
    const auto pv = primitive_direction(v);
    cert.det = pu.first * pv.second - pu.second * pv.first;
    if (cert.on_cut && cert.det == 0 &&
        pu.first == -pv.first && pu.second == -pv.second)
        cert.fake = true;
    return cert;
}

DelzantResult delzant_impl(const RationalPolygon& p, const std::vector<Cut>* cuts,
                           const std::vector<RatPoint>* nodes) {
    validate_polygon(p);
    DelzantResult res;
    res.ok = true;
    res.approximate_cut_checks = cuts != nullptr && !cuts->empty();
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        const auto cert = check_vertex(p, i, cuts, nodes);
        res.certificates.push_back(cert);
        if (!(cert.fake || cert.det == 1 || cert.det == -1)) {
            res.ok = false;
            res.failures.push_back(cert);
        }
    }
    return res;
}

} // namespace

DelzantResult delzant_check(const RationalPolygon& p) {
    return delzant_impl(p, nullptr, nullptr);
}

DelzantResult delzant_check(const WeightedPolygon& w) {
    validate_weighted(w);
    std::vector<RatPoint> nodes;
    for (std::size_t j = 0; j < w.cuts.size(); ++j) {
        const auto sect = vertical_section(w.polygon, w.cuts[j].lambda);
        nodes.push_back({w.cuts[j].lambda, sect->first + w.heights[j]});
    }
    return delzant_impl(w.polygon, &w.cuts, &nodes);
}

RationalPolygon polygon_group_action(const RationalPolygon& p, std::int64_t k) {
    RationalPolygon q = p;
    const Rational kk(k);
    for (auto& v : q.vertices) v.y += kk * v.x;
    if (q.unbounded) {
        q.ray_in.y += kk * q.ray_in.x;
        q.ray_out.y += kk * q.ray_out.x;
    }
    validate_polygon(q);
    return q;
}

WeightedPolygon polygon_group_action(const WeightedPolygon& w, std::int64_t k) {
    WeightedPolygon out = w;
    out.polygon = polygon_group_action(w.polygon, k);
    validate_weighted(out); // lambdas fixed; heights are shear-invariant
    return out;
}

RationalPolygon translate(const RationalPolygon& p, const RatPoint& t) {
    RationalPolygon q = p;
    for (auto& v : q.vertices) v = v + t;
    return q;
}

WeightedPolygon translate(const WeightedPolygon& w, const RatPoint& t) {
    WeightedPolygon out = w;
    out.polygon = translate(w.polygon, t);
    for (auto& c : out.cuts) c.lambda += t.x;
    return out;
}

WeightedPolygon flip_cut(const WeightedPolygon& w, std::size_t j) {
    validate_weighted(w);
    if (j >= w.cuts.size()) throw ConfigError("cut index out of range");
    const Rational lambda = w.cuts[j].lambda;
    // Reversing the cut re-develops the right half-plane across the old cut
    // ray; the fake corner on the old ray straightens and a new one appears
    // on the opposite side. The piecewise slope is the old orientation.
    const Rational slope(w.cuts[j].eps);

    // Split every edge (and ray) crossing the cut line, then shear the
    // closed right half-plane by (x, y) -> (x, y + slope (x - lambda)).
    const RationalPolygon& poly = w.polygon;
    std::vector<RatPoint> verts;
    const auto push_crossing = [&](const RatPoint& a, const RatPoint& b) {
        if ((a.x < lambda && lambda < b.x) || (b.x < lambda && lambda < a.x)) {
            const Rational t = (lambda - a.x) / (b.x - a.x);
            verts.push_back({lambda, a.y + t * (b.y - a.y)});
        }
    };
    const auto m = poly.vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
        verts.push_back(poly.vertices[i]);
        if (poly.unbounded && i + 1 == m) break;
        push_crossing(poly.vertices[i], poly.vertices[(i + 1) % m]);
    }
    RationalPolygon out;
    out.unbounded = poly.unbounded;
    const auto shear_point = [&](RatPoint v) {
        if (!(v.x < lambda)) v.y += slope * (v.x - lambda);
        return v;
    };
    for (const auto& v : verts) out.vertices.push_back(shear_point(v));
    if (poly.unbounded) {
        const auto shear_dir = [&](RatPoint d) {
            d.y += slope * d.x;
            return d;
        };
        // A ray crossing the cut line gains a vertex at the crossing; a ray
        // on the right of the line shears its direction.
        const auto handle_ray = [&](const RatPoint& base, const RatPoint& dir, bool front) {
            const bool base_right = !(base.x < lambda);
            const bool crosses = (base_right && dir.x.sign() < 0) ||
                                 (!base_right && dir.x.sign() > 0);
            if (crosses) {
                const Rational t = (lambda - base.x) / dir.x;
                const RatPoint crossing{lambda, base.y + t * dir.y};
                const RatPoint new_dir = base_right ? dir : shear_dir(dir);
                if (front) {
                    out.vertices.insert(out.vertices.begin(), shear_point(crossing));
                    out.ray_in = new_dir;
                } else {
                    out.vertices.push_back(shear_point(crossing));
                    out.ray_out = new_dir;
                }
            } else {
                const RatPoint new_dir = base_right ? shear_dir(dir) : dir;
                (front ? out.ray_in : out.ray_out) = new_dir;
            }
        };
        handle_ray(poly.vertices.front(), poly.ray_in, true);
        handle_ray(poly.vertices.back(), poly.ray_out, false);
    }
    drop_flat_vertices(out);
    validate_polygon(out);

    WeightedPolygon res;
    res.polygon = out;
    res.cuts = w.cuts;
    res.cuts[j].eps = -w.cuts[j].eps;
    res.heights = w.heights;
    res.twisting = w.twisting;
    validate_weighted(res);
    return res;
}

namespace {

// Flip cuts of `w` until its orientation pattern matches `target`.
WeightedPolygon conform_eps(const WeightedPolygon& w, const std::vector<Cut>& target) {
    WeightedPolygon c = w;
    for (std::size_t j = 0; j < c.cuts.size(); ++j)
        if (c.cuts[j].eps != target[j].eps) c = flip_cut(c, j);
    return c;
}

bool exact_equal(const WeightedPolygon& a, const WeightedPolygon& b) {
    if (a.polygon.unbounded != b.polygon.unbounded) return false;
    RationalPolygon pa = a.polygon, pb = b.polygon;
    canonical_rotation(pa);
    canonical_rotation(pb);
    if (pa.vertices.size() != pb.vertices.size()) return false;
    for (std::size_t i = 0; i < pa.vertices.size(); ++i)
        if (!(pa.vertices[i] == pb.vertices[i])) return false;
    if (pa.unbounded) {
        if (primitive_direction(pa.ray_in) != primitive_direction(pb.ray_in)) return false;
        if (primitive_direction(pa.ray_out) != primitive_direction(pb.ray_out)) return false;
    }
    if (a.cuts.size() != b.cuts.size()) return false;
    for (std::size_t j = 0; j < a.cuts.size(); ++j) {
        if (!(a.cuts[j].lambda == b.cuts[j].lambda)) return false;
        if (a.cuts[j].eps != b.cuts[j].eps) return false;
        if (!(a.heights[j] == b.heights[j])) return false;
        if (a.twisting[j] != b.twisting[j]) return false;
    }
    return true;
}

std::vector<Rational> edge_slopes(const RationalPolygon& p) {
    std::vector<Rational> slopes;
    for (const auto& d : traversal_dirs(p))
        if (!(d.x == Rational(0))) slopes.push_back(d.y / d.x);
    return slopes;
}

} // namespace

namespace {

// Search translations and global shears only; cut patterns must match.
bool group_equal(const WeightedPolygon& ca, const WeightedPolygon& cb) {
    // Candidate shears come from differences of edge slopes (a shear adds k
    // to every non-vertical slope), plus a small fixed sweep.
    std::set<std::int64_t> ks;
    for (std::int64_t k = -8; k <= 8; ++k) ks.insert(k);
    for (const auto& sa : edge_slopes(ca.polygon))
        for (const auto& sb : edge_slopes(cb.polygon)) {
            const Rational d = sb - sa;
            if (d.is_integer()) ks.insert(d.num());
        }

    for (const std::int64_t k : ks) {
        WeightedPolygon sheared;
        try {
            sheared = polygon_group_action(ca, k);
        } catch (const ConvexityLoss&) {
            continue;
        }
        RationalPolygon pa = sheared.polygon, pb = cb.polygon;
        canonical_rotation(pa);
        canonical_rotation(pb);
        if (pa.vertices.empty() || pb.vertices.empty()) continue;
        const RatPoint t = pb.vertices.front() - pa.vertices.front();
        if (exact_equal(translate(sheared, t), cb)) return true;
    }
    return false;
}

} // namespace

bool weighted_polygon_equiv(const WeightedPolygon& a, const WeightedPolygon& b) {
    validate_weighted(a);
    validate_weighted(b);
    if (a.cuts.size() != b.cuts.size()) return false;
    try {
        if (group_equal(conform_eps(a, b.cuts), b)) return true;
    } catch (const ConvexityLoss&) {
    }
    try {
        if (group_equal(a, conform_eps(b, a.cuts))) return true;
    } catch (const ConvexityLoss&) {
    }
    return false;
}

} // namespace semitoric
