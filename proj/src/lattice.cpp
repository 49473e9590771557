#include "semitoric/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <map>
#include <set>

#include "semitoric/errors.hpp"

namespace semitoric {

namespace {

using Vec2 = Eigen::Vector2d;

// Does the segment a-b cross the upward ray {x = cx, y >= cy}? Points with
// x exactly on the cut line belong to the left chart, so only a strict sign
// change counts.
bool crosses_cut(const Vec2& a, const Vec2& b, const CutRayD& cut, double margin) {
    const bool a_left = a.x() <= cut.x;
    const bool b_left = b.x() <= cut.x;
    if (a_left == b_left) return false;
    const double t = (cut.x - a.x()) / (b.x() - a.x());
    const double y = a.y() + t * (b.y() - a.y());
    return y >= cut.y - margin;
}

struct Graph {
    std::vector<std::vector<int>> nbrs;
};

Graph build_graph(const std::vector<Vec2>& pts, const std::vector<CutRayD>& cuts,
                  double radius, double cut_margin) {
    Graph g;
    g.nbrs.resize(pts.size());
    // cell hashing
    const double cell = radius;
    std::map<std::pair<long long, long long>, std::vector<int>> bins;
    const auto key = [&](const Vec2& p) {
        return std::make_pair(static_cast<long long>(std::floor(p.x() / cell)),
                              static_cast<long long>(std::floor(p.y() / cell)));
    };
    for (std::size_t i = 0; i < pts.size(); ++i) bins[key(pts[i])].push_back(int(i));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [kx, ky] = key(pts[i]);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = bins.find({kx + dx, ky + dy});
                if (it == bins.end()) continue;
                for (const int j : it->second) {
                    if (j == int(i)) continue;
                    if ((pts[i] - pts[j]).norm() > radius) continue;
                    bool cut_edge = false;
                    for (const auto& c : cuts)
                        if (crosses_cut(pts[i], pts[j], c, cut_margin)) cut_edge = true;
                    if (!cut_edge) g.nbrs[i].push_back(j);
                }
            }
        std::sort(g.nbrs[i].begin(), g.nbrs[i].end());
    }
    return g;
}

// Least-squares affine fit k ~ c + A (p - p0) over index set S.
struct AffineFit {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Vec2 c{0, 0};
    bool ok = false;
};

// Quadratic local model of the development, k ~ P(p - p0) with P of degree
// 2; used for predictions near the node where the affine error would round
// the wrong way.
struct QuadFit {
    Eigen::Matrix<double, 2, 6> coef = Eigen::Matrix<double, 2, 6>::Zero();
    bool ok = false;
    Vec2 eval(const Vec2& d) const {
        Eigen::Matrix<double, 6, 1> basis;
        basis << 1.0, d.x(), d.y(), d.x() * d.x(), d.x() * d.y(), d.y() * d.y();
        return coef * basis;
    }
};

QuadFit fit_quadratic(const std::vector<Vec2>& pts, const std::vector<Eigen::Vector2i>& ks,
                      const std::vector<int>& sel, const Vec2& origin) {
    QuadFit fit;
    if (sel.size() < 8) return fit;
    Eigen::MatrixXd m(sel.size(), 6);
    Eigen::MatrixXd rhs(sel.size(), 2);
    for (std::size_t r = 0; r < sel.size(); ++r) {
        const Vec2 d = pts[sel[r]] - origin;
        m(r, 0) = 1.0;
        m(r, 1) = d.x();
        m(r, 2) = d.y();
        m(r, 3) = d.x() * d.x();
        m(r, 4) = d.x() * d.y();
        m(r, 5) = d.y() * d.y();
        rhs(r, 0) = ks[sel[r]](0);
        rhs(r, 1) = ks[sel[r]](1);
    }
    const Eigen::MatrixXd gram = m.transpose() * m;
    if (std::abs(gram.determinant()) < 1e-10) return fit;
    const Eigen::MatrixXd sol = gram.ldlt().solve(m.transpose() * rhs); // 6 x 2
    fit.coef = sol.transpose();
    fit.ok = true;
    return fit;
}

AffineFit fit_affine(const std::vector<Vec2>& pts, const std::vector<Eigen::Vector2i>& ks,
                     const std::vector<int>& sel, const Vec2& origin) {
    AffineFit fit;
    if (sel.size() < 3) return fit;
    Eigen::MatrixXd m(sel.size(), 3);
    Eigen::MatrixXd rhs(sel.size(), 2);
    for (std::size_t r = 0; r < sel.size(); ++r) {
        const Vec2 d = pts[sel[r]] - origin;
        m(r, 0) = 1.0;
        m(r, 1) = d.x();
        m(r, 2) = d.y();
        rhs(r, 0) = ks[sel[r]](0);
        rhs(r, 1) = ks[sel[r]](1);
    }
    const Eigen::MatrixXd sol =
        (m.transpose() * m).ldlt().solve(m.transpose() * rhs); // 3 x 2
    fit.c = Vec2(sol(0, 0), sol(0, 1));
    // rows of a are the gradients of k1 and k2
    fit.a << sol(1, 0), sol(2, 0), sol(1, 1), sol(2, 1);
    fit.ok = std::abs(fit.a.determinant()) > 1e-12;
    return fit;
}

// Residual of the inverse fit p ~ t + M k over the selection, in p-units.
double fit_residual(const std::vector<Vec2>& pts, const std::vector<Eigen::Vector2i>& ks,
                    const std::vector<int>& sel) {
    if (sel.size() < 3) return 0.0;
    Eigen::MatrixXd m(sel.size(), 3);
    Eigen::MatrixXd rhs(sel.size(), 2);
    for (std::size_t r = 0; r < sel.size(); ++r) {
        m(r, 0) = 1.0;
        m(r, 1) = ks[sel[r]](0);
        m(r, 2) = ks[sel[r]](1);
        rhs(r, 0) = pts[sel[r]].x();
        rhs(r, 1) = pts[sel[r]].y();
    }
    const Eigen::MatrixXd sol = (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
    double worst = 0.0;
    for (std::size_t r = 0; r < sel.size(); ++r) {
        const double ex = sol(0, 0) + sol(1, 0) * m(r, 1) + sol(2, 0) * m(r, 2);
        const double ey = sol(0, 1) + sol(1, 1) * m(r, 1) + sol(2, 1) * m(r, 2);
        worst = std::max(worst, std::hypot(ex - rhs(r, 0), ey - rhs(r, 1)));
    }
    return worst;
}

// Two shortest independent neighbor offsets at the seed, Lagrange-reduced;
// ties resolved lexicographically.
std::pair<Vec2, Vec2> seed_basis(const std::vector<Vec2>& pts, const Graph& g, int seed) {
    std::vector<Vec2> offs;
    for (const int j : g.nbrs[seed]) offs.push_back(pts[j] - pts[seed]);
    if (offs.size() < 2) throw DevelopmentObstruction("seed has fewer than two neighbors");
    std::sort(offs.begin(), offs.end(), [](const Vec2& a, const Vec2& b) {
        if (a.norm() != b.norm()) return a.norm() < b.norm();
        if (a.x() != b.x()) return a.x() < b.x();
        return a.y() < b.y();
    });
    Vec2 b1 = offs[0];
    Vec2 b2;
    bool found = false;
    for (const auto& d : offs) {
        if (std::abs(b1.x() * d.y() - b1.y() * d.x()) > 0.2 * b1.norm() * d.norm()) {
            b2 = d;
            found = true;
            break;
        }
    }
    if (!found) throw DevelopmentObstruction("no independent neighbor offset at the seed");
    // Lagrange reduction
    for (int it = 0; it < 16; ++it) {
        const double mu = std::round(b1.dot(b2) / b1.squaredNorm());
        b2 -= mu * b1;
        if (b2.norm() < b1.norm()) std::swap(b1, b2); else break;
    }
    // deterministic signs: largest |component| of b1 positive; b2 oriented
    // counterclockwise from b1
    if (std::abs(b1.x()) >= std::abs(b1.y()) ? b1.x() < 0 : b1.y() < 0) b1 = -b1;
    if (b1.x() * b2.y() - b1.y() * b2.x() < 0) b2 = -b2;
    return {b1, b2};
}

} // namespace

namespace {

DevelopedLattice develop_impl(const JointSpectrum& spec, std::vector<CutRayD> cuts,
                              const DevelopOptions& opts, double* worst_residual) {
    DevelopedLattice lat;
    lat.hbar = spec.hbar;
    lat.n = spec.n;
    for (const auto& p : spec.points)
        for (int m = 0; m < p.mult; ++m) lat.points.emplace_back(p.l1, p.l2);
    const std::size_t npts = lat.points.size();
    if (npts < 8) throw EmptySpectrum("too few eigenvalues to develop");

    lat.cuts = std::move(cuts);
    std::sort(lat.cuts.begin(), lat.cuts.end(),
              [](const CutRayD& a, const CutRayD& b) { return a.x < b.x; });

    const double radius = opts.neighbor_factor * lat.hbar;
    const Graph g = build_graph(lat.points, lat.cuts, radius, 0.5 * lat.hbar);

    int starved = 0;
    for (const auto& nb : g.nbrs) starved += nb.size() < 3;
    if (starved > int(npts) / 10)
        throw DevelopmentObstruction(
            "spectrum too sparse: many eigenvalues have fewer than 3 neighbors within 3 hbar");

    // seed: farthest from the singular values (or most central without them)
    int seed = opts.seed_override;
    if (seed < 0) {
        if (!lat.cuts.empty()) {
            double best = -1.0;
            for (std::size_t i = 0; i < npts; ++i) {
                double dmin = std::numeric_limits<double>::infinity();
                for (const auto& c : lat.cuts)
                    dmin = std::min(dmin, std::hypot(lat.points[i].x() - c.x,
                                                     lat.points[i].y() - c.y));
                if (dmin > best && g.nbrs[i].size() >= 4) {
                    best = dmin;
                    seed = int(i);
                }
            }
        } else {
            Vec2 centroid(0, 0);
            for (const auto& p : lat.points) centroid += p;
            centroid /= double(npts);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < npts; ++i) {
                const double d = (lat.points[i] - centroid).norm();
                if (d < best && g.nbrs[i].size() >= 4) {
                    best = d;
                    seed = int(i);
                }
            }
        }
    }
    if (seed < 0) throw DevelopmentObstruction("no usable seed point");
    lat.seed = seed;

    const auto [b1, b2] = seed_basis(lat.points, g, seed);
    Eigen::Matrix2d basis;
    basis.col(0) = b1;
    basis.col(1) = b2;
    const Eigen::Matrix2d basis_inv = basis.inverse();

    lat.coords.assign(npts, Eigen::Vector2i::Zero());
    std::vector<std::uint8_t> assigned(npts, 0);
    lat.residual.assign(npts, 0.0);

    // breadth-first development, deterministic order by distance from seed
    using QItem = std::pair<double, int>; // (distance, point)
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
    assigned[seed] = 1;
    lat.coords[seed] = Eigen::Vector2i::Zero();
    for (const int j : g.nbrs[seed])
        queue.emplace((lat.points[j] - lat.points[seed]).norm(), j);

    while (!queue.empty()) {
        const auto [dist, i] = queue.top();
        queue.pop();
        if (assigned[i]) continue;
        // assigned neighbors of i
        std::vector<int> anbrs;
        for (const int j : g.nbrs[i])
            if (assigned[j]) anbrs.push_back(j);
        if (anbrs.empty()) continue; // re-queued later through its neighbors
        // prediction from the assigned neighborhood of i itself: quadratic
        // where the sample supports it (the development curves like log r
        // near a node and an affine step there can round the wrong way),
        // affine otherwise, single-step seed basis as a last resort
        const int pred = *std::min_element(anbrs.begin(), anbrs.end(), [&](int a, int b) {
            return (lat.points[a] - lat.points[i]).norm() <
                   (lat.points[b] - lat.points[i]).norm();
        });
        Vec2 pred_real;
        const QuadFit qfit = fit_quadratic(lat.points, lat.coords, anbrs, lat.points[i]);
        if (qfit.ok) {
            pred_real = qfit.eval(Vec2(0, 0));
        } else {
            const AffineFit fit = fit_affine(lat.points, lat.coords, anbrs, lat.points[i]);
            if (fit.ok) {
                pred_real = fit.c;
            } else {
                const Vec2 frac = basis_inv * (lat.points[i] - lat.points[pred]);
                pred_real = lat.coords[pred].cast<double>() + frac;
            }
        }
        lat.coords[i] = Eigen::Vector2i(int(std::lround(pred_real.x())),
                                        int(std::lround(pred_real.y())));
        assigned[i] = 1;
        for (const int j : g.nbrs[i])
            if (!assigned[j]) queue.emplace((lat.points[j] - lat.points[seed]).norm(), j);
    }
    int unassigned = 0;
    for (const auto a : assigned) unassigned += !a;
    if (unassigned > 0)
        throw DevelopmentObstruction(std::to_string(unassigned) +
                                     " eigenvalues unreachable from the seed chart");

    // ---- global normalization ----
    // (a) first coordinate tracks the exact J-lines
    {
        Eigen::MatrixXd m(npts, 3);
        Eigen::VectorXd rhs(npts);
        for (std::size_t i = 0; i < npts; ++i) {
            m(i, 0) = 1.0;
            m(i, 1) = lat.coords[i](0);
            m(i, 2) = lat.coords[i](1);
            rhs(i) = lat.points[i].x();
        }
        const Eigen::Vector3d sol = (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
        const double r1 = sol(1) / lat.hbar, r2 = sol(2) / lat.hbar;
        const long long i1 = std::llround(r1), i2 = std::llround(r2);
        if (std::abs(r1 - i1) > 0.2 || std::abs(r2 - i2) > 0.2 ||
            std::gcd(std::llabs(i1), std::llabs(i2)) != 1)
            throw DevelopmentObstruction(
                "lambda1 direction is not a primitive lattice row (fit " +
                std::to_string(r1) + ", " + std::to_string(r2) + ")");
        // unimodular completion with first row (i1, i2)
        long long s1 = 0, s2 = 0;
        for (long long a = -4; a <= 4 && !(i1 * s2 - i2 * s1 == 1); ++a)
            for (long long b = -4; b <= 4; ++b)
                if (i1 * b - i2 * a == 1) {
                    s1 = a;
                    s2 = b;
                }
        if (i1 * s2 - i2 * s1 != 1)
            throw DevelopmentObstruction("could not complete the J-row to a unimodular map");
        for (auto& k : lat.coords) {
            const long long k1 = i1 * k(0) + i2 * k(1);
            const long long k2 = s1 * k(0) + s2 * k(1);
            k = Eigen::Vector2i(int(k1), int(k2));
        }
    }
    // (b) second coordinate increases with lambda2
    {
        double corr = 0.0;
        double mean_k2 = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            mean_k2 += lat.coords[i](1);
            mean_y += lat.points[i].y();
        }
        mean_k2 /= double(npts);
        mean_y /= double(npts);
        for (std::size_t i = 0; i < npts; ++i)
            corr += (lat.coords[i](1) - mean_k2) * (lat.points[i].y() - mean_y);
        if (corr < 0.0)
            for (auto& k : lat.coords) k(1) = -k(1);
    }
    // (c) flatten the bottom hull edge by an integer shear
    {
        std::map<int, int> bottom;
        for (std::size_t i = 0; i < npts; ++i) {
            const auto it = bottom.find(lat.coords[i](0));
            if (it == bottom.end() || lat.coords[i](1) < it->second)
                bottom[lat.coords[i](0)] = lat.coords[i](1);
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [k1, k2] : bottom) {
            sx += k1;
            sy += k2;
            sxx += double(k1) * k1;
            sxy += double(k1) * k2;
        }
        const double nn = double(bottom.size());
        const double denom = nn * sxx - sx * sx;
        if (std::abs(denom) > 1e-9) {
            const long long sigma = std::llround((nn * sxy - sx * sy) / denom);
            if (sigma != 0)
                for (auto& k : lat.coords) k(1) -= int(sigma) * k(0);
        }
    }
    // (d) translation anchored at the lexicographically smallest eigenvalue
    {
        std::size_t lex = 0;
        for (std::size_t i = 1; i < npts; ++i) {
            const auto &a = lat.points[i], &b = lat.points[lex];
            if (a.x() < b.x() || (a.x() == b.x() && a.y() < b.y())) lex = i;
        }
        const int t1 = int(std::lround(lat.points[lex].x() / lat.hbar)) - lat.coords[lex](0);
        const int t2 = int(std::lround(lat.points[lex].y() / lat.hbar)) - lat.coords[lex](1);
        for (auto& k : lat.coords) k += Eigen::Vector2i(t1, t2);
    }

    // ---- residuals and charts ----
    for (std::size_t i = 0; i < npts; ++i) {
        std::vector<int> sel;
        for (const int j : g.nbrs[i])
            if ((lat.points[j] - lat.points[i]).norm() <= opts.fit_factor * lat.hbar)
                sel.push_back(j);
        sel.push_back(int(i));
        lat.residual[i] = fit_residual(lat.points, lat.coords, sel);
    }
    lat.chart_of.assign(npts, 0);
    for (std::size_t i = 0; i < npts; ++i)
        for (const auto& c : lat.cuts)
            if (lat.points[i].x() > c.x) ++lat.chart_of[i];
    lat.chart_residual.assign(lat.chart_count(), 0.0);
    const double excl = opts.exclusion_factor * lat.hbar;
    for (std::size_t i = 0; i < npts; ++i) {
        bool near_node = false;
        for (const auto& c : lat.cuts) {
            if (std::hypot(lat.points[i].x() - c.x, lat.points[i].y() - c.y) < excl)
                near_node = true;
            // the doubled chart boundary along the cut line is excluded too
            if (std::abs(lat.points[i].x() - c.x) < 2.0 * lat.hbar &&
                lat.points[i].y() > c.y - excl)
                near_node = true;
        }
        if (near_node) continue;
        lat.chart_residual[lat.chart_of[i]] =
            std::max(lat.chart_residual[lat.chart_of[i]], lat.residual[i]);
    }
    lat.worst_residual = 0.0;
    for (const double r : lat.chart_residual)
        lat.worst_residual = std::max(lat.worst_residual, r);
    if (worst_residual) *worst_residual = lat.worst_residual;
    return lat;
}

} // namespace

DevelopedLattice develop_lattice(const JointSpectrum& spec,
                                 const std::vector<Eigen::Vector2d>& singular_values,
                                 const DevelopOptions& opts) {
    // Each node sits on an exact eigenvalue line, but the density detector
    // locates it only to a fraction of the ball radius. Try the candidate
    // lines near the detected position and keep the one that develops most
    // consistently.
    std::vector<std::vector<double>> line_options;
    std::vector<double> all_lines;
    {
        std::set<long long> seen;
        for (const auto& p : spec.points) {
            const long long key = std::llround(p.l1 / spec.hbar * 4.0);
            if (seen.insert(key).second) all_lines.push_back(p.l1);
        }
        std::sort(all_lines.begin(), all_lines.end());
    }
    for (const auto& s : singular_values) {
        std::vector<double> cands;
        for (const double line : all_lines)
            if (std::abs(line - s.x()) <= 0.05 * spec.hbar) cands.push_back(line);
        if (cands.empty())
            for (const double line : all_lines)
                if (std::abs(line - s.x()) <= 1.25 * spec.hbar) cands.push_back(line);
        if (cands.empty()) {
            double best = std::numeric_limits<double>::infinity(), pick = s.x();
            for (const double line : all_lines)
                if (std::abs(line - s.x()) < best) {
                    best = std::abs(line - s.x());
                    pick = line;
                }
            cands.push_back(pick);
        }
        // nearest first, so ties resolve toward the detected position
        std::sort(cands.begin(), cands.end(), [&](double a, double b) {
            return std::abs(a - s.x()) < std::abs(b - s.x());
        });
        line_options.push_back(cands);
    }

    std::optional<DevelopedLattice> best_lat;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> choice(line_options.size(), 0);
    bool done = false;
    while (!done) {
        std::vector<CutRayD> cuts;
        for (std::size_t j = 0; j < line_options.size(); ++j)
            cuts.push_back({line_options[j][choice[j]], singular_values[j].y()});
        double score = std::numeric_limits<double>::infinity();
        try {
            DevelopedLattice lat = develop_impl(spec, cuts, opts, &score);
            if (std::getenv("SEMITORIC_DEBUG_LATTICE"))
                fprintf(stderr, "trial cut x=%g score=%g hbar\n", cuts.empty() ? 0.0 : cuts[0].x,
                        score / lat.hbar);
            if (score < best_score) {
                best_score = score;
                best_lat = std::move(lat);
            }
        } catch (const Error& e) {
            if (std::getenv("SEMITORIC_DEBUG_LATTICE"))
                fprintf(stderr, "trial cut x=%g failed: %s\n",
                        cuts.empty() ? 0.0 : cuts[0].x, e.what());
        }
        // advance the multi-index
        done = true;
        for (std::size_t j = 0; j < choice.size(); ++j) {
            if (++choice[j] < line_options[j].size()) {
                done = false;
                break;
            }
            choice[j] = 0;
        }
        if (choice.empty()) break;
    }
    if (line_options.empty() && !best_lat) {
        double score = std::numeric_limits<double>::infinity();
        best_lat = develop_impl(spec, {}, opts, &score);
        best_score = score;
    }
    if (!best_lat) throw DevelopmentObstruction("no cut placement develops the spectrum");
    if (best_score > opts.obstruction_factor * best_lat->hbar)
        throw DevelopmentObstruction(
            "affine residual " + std::to_string(best_score) + " exceeds " +
            std::to_string(opts.obstruction_factor) +
            " hbar: a singular value is probably missing");
    return *best_lat;
}

namespace {

Eigen::Matrix2i integer_affine_between(const std::vector<Eigen::Vector2d>& pts,
                                       const std::vector<Eigen::Vector2i>& ks,
                                       const std::vector<int>& left,
                                       const std::vector<int>& right,
                                       double fit_radius) {
    if (left.size() < 6 || right.size() < 6)
        throw NonUnipotent("not enough eigenvalues beside the crossing line");
    // continue the left chart point by point: each right-side eigenvalue is
    // predicted from the left points in its own neighborhood, keeping the
    // extrapolation short
    std::vector<Eigen::Vector2i> pred;
    std::vector<int> used;
    for (const int i : right) {
        std::vector<int> sel;
        for (const int j : left)
            if ((pts[j] - pts[i]).norm() <= fit_radius) sel.push_back(j);
        Eigen::Vector2d q;
        const QuadFit qf = fit_quadratic(pts, ks, sel, pts[i]);
        if (qf.ok) {
            q = qf.eval(Eigen::Vector2d(0, 0));
        } else {
            const AffineFit fit = fit_affine(pts, ks, sel, pts[i]);
            if (!fit.ok) continue;
            q = fit.c;
        }
        pred.emplace_back(int(std::lround(q.x())), int(std::lround(q.y())));
        used.push_back(i);
    }
    if (used.size() < 6)
        throw NonUnipotent("not enough fittable eigenvalues beside the crossing line");
    // solve pred = T k + d over the used right points (real LS, exact check)
    Eigen::MatrixXd m(used.size(), 3);
    Eigen::MatrixXd rhs(used.size(), 2);
    for (std::size_t r = 0; r < used.size(); ++r) {
        m(r, 0) = 1.0;
        m(r, 1) = ks[used[r]](0);
        m(r, 2) = ks[used[r]](1);
        rhs(r, 0) = pred[r](0);
        rhs(r, 1) = pred[r](1);
    }
    const Eigen::MatrixXd sol = (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
    Eigen::Matrix2i t;
    t << int(std::lround(sol(1, 0))), int(std::lround(sol(2, 0))),
        int(std::lround(sol(1, 1))), int(std::lround(sol(2, 1)));
    const Eigen::Vector2i d(int(std::lround(sol(0, 0))), int(std::lround(sol(0, 1))));
    for (std::size_t r = 0; r < used.size(); ++r) {
        const Eigen::Vector2i got = t * ks[used[r]] + d;
        if (got != pred[r])
            throw NonUnipotent("crossing comparison is not an exact integer affine map");
    }
    return t;
}

} // namespace

Eigen::Matrix2i crossing_matrix(const DevelopedLattice& lat, double x0, double y0,
                                double y1) {
    const double band = 6.0 * lat.hbar;
    std::vector<int> left, right;
    for (std::size_t i = 0; i < lat.points.size(); ++i) {
        const auto& p = lat.points[i];
        if (p.y() < y0 || p.y() > y1) continue;
        if (p.x() <= x0 && p.x() >= x0 - band) left.push_back(int(i));
        if (p.x() > x0 && p.x() <= x0 + band) right.push_back(int(i));
    }
    return integer_affine_between(lat.points, lat.coords, left, right, 4.5 * lat.hbar);
}

Eigen::Matrix2i monodromy_matrix(const DevelopedLattice& lat, int node) {
    if (node < 0 || node >= int(lat.cuts.size())) throw ConfigError("node index out of range");
    const auto& cut = lat.cuts[node];
    // band above the node, kept clear of the node's logarithmic region: use
    // the upper half of the spectrum's extent over the cut, at least 5 hbar
    // above the node
    double hi = cut.y;
    for (const auto& p : lat.points)
        if (std::abs(p.x() - cut.x) < 6.0 * lat.hbar) hi = std::max(hi, p.y());
    const double lo = std::max(cut.y + 5.0 * lat.hbar, cut.y + 0.45 * (hi - cut.y));
    return crossing_matrix(lat, cut.x, lo, hi);
}

int monodromy_index(const DevelopedLattice& lat, int node) {
    const Eigen::Matrix2i t = monodromy_matrix(lat, node);
    const Eigen::Matrix2i n = t - Eigen::Matrix2i::Identity();
    const int det = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    const int trace = t(0, 0) + t(1, 1);
    if (det != 1 || trace != 2 || (n * n) != Eigen::Matrix2i::Zero())
        throw NonUnipotent("loop transition is not conjugate to a unit shear");
    const int g = std::gcd(std::gcd(std::abs(n(0, 0)), std::abs(n(0, 1))),
                           std::gcd(std::abs(n(1, 0)), std::abs(n(1, 1))));
    return g;
}

namespace {

// Andrew monotone chain on exact integer points.
std::vector<Eigen::Vector2i> integer_hull(std::vector<Eigen::Vector2i> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a(0) != b(0) ? a(0) < b(0) : a(1) < b(1);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw HullDegenerate("fewer than 3 distinct lattice points");
    const auto cr = [](const Eigen::Vector2i& o, const Eigen::Vector2i& a,
                       const Eigen::Vector2i& b) {
        return (long long)(a(0) - o(0)) * (b(1) - o(1)) -
               (long long)(a(1) - o(1)) * (b(0) - o(0));
    };
    std::vector<Eigen::Vector2i> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cr(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cr(h[k - 2], h[k - 1], *it) <= 0) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h; // counterclockwise
}

} // namespace

RecoveredPolygonResult recover_polygon(const DevelopedLattice& lat) {
    RecoveredPolygonResult out;
    const auto hull = integer_hull(lat.coords);
    const Rational hbar_rat(2, lat.n + 1);

    // drop hull vertices that deviate from their neighbors' chord by less
    // than one lattice unit (Bohr-Sommerfeld stair noise)
    std::vector<Eigen::Vector2i> keep;
    const int m = int(hull.size());
    for (int i = 0; i < m; ++i) {
        const auto &a = hull[(i + m - 1) % m], &b = hull[i], &c = hull[(i + 1) % m];
        const Eigen::Vector2d u = (c - a).cast<double>();
        const Eigen::Vector2d w = (b - a).cast<double>();
        const double dist = std::abs(u.x() * w.y() - u.y() * w.x()) / std::max(u.norm(), 1e-9);
        if (dist >= 1.0) keep.push_back(b);
    }
    if (keep.size() < 3) keep = hull;

    WeightedPolygon poly;
    for (const auto& k : keep) {
        const Rational vx = hbar_rat * Rational(k(0));
        const Rational vy = hbar_rat * Rational(k(1));
        out.raw_vertices.emplace_back(vx.to_double(), vy.to_double());
        // snap to a low-denominator rational within hbar, per coordinate
        const auto snap = [&](const Rational& v) {
            const Rational cand = Rational::approximate(v.to_double(), 8);
            return (cand - v).abs() * Rational(lat.n + 1) < Rational(2) ? cand : v;
        };
        poly.polygon.vertices.push_back({snap(vx), snap(vy)});
    }
    // snapping can collapse near-degenerate corners; drop exact duplicates
    auto& vs = poly.polygon.vertices;
    vs.erase(std::unique(vs.begin(), vs.end(),
                         [](const RatPoint& a, const RatPoint& b) { return a == b; }),
             vs.end());
    if (vs.size() >= 2 && vs.front() == vs.back()) vs.pop_back();
    if (vs.size() < 3) throw HullDegenerate("snapped hull collapsed");

    for (std::size_t j = 0; j < lat.cuts.size(); ++j) {
        Cut cut;
        // the node sits on an exact eigenvalue line; snap its x to the
        // nearest populated lambda1 value, then to a short rational
        double line = lat.cuts[j].x;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : lat.points) {
            const double d = std::abs(p.x() - lat.cuts[j].x);
            if (d < best) {
                best = d;
                line = p.x();
            }
        }
        cut.lambda = Rational::approximate(line, 8);
        cut.eps = +1; // recovery convention: cuts point upward
        poly.cuts.push_back(cut);
        const auto vol = recover_volume(lat, int(j));
        poly.heights.push_back(vol.snapped);
        poly.twisting.push_back(0); // twisting-index recovery is out of scope
    }
    validate_weighted(poly);
    out.polygon = poly;
    return out;
}

RecoveredVolumeResult recover_volume(const DevelopedLattice& lat, int node) {
    if (node < 0 || node >= int(lat.cuts.size())) throw ConfigError("node index out of range");
    const auto& cut = lat.cuts[node];
    // local affine fit below/beside the node (no cut interference there)
    std::vector<int> sel;
    for (std::size_t i = 0; i < lat.points.size(); ++i) {
        const double dx = lat.points[i].x() - cut.x, dy = lat.points[i].y() - cut.y;
        if (std::hypot(dx, dy) <= 5.0 * lat.hbar && dy <= 0.5 * lat.hbar)
            sel.push_back(int(i));
    }
    if (sel.size() < 6) throw HullDegenerate("too few eigenvalues near the node");
    Eigen::Vector2d origin(0, 0);
    for (const int i : sel) origin += lat.points[i];
    origin /= double(sel.size());
    const AffineFit fit = fit_affine(lat.points, lat.coords, sel, origin);
    if (!fit.ok) throw HullDegenerate("degenerate fit near the node");
    const Eigen::Vector2d k_node =
        fit.c + fit.a * (Eigen::Vector2d(cut.x, cut.y) - origin);

    // minimum developed second coordinate on the node's vertical line
    double kmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lat.points.size(); ++i)
        if (std::abs(lat.points[i].x() - cut.x) < 0.5 * lat.hbar)
            kmin = std::min(kmin, double(lat.coords[i](1)));
    if (!std::isfinite(kmin)) throw HullDegenerate("no eigenvalue line under the node");

    RecoveredVolumeResult res;
    res.node_lattice_position =
        Eigen::Vector2d(lat.hbar * k_node.x(), lat.hbar * k_node.y());
    res.raw = lat.hbar * (k_node.y() - kmin);
    const Rational cand = Rational::approximate(res.raw, 8);
    res.snapped = std::abs(cand.to_double() - res.raw) < 2.0 * lat.hbar
                      ? cand
                      : Rational::approximate(res.raw, 1000);
    return res;
}

} // namespace semitoric
