#include "semitoric/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "semitoric/singular.hpp"

namespace semitoric {

namespace {

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

// Newton along grad J to put a chart point on the fiber {J = level}.
bool project_to_fiber(const System& sys, int con, double level, PhasePoint& pc) {
    for (int it = 0; it < 60; ++it) {
        const double j = sys.component(con, pc);
        const double err = j - level;
        if (std::abs(err) < 1e-13 * std::max(1.0, std::abs(level))) return true;
        const Eigen::VectorXd gj = sys.grad(con, pc);
        const double n2 = gj.squaredNorm();
        if (n2 < 1e-16) return false;
        Eigen::VectorXd next = pc.coords - (err / n2) * gj;
        if (sys.id() == SystemId::SphericalPendulum && pc.chart != 0 &&
            next(0) * next(0) + next(1) * next(1) >= 0.98)
            return false;
        pc.coords = next;
    }
    return false;
}

struct LocalResult {
    PhasePoint point;
    double value;
    double stationarity;
    double mu;
};

bool run_from_seed(const System& sys, int con, double level, int obj, bool maximize,
                   const FiberOptions& opts, PhasePoint pc, LocalResult& out) {
    if (!project_to_fiber(sys, con, level, pc)) return false;
    const double sgn = maximize ? 1.0 : -1.0;
    double step = 0.25;
    for (int it = 0; it < opts.max_iters; ++it) {
        const Eigen::VectorXd gh = sys.grad(obj, pc);
        const Eigen::VectorXd gj = sys.grad(con, pc);
        const double n2 = gj.squaredNorm();
        Eigen::VectorXd dir;
        if (n2 < 1e-18) {
            // J-critical fiber point: the fiber degenerates; H is stationary
            // along it when its projected gradient has nowhere to go.
            dir = gh;
        } else {
            dir = gh - (gh.dot(gj) / n2) * gj;
        }
        const double gnorm = dir.norm();
        if (gnorm < 1e-12 * std::max(1.0, gh.norm())) break;
        bool moved = false;
        const double h0 = sys.component(obj, pc);
        for (int bt = 0; bt < 24; ++bt) {
            PhasePoint trial = pc;
            trial.coords += sgn * step * dir;
            if (sys.id() == SystemId::SphericalPendulum && trial.chart != 0 &&
                trial.coords(0) * trial.coords(0) + trial.coords(1) * trial.coords(1) >= 0.98) {
                step *= 0.5;
                continue;
            }
            if (!project_to_fiber(sys, con, level, trial)) {
                step *= 0.5;
                continue;
            }
            const double h1 = sys.component(obj, trial);
            if (sgn * (h1 - h0) > 0.0) {
                pc = trial;
                moved = true;
                step = std::min(step * 1.8, 2.0);
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    // Lagrange-Newton polish of the stationarity system
    //   grad H - mu grad J = 0,  J = level.
    const int d = static_cast<int>(pc.coords.size());
    double mu = 0.0;
    {
        const Eigen::VectorXd gh = sys.grad(obj, pc);
        const Eigen::VectorXd gj = sys.grad(con, pc);
        const double n2 = gj.squaredNorm();
        mu = n2 > 1e-18 ? gh.dot(gj) / n2 : 0.0;
    }
    for (int it = 0; it < 40; ++it) {
        const Eigen::VectorXd gh = sys.grad(obj, pc);
        const Eigen::VectorXd gj = sys.grad(con, pc);
        Eigen::VectorXd res(d + 1);
        res.head(d) = gh - mu * gj;
        res(d) = sys.component(con, pc) - level;
        if (res.lpNorm<Eigen::Infinity>() < 1e-12) break;
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + 1, d + 1);
        kkt.topLeftCorner(d, d) = sys.hess(obj, pc) - mu * sys.hess(con, pc);
        kkt.block(0, d, d, 1) = -gj;
        kkt.block(d, 0, 1, d) = gj.transpose();
        const Eigen::VectorXd delta =
            kkt.fullPivLu().solve(-res);
        if (!delta.allFinite()) break;
        const double cap = 0.25;
        const double sc = std::min(1.0, cap / std::max(cap, delta.head(d).norm()));
        PhasePoint next = pc;
        next.coords += sc * delta.head(d);
        if (sys.id() == SystemId::SphericalPendulum && next.chart != 0 &&
            next.coords(0) * next.coords(0) + next.coords(1) * next.coords(1) >= 0.98)
            break;
        pc = next;
        mu += sc * delta(d);
    }

    const Eigen::VectorXd gh = sys.grad(obj, pc);
    const Eigen::VectorXd gj = sys.grad(con, pc);
    if (std::abs(sys.component(con, pc) - level) > 1e-9) return false;
    out.point = pc;
    out.value = sys.component(obj, pc);
    out.stationarity = (gh - mu * gj).lpNorm<Eigen::Infinity>();
    out.mu = mu;
    return true;
}

} // namespace

namespace {

// Rank-0 critical points sit on singular fibers and are stationary for any
// restriction; they compete as certified extremum candidates there.
const std::vector<PhasePoint>& cached_rank0(const System& sys) {
    static std::map<SystemId, std::vector<PhasePoint>> cache;
    auto it = cache.find(sys.id());
    if (it == cache.end())
        it = cache.emplace(sys.id(), find_critical_points(sys, 0).points).first;
    return it->second;
}

} // namespace

std::optional<FiberExtremum> fiber_extremum(const System& sys, int con, double level,
                                            int obj, bool maximize,
                                            const FiberOptions& opts) {
    std::optional<LocalResult> best;
    for (const auto& cp : cached_rank0(sys)) {
        if (std::abs(sys.component(con, cp) - level) > 1e-9) continue;
        LocalResult lr;
        lr.point = cp;
        lr.value = sys.component(obj, cp);
        lr.stationarity = 0.0;
        lr.mu = 0.0;
        if (!best || (maximize ? lr.value > best->value : lr.value < best->value))
            best = lr;
    }
    int produced = 0;
    for (const auto& box : sys.search_boxes()) {
        const int d = static_cast<int>(box.lo.size());
        for (int si = 0; si < opts.starts; ++si) {
            Eigen::VectorXd x(d);
            static const int primes[4] = {2, 3, 5, 7};
            for (int k = 0; k < d; ++k) {
                const double span = (box.hi(k) - box.lo(k)) * opts.seed_scale;
                const double mid = 0.5 * (box.hi(k) + box.lo(k));
                x(k) = mid + span * (halton(si + 1, primes[k]) - 0.5);
            }
            LocalResult lr;
            if (!run_from_seed(sys, con, level, obj, maximize, opts, {box.chart, x}, lr))
                continue;
            ++produced;
            if (!best || (maximize ? lr.value > best->value : lr.value < best->value))
                best = lr;
        }
    }
    if (!best) return std::nullopt;
    FiberExtremum ext;
    ext.point = best->point;
    ext.value = best->value;
    ext.stationarity = best->stationarity;
    ext.multiplier = best->mu;
    ext.certified = best->stationarity <= opts.stationarity_tol;
    (void)produced;
    return ext;
}

ImageEnvelope envelope_functions(const System& sys, const Window& window, int resolution,
                                 std::uint64_t seed) {
    if (resolution < 8) throw ConfigError("envelope resolution must be >= 8");
    if (sys.dof() != 2)
        throw ConfigError("envelope_functions needs a 2-DOF system; 1-DOF images are intervals");
    ImageEnvelope env;
    env.system = sys.name();
    env.window = window;
    const auto [jlo, jhi] = sys.j_range(0);
    env.j_min = std::max(jlo, window.xmin);
    env.j_max = std::min(jhi, window.xmax);
    env.j_clipped = !(std::isfinite(jlo) && std::isfinite(jhi)) ||
                    jlo < window.xmin || jhi > window.xmax;
    if (env.j_min >= env.j_max)
        throw EmptyFiber("window does not intersect J(M)");
    // H is bounded on every fiber of a proper J; otherwise clip to the window.
    const bool h_unbounded = !sys.flags().j_proper;

    // avoid the exact fiber-collapse endpoints of proper J
    const double pad = 1e-6 * (env.j_max - env.j_min);
    const double a = std::isfinite(jlo) && jlo >= window.xmin ? env.j_min + pad : env.j_min;
    const double b = std::isfinite(jhi) && jhi <= window.xmax ? env.j_max - pad : env.j_max;

    for (int k = 0; k < resolution; ++k) {
        const double x = a + (b - a) * k / (resolution - 1.0);
        EnvelopeSample s;
        s.x = x;
        const auto lo = fiber_extremum(sys, 0, x, 1, /*maximize=*/false);
        if (!lo) throw EmptyFiber("no fiber point found at J = " + std::to_string(x));
        s.lo = lo->value;
        s.certified = lo->certified;
        if (h_unbounded) {
            s.hi = window.ymax;
            s.hi_clipped = true;
        } else {
            const auto hi = fiber_extremum(sys, 0, x, 1, /*maximize=*/true);
            if (!hi) throw EmptyFiber("no fiber point found at J = " + std::to_string(x));
            s.hi = hi->value;
            s.certified = s.certified && hi->certified;
        }
        env.samples.push_back(s);
    }

    for (const auto& rep : singularity_census(sys, seed, 0).rank0) {
        if (rep.k_f > 0) {
            const Eigen::VectorXd f = sys.momentum_map(rep.point);
            env.focus_values.emplace_back(f(0), f(1));
        }
    }
    return env;
}

BifurcationSet bifurcation_set(const System& sys, const Window& window, int resolution,
                               std::uint64_t seed) {
    BifurcationSet bif;
    if (sys.dof() == 1) {
        for (const auto& p : find_critical_points(sys, 0).points) {
            const double v = sys.momentum_map(p)(0);
            bif.rank0_images.emplace_back(v, 0.0);
            bif.boundary.emplace_back(v, 0.0);
        }
        return bif;
    }
    const ImageEnvelope env = envelope_functions(sys, window, resolution, seed);
    for (const auto& s : env.samples) {
        bif.boundary.emplace_back(s.x, s.lo);
        if (!s.hi_clipped) bif.boundary.emplace_back(s.x, s.hi);
    }
    for (const auto& p : find_critical_points(sys, 0).points) {
        const Eigen::VectorXd f = sys.momentum_map(p);
        bif.rank0_images.emplace_back(f(0), f(1));
        // interior part: strictly between the envelopes at its J-line
        double lo = 0, hi = 0;
        bool have = false;
        for (std::size_t k = 1; k < env.samples.size(); ++k) {
            const auto &s0 = env.samples[k - 1], &s1 = env.samples[k];
            if (f(0) >= s0.x && f(0) <= s1.x) {
                const double t = (f(0) - s0.x) / std::max(1e-300, s1.x - s0.x);
                lo = s0.lo + t * (s1.lo - s0.lo);
                hi = s0.hi + t * (s1.hi - s0.hi);
                have = true;
                break;
            }
        }
        const double margin = 1e-3;
        if (have && f(1) > lo + margin && f(1) < hi - margin)
            bif.interior.emplace_back(f(0), f(1));
    }
    return bif;
}

int fiber_probe(const System& sys, const Eigen::Vector2d& c, int samples) {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& box : sys.search_boxes()) {
        const int d = static_cast<int>(box.lo.size());
        for (int si = 0; si < samples; ++si) {
            Eigen::VectorXd x(d);
            static const int primes[4] = {2, 3, 5, 7};
            for (int k = 0; k < d; ++k)
                x(k) = box.lo(k) + (box.hi(k) - box.lo(k)) * halton(si + 1, primes[k]);
            PhasePoint pc{box.chart, x};
            // Newton on both components simultaneously
            bool ok = true;
            for (int it = 0; it < 80; ++it) {
                const Eigen::VectorXd f = sys.momentum_map(pc);
                Eigen::Vector2d err(f(0) - c(0), f(1) - c(1));
                if (err.lpNorm<Eigen::Infinity>() < 1e-11) break;
                Eigen::MatrixXd jac(2, d);
                jac.row(0) = sys.grad(0, pc).transpose();
                jac.row(1) = sys.grad(1, pc).transpose();
                const Eigen::VectorXd step =
                    jac.transpose() * (jac * jac.transpose()).ldlt().solve(err);
                pc.coords -= step;
                if (sys.id() == SystemId::SphericalPendulum &&
                    pc.coords(0) * pc.coords(0) + pc.coords(1) * pc.coords(1) >= 0.98) {
                    ok = false;
                    break;
                }
                if (it == 79) ok = false;
            }
            if (!ok) continue;
            const Eigen::VectorXd f = sys.momentum_map(pc);
            if (std::abs(f(0) - c(0)) > 1e-9 || std::abs(f(1) - c(1)) > 1e-9) continue;
            pts.push_back(sys.to_embedded(pc).coords);
        }
    }
    if (pts.empty()) return 0;
    // union-find over a mesh-scale linkage graph
    std::vector<int> parent(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) parent[i] = static_cast<int>(i);
    const std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    // mesh scale: generous multiple of the typical nearest-neighbor gap
    double mesh = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i) nn = std::min(nn, (pts[i] - pts[j]).norm());
        mesh = std::max(mesh, nn);
    }
    mesh *= 2.5;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if ((pts[i] - pts[j]).norm() < mesh) parent[find(int(i))] = find(int(j));
    int comps = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (find(int(i)) == int(i)) ++comps;
    return comps;
}

} // namespace semitoric
