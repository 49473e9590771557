#include "semitoric/actions.hpp"

#include <algorithm>
#include <cmath>

#include "semitoric/envelope.hpp"
#include "semitoric/flow.hpp"

namespace semitoric {

namespace {

double clamp1(double t) { return std::max(-1.0, std::min(1.0, t)); }

// R(z)^2 on the fiber J = j of the spin-oscillator.
double r2_of(double j, double z) {
    return 0.5 * (j - z) * (1.0 - z * z);
}

// chi-measure of { R(z) cos(chi) <= h } at fixed z.
double chi_measure(double j, double h, double z) {
    const double r2 = r2_of(j, z);
    if (r2 <= 0.0) return h >= 0.0 ? 2.0 * M_PI : 0.0;
    const double r = std::sqrt(r2);
    return 2.0 * M_PI - 2.0 * std::acos(clamp1(h / r));
}

double simpson(double j, double h, double a, double b, double fa, double fm, double fb,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = chi_measure(j, h, lm), frm = chi_measure(j, h, rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(j, h, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           simpson(j, h, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

} // namespace

double reduced_action_spin_osc(double j, double h, double tol) {
    if (j <= -1.0) throw SingularValue("J value outside the open image");
    const double zhi = std::min(1.0, j);
    // split at the turning points R(z)^2 = h^2 (roots of a cubic), found by
    // a sign-change scan plus bisection
    std::vector<double> cuts{-1.0, zhi};
    const auto g = [&](double z) { return r2_of(j, z) - h * h; };
    const int scan = 512;
    for (int i = 0; i < scan; ++i) {
        double a = -1.0 + (zhi + 1.0) * i / scan;
        double b = -1.0 + (zhi + 1.0) * (i + 1) / scan;
        if (g(a) == 0.0 || g(a) * g(b) >= 0.0) continue;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            if (g(a) * g(m) <= 0.0) b = m; else a = m;
        }
        cuts.push_back(0.5 * (a + b));
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-14) continue;
        const double m = 0.5 * (a + b);
        acc += simpson(j, h, a, b, chi_measure(j, h, a), chi_measure(j, h, m),
                       chi_measure(j, h, b), tol, 48);
    }
    return acc / (2.0 * M_PI);
}

double reduced_action_spin_osc_dh(double j, double h, double step) {
    return (reduced_action_spin_osc(j, h + step) - reduced_action_spin_osc(j, h - step)) /
           (2.0 * step);
}

double ActionChart::value(double cx, double cy) const {
    const double fx = (cx - x0) / dx();
    const double fy = (cy - y0) / dy();
    const int ix = std::max(0, std::min(nx - 2, static_cast<int>(std::floor(fx))));
    const int iy = std::max(0, std::min(ny - 2, static_cast<int>(std::floor(fy))));
    const double tx = fx - ix, ty = fy - iy;
    const auto at = [&](int i, int j2) { return a2[j2 * nx + i]; };
    return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
           (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

Eigen::Matrix2d ActionChart::differential(double cx, double cy) const {
    Eigen::Matrix2d d;
    const double hx = dx(), hy = dy();
    d(0, 0) = 1.0;
    d(0, 1) = 0.0;
    d(1, 0) = (value(std::min(cx + hx, x1), cy) - value(std::max(cx - hx, x0), cy)) /
              (std::min(cx + hx, x1) - std::max(cx - hx, x0));
    d(1, 1) = (value(cx, std::min(cy + hy, y1)) - value(cx, std::max(cy - hy, y0))) /
              (std::min(cy + hy, y1) - std::max(cy - hy, y0));
    return d;
}

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

// Newton solve F(p) = c over the chart seeds; first hit wins.
std::optional<PhasePoint> find_fiber_point(const System& sys, const Eigen::Vector2d& c) {
    for (const auto& box : sys.search_boxes()) {
        const int d = static_cast<int>(box.lo.size());
        for (int si = 0; si < 64; ++si) {
            Eigen::VectorXd x(d);
            static const int primes[4] = {2, 3, 5, 7};
            for (int k = 0; k < d; ++k)
                x(k) = box.lo(k) + (box.hi(k) - box.lo(k)) * halton(si + 1, primes[k]);
            PhasePoint pc{box.chart, x};
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                const Eigen::VectorXd f = sys.momentum_map(pc);
                const Eigen::Vector2d err(f(0) - c(0), f(1) - c(1));
                if (err.lpNorm<Eigen::Infinity>() < 1e-12) {
                    ok = true;
                    break;
                }
                Eigen::MatrixXd jac(2, d);
                jac.row(0) = sys.grad(0, pc).transpose();
                jac.row(1) = sys.grad(1, pc).transpose();
                const Eigen::Matrix2d jjt = jac * jac.transpose();
                if (std::abs(jjt.determinant()) < 1e-14) break;
                pc.coords -= jac.transpose() * jjt.ldlt().solve(err);
                if (sys.id() == SystemId::SphericalPendulum &&
                    pc.coords(0) * pc.coords(0) + pc.coords(1) * pc.coords(1) >= 0.98)
                    break;
            }
            if (ok) return pc;
        }
    }
    return std::nullopt;
}

// Distance from y to the circle orbit of p, minimized over the angle; also
// reports the minimizing angle.
std::pair<double, double> orbit_distance(const System& sys, const Eigen::VectorXd& y,
                                         const PhasePoint& p) {
    double best = std::numeric_limits<double>::infinity();
    double best_th = 0.0;
    const int coarse = 96;
    for (int i = 0; i < coarse; ++i) {
        const double th = 2.0 * M_PI * i / coarse;
        const double d = (sys.circle_flow(0, p, th).coords - y).norm();
        if (d < best) {
            best = d;
            best_th = th;
        }
    }
    // golden-section refinement around the coarse minimum
    double a = best_th - 2.0 * M_PI / coarse, b = best_th + 2.0 * M_PI / coarse;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    for (int it = 0; it < 48; ++it) {
        const double d1 = (sys.circle_flow(0, p, c1).coords - y).norm();
        const double d2 = (sys.circle_flow(0, p, c2).coords - y).norm();
        if (d1 < d2) b = c2; else a = c1;
        c1 = b - phi * (b - a);
        c2 = a + phi * (b - a);
    }
    const double th = 0.5 * (a + b);
    return {(sys.circle_flow(0, p, th).coords - y).norm(), th};
}

} // namespace

FirstReturn reduced_first_return(const System& sys, const Eigen::Vector2d& c) {
    const auto start = find_fiber_point(sys, c);
    if (!start) throw SingularValue("no fiber point at the requested value");
    const PhasePoint p0 = sys.to_embedded(*start);

    // Integrate the H-flow and watch the distance to the J-orbit of the
    // start point: the first interior minimum below tolerance is the return.
    FlowOptions fo;
    fo.tol = 1e-11;
    const double dt = 0.02;
    PhasePoint cur = p0;
    PhasePoint prev_state = p0;
    double t = 0.0;
    double d_first = -1.0;
    double prev_d = 0.0, prev_prev_d = 0.0;
    double prev_t = 0.0;
    bool armed = false;
    for (int step = 1; step <= 20000; ++step) {
        const PhasePoint before = cur;
        cur = flow_integrate(sys, 1, cur, dt, fo).point;
        t += dt;
        const auto [d, th] = orbit_distance(sys, cur.coords, p0);
        if (d_first < 0.0) d_first = d;
        if (step >= 3 && armed && prev_d < d && prev_d < prev_prev_d) {
            // refine the orbit-distance minimum inside [prev_t - dt,
            // prev_t + dt], integrating short segments from the bracket edge
            const PhasePoint edge = prev_state; // state at prev_t - dt
            const double ta = prev_t - dt, tb = prev_t + dt;
            const auto dist_at = [&](double tt) {
                const auto y = flow_integrate(sys, 1, edge, tt - ta, fo).point.coords;
                return orbit_distance(sys, y, p0);
            };
            double a = ta, b = tb;
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
            for (int it = 0; it < 40; ++it) {
                if (dist_at(c1).first < dist_at(c2).first) b = c2; else a = c1;
                c1 = b - phi * (b - a);
                c2 = a + phi * (b - a);
            }
            const double tau = 0.5 * (a + b);
            const auto fin = dist_at(tau);
            if (fin.first < 1e-5) {
                FirstReturn fr;
                fr.tau = tau;
                // close the loop along the circle action; report in (-pi, pi]
                double theta = fin.second;
                if (theta > M_PI) theta -= 2.0 * M_PI;
                fr.theta = theta;
                return fr;
            }
            armed = false; // spurious local minimum; keep integrating
        }
        if (d > std::max(4.0 * d_first, 0.02)) armed = true;
        prev_prev_d = prev_d;
        prev_d = d;
        prev_t = t;
        prev_state = before;
    }
    throw SingularValue("H-flow did not return to the start orbit");
}

ActionChart classical_action(const System& sys, const ActionChartRequest& req) {
    if (req.nx < 3 || req.ny < 3) throw ConfigError("action chart needs nx, ny >= 3");
    ActionChart chart;
    chart.system = sys.name();
    chart.base = req.base;
    chart.x0 = req.x0;
    chart.x1 = req.x1;
    chart.y0 = req.y0;
    chart.y1 = req.y1;
    chart.nx = req.nx;
    chart.ny = req.ny;
    chart.a2.assign(static_cast<std::size_t>(req.nx) * req.ny, 0.0);

    switch (sys.id()) {
        case SystemId::DoubleSpin: {
            // both components are actions already: A = c up to constants
            if (std::max({std::abs(req.x0), std::abs(req.x1), std::abs(req.y0),
                          std::abs(req.y1)}) >= 1.0)
                throw SingularValue("domain touches the boundary of the image");
            for (int iy = 0; iy < req.ny; ++iy)
                for (int ix = 0; ix < req.nx; ++ix) {
                    const double cy = req.y0 + iy * chart.dy();
                    chart.a2[iy * req.nx + ix] = cy - req.base(1);
                }
            return chart;
        }
        case SystemId::SpinOscillator: {
            // the domain must avoid the bifurcation set and the cut ray
            // {x = 1, y >= 0} above the focus-focus value
            if (req.x0 <= -1.0)
                throw SingularValue("domain touches the boundary of the image");
            if (req.x0 <= 1.0 && req.x1 >= 1.0 && req.y1 >= 0.0)
                throw SingularValue("domain crosses the vertical cut above (1, 0)");
            const double a2_base =
                reduced_action_spin_osc(req.base(0), req.base(1));
            for (int iy = 0; iy < req.ny; ++iy)
                for (int ix = 0; ix < req.nx; ++ix) {
                    const double cx = req.x0 + ix * chart.dx();
                    const double cy = req.y0 + iy * chart.dy();
                    // H+(cx) = R(z*) at the interior critical point of R^2
                    const double zstar = (cx - std::sqrt(cx * cx + 3.0)) / 3.0;
                    const double hplus = std::sqrt(std::max(0.0, r2_of(cx, zstar)));
                    if (std::abs(cy) >= hplus)
                        throw SingularValue("grid point outside the open image");
                    chart.a2[iy * req.nx + ix] =
                        reduced_action_spin_osc(cx, cy) - a2_base;
                }
            return chart;
        }
        default: {
            // generic fallback: dA2 = (tau dc2 - theta dc1) / 2 pi from
            // first-return data, integrated column by column from the base
            // corner (the chart is simply connected by precondition).
            std::vector<double> tau(chart.a2.size()), theta(chart.a2.size());
            for (int iy = 0; iy < req.ny; ++iy)
                for (int ix = 0; ix < req.nx; ++ix) {
                    const Eigen::Vector2d c(req.x0 + ix * chart.dx(),
                                            req.y0 + iy * chart.dy());
                    const auto fr = reduced_first_return(sys, c);
                    tau[iy * req.nx + ix] = fr.tau;
                    theta[iy * req.nx + ix] = fr.theta;
                }
            // integrate along the bottom row, then up each column
            std::vector<double>& a2 = chart.a2;
            for (int ix = 1; ix < req.nx; ++ix)
                a2[ix] = a2[ix - 1] -
                         0.5 * (theta[ix] + theta[ix - 1]) * chart.dx() / (2.0 * M_PI);
            for (int ix = 0; ix < req.nx; ++ix)
                for (int iy = 1; iy < req.ny; ++iy)
                    a2[iy * req.nx + ix] =
                        a2[(iy - 1) * req.nx + ix] +
                        0.5 * (tau[iy * req.nx + ix] + tau[(iy - 1) * req.nx + ix]) *
                            chart.dy() / (2.0 * M_PI);
            const double base_val = chart.value(req.base(0), req.base(1));
            for (auto& v : a2) v -= base_val;
            return chart;
        }
    }
}

} // namespace semitoric
