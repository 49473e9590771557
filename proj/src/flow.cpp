#include "semitoric/flow.hpp"

#include <cmath>

namespace semitoric {

namespace {

Eigen::VectorXd field(const System& sys, int i, const Eigen::VectorXd& e) {
    const PhasePoint p{0, e};
    return sys.poisson_tensor(p) * sys.ambient_grad(i, p);
}

// One implicit-midpoint step, solved by fixed-point iteration (the fields
// are smooth and steps are small, so a handful of sweeps reaches 1e-15).
bool midpoint_step(const System& sys, int i, const Eigen::VectorXd& y, double h,
                   Eigen::VectorXd& out) {
    Eigen::VectorXd m = y + 0.5 * h * field(sys, i, y);
    for (int it = 0; it < 64; ++it) {
        const Eigen::VectorXd next = y + 0.5 * h * field(sys, i, m);
        const double delta = (next - m).lpNorm<Eigen::Infinity>();
        m = next;
        if (delta < 1e-15 * (1.0 + m.lpNorm<Eigen::Infinity>())) {
            out = 2.0 * m - y;
            return true;
        }
    }
    return false;
}

} // namespace

FlowResult flow_integrate(const System& sys, int component, const PhasePoint& start,
                          double t, const FlowOptions& opts) {
    if (std::abs(t) > opts.max_time)
        throw ConfigError("flow time exceeds the supported window |t| <= 1e3");
    PhasePoint emb = sys.to_embedded(start);
    sys.validate(emb);

    FlowResult res;
    res.point = emb;
    if (t == 0.0) return res;

    const double dir = t > 0.0 ? 1.0 : -1.0;
    const double T = std::abs(t);
    double done = 0.0;
    double h = std::min(T, 0.05);
    const double hmin = 1e-12 * std::max(1.0, T);

    Eigen::VectorXd y = emb.coords;
    while (done < T) {
        h = std::min(h, T - done);
        Eigen::VectorXd full, half1, half2;
        const bool ok = midpoint_step(sys, component, y, dir * h, full) &&
                        midpoint_step(sys, component, y, dir * h / 2.0, half1) &&
                        midpoint_step(sys, component, half1, dir * h / 2.0, half2);
        const double err = ok ? (full - half2).lpNorm<Eigen::Infinity>()
                              : std::numeric_limits<double>::infinity();
        if (err > opts.tol) {
            h /= 2.0;
            if (h < hmin) throw StepFailure("adaptive step underflow at t = " +
                                            std::to_string(dir * done));
            continue;
        }
        y = half2;
        res.max_drift = std::max(res.max_drift, sys.project(y));
        done += h;
        if (err < opts.tol / 16.0) h *= 2.0;
        if (++res.steps > opts.max_steps)
            throw StepFailure("step budget exhausted");
    }
    res.point = PhasePoint{0, y};
    return res;
}

} // namespace semitoric
