#pragma once

// Deterministic quasi-random sampling of valid phase-space points, shared by
// the test suites. Halton sequences keep runs reproducible without seeding.

#include <cmath>
#include <vector>

#include "semitoric/systems.hpp"

namespace semitoric::tests {

inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

// Point on the unit sphere from two Halton coordinates (area-uniform).
inline Eigen::Vector3d sphere_point(double u1, double u2) {
    const double z = 2.0 * u1 - 1.0;
    const double phi = 2.0 * M_PI * u2;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

inline std::vector<PhasePoint> sample_points(const System& sys, int count, int offset = 1) {
    std::vector<PhasePoint> pts;
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
        const int ix = offset + k;
        const double h1 = halton(ix, 2), h2 = halton(ix, 3), h3 = halton(ix, 5),
                     h4 = halton(ix, 7);
        PhasePoint p;
        p.chart = 0;
        switch (sys.id()) {
            case SystemId::SpinOscillator: {
                p.coords = Eigen::VectorXd(5);
                p.coords.head(3) = sphere_point(h1, h2);
                p.coords(3) = 4.0 * h3 - 2.0;
                p.coords(4) = 4.0 * h4 - 2.0;
                break;
            }
            case SystemId::DoubleSpin: {
                p.coords = Eigen::VectorXd(6);
                p.coords.head(3) = sphere_point(h1, h2);
                p.coords.tail(3) = sphere_point(h3, h4);
                break;
            }
            case SystemId::SphereRotation: {
                p.coords = Eigen::VectorXd(3);
                p.coords = sphere_point(h1, h2);
                break;
            }
            case SystemId::SphericalPendulum: {
                p.coords = Eigen::VectorXd(6);
                const Eigen::Vector3d q = sphere_point(h1, h2);
                Eigen::Vector3d v(2.0 * h3 - 1.0, 2.0 * h4 - 1.0, halton(ix, 11) - 0.5);
                v -= q.dot(v) * q; // tangent momentum
                p.coords.head(3) = q;
                p.coords.tail(3) = 2.0 * v;
                break;
            }
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace semitoric::tests
