#pragma once

// Second-order forward-mode jets: value, gradient and Hessian propagate
// exactly (to machine precision) through arithmetic, sqrt and the chart
// parametrizations. The singularity classifier needs exact Hessians of the
// catalog Hamiltonians, which are all compositions of rational functions and
// square roots, so this small jet type is the whole derivative story.

#include <Eigen/Dense>
#include <cmath>

namespace semitoric {

template <int N>
struct Jet {
    using Grad = Eigen::Matrix<double, N, 1>;
    using Hess = Eigen::Matrix<double, N, N>;

    double v = 0.0;
    Grad g = Grad::Zero();
    Hess h = Hess::Zero();

    Jet() = default;
    Jet(double value) : v(value) {} // NOLINT(google-explicit-constructor)

    static Jet variable(double value, int index) {
        Jet j(value);
        j.g(index) = 1.0;
        return j;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r(a.v + b.v);
        r.g = a.g + b.g;
        r.h = a.h + b.h;
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r(a.v - b.v);
        r.g = a.g - b.g;
        r.h = a.h - b.h;
        return r;
    }
    friend Jet operator-(const Jet& a) {
        Jet r(-a.v);
        r.g = -a.g;
        r.h = -a.h;
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.v * b.v);
        r.g = a.g * b.v + b.g * a.v;
        r.h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

    friend Jet inverse(const Jet& a) {
        const double iv = 1.0 / a.v;
        Jet r(iv);
        r.g = -iv * iv * a.g;
        r.h = -iv * iv * a.h + 2.0 * iv * iv * iv * a.g * a.g.transpose();
        return r;
    }

    friend Jet sqrt(const Jet& a) {
        const double s = std::sqrt(a.v);
        Jet r(s);
        r.g = a.g / (2.0 * s);
        r.h = a.h / (2.0 * s) - a.g * a.g.transpose() / (4.0 * s * s * s);
        return r;
    }

    friend Jet operator*(double c, const Jet& a) { return Jet(c) * a; }
    friend Jet operator*(const Jet& a, double c) { return a * Jet(c); }
    friend Jet operator+(double c, const Jet& a) { return Jet(c) + a; }
    friend Jet operator+(const Jet& a, double c) { return a + Jet(c); }
    friend Jet operator-(double c, const Jet& a) { return Jet(c) - a; }
    friend Jet operator-(const Jet& a, double c) { return a - Jet(c); }
    friend Jet operator/(const Jet& a, double c) { return a * Jet(1.0 / c); }
    friend Jet operator/(double c, const Jet& a) { return Jet(c) * inverse(a); }
};

using Jet4 = Jet<4>;
using Jet2d = Jet<2>;

} // namespace semitoric
