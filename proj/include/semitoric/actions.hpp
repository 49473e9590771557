#pragma once

// Classical action integrals. The first action is the J-coordinate itself
// (J generates the 2*pi-periodic flow); the second is the symplectic area
// enclosed by the H-level curve in the S^1-reduced space, normalized by
// 2*pi so that one quantum state occupies one unit cell of size hbar.
//
// For the spin-oscillator the reduced space has coordinates (z, chi) with
// area form dchi ^ dz and reduced Hamiltonian R(z) cos chi,
// R = sqrt(2 (j - z)(1 - z^2)) / 2, which gives A2 by 1-d quadrature. Other
// systems fall back to first-return data of the H-flow (period and rotation
// angle against the circle action), integrated over the chart domain.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "semitoric/systems.hpp"

namespace semitoric {

struct ActionChartRequest {
    Eigen::Vector2d base{0.0, 0.0}; // base regular value c0 (A2 = 0 gauge)
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    int nx = 9, ny = 9;
};

struct ActionChart {
    std::string system;
    Eigen::Vector2d base;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    int nx = 0, ny = 0;
    std::vector<double> a2; // row-major (iy * nx + ix)
    int log_sign = +1;      // regularization sign convention (metadata)

    double dx() const { return (x1 - x0) / (nx - 1); }
    double dy() const { return (y1 - y0) / (ny - 1); }
    double value(double cx, double cy) const;      // bilinear interpolation
    Eigen::Matrix2d differential(double cx, double cy) const; // dA, A1 = c1
};

ActionChart classical_action(const System& sys, const ActionChartRequest& req);

// Spin-oscillator reduced-space area action, exact quadrature (adaptive
// Simpson split at the turning points of R^2 = c2^2).
double reduced_action_spin_osc(double j, double h, double tol = 1e-10);

// dA2/dc2 by central differences of the quadrature.
double reduced_action_spin_osc_dh(double j, double h, double step = 1e-5);

// First-return data of the H-flow against the circle action: time tau to
// return to the J-orbit of the start point and the rotation angle theta
// closing the loop. Used by the generic action fallback.
struct FirstReturn {
    double tau = 0.0;
    double theta = 0.0;
};
FirstReturn reduced_first_return(const System& sys, const Eigen::Vector2d& c);

} // namespace semitoric
