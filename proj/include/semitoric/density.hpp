#pragma once

// Step 1 of the inverse strategy: local density of states on a grid. Each
// cell estimates (count of joint eigenvalues within a ball of radius
// hbar^delta) * hbar^2 / (ball area); empty cells with empty neighborhoods
// are marked Outside. Focus-focus candidates are interior local maxima that
// stand far above the field's median and persist across two hbar scales.

#include <Eigen/Dense>
#include <vector>

#include "semitoric/envelope.hpp"
#include "semitoric/spectrum.hpp"

namespace semitoric {

struct DensityField {
    Window window;
    int nx = 0, ny = 0;
    double hbar = 0.0, delta = 0.5;
    double radius = 0.0; // hbar^delta
    std::vector<double> value;
    std::vector<std::uint8_t> outside;

    double cell_w() const { return (window.xmax - window.xmin) / nx; }
    double cell_h() const { return (window.ymax - window.ymin) / ny; }
    double cx(int i) const { return window.xmin + (i + 0.5) * cell_w(); }
    double cy(int j) const { return window.ymin + (j + 0.5) * cell_h(); }
    double at(int i, int j) const { return value[j * nx + i]; }
    bool is_outside(int i, int j) const { return outside[j * nx + i] != 0; }
    // value of the cell containing (x, y)
    double sample(double x, double y) const;
};

// nx = 0 picks the default resolution (cell size about radius / 2).
DensityField density_of_states(const JointSpectrum& spec, double delta,
                               const Window& window, int nx = 0);

struct SingularDetection {
    std::vector<Eigen::Vector2d> focus;    // refined candidate positions
    std::vector<Eigen::Vector2d> boundary; // inside/outside front samples
    double median = 0.0, mad = 0.0;        // statistics of the finest field
};

// Requires at least two fields with decreasing hbar; throws
// InsufficientScales otherwise. theta is the detection factor: a candidate
// cell must exceed theta * median or sit theta robust deviations above it,
// and must persist across both scales.
SingularDetection detect_singular_values(const std::vector<DensityField>& fields,
                                         double theta = 3.0);

} // namespace semitoric
