#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semitoric/density.hpp"
#include "semitoric/quantum.hpp"

using namespace semitoric;

namespace {

JointSpectrum so_spectrum(int n, double jmax = 2.4) {
    QuantizationConfig cfg;
    cfg.n = n;
    cfg.oscillator_cutoff = int(std::ceil((jmax + 1.0) / cfg.hbar())) + 2;
    return joint_spectrum(cfg);
}

const Window so_window{-1.25, 2.25, -1.25, 1.25};

} // namespace

TEST_CASE("toric grid density is near 1 and stable under hbar halving") {
    const Window w{-1.2, 1.2, -1.2, 1.2};
    const auto d1 = density_of_states(toric_joint_spectrum(19, 19), 0.5, w);
    const auto d2 = density_of_states(toric_joint_spectrum(39, 39), 0.5, w);
    // regular interior cell: estimate should approximate the unit lattice
    // density, stable across scales within 10%
    const double v1 = d1.sample(0.1, 0.05);
    const double v2 = d2.sample(0.1, 0.05);
    CHECK(std::abs(v1 - 1.0) < 0.2);
    CHECK(std::abs(v2 - 1.0) < 0.12);
    CHECK(std::abs(v2 - v1) / v1 < 0.1);
}

TEST_CASE("cells far outside the hull are Outside with zero estimate") {
    const Window w{-2.5, 2.5, -2.5, 2.5};
    const auto d = density_of_states(toric_joint_spectrum(19, 19), 0.5, w);
    CHECK(d.sample(2.2, 2.2) == 0.0);
    const int i = int((2.2 - w.xmin) / d.cell_w());
    const int j = int((2.2 - w.ymin) / d.cell_h());
    CHECK(d.is_outside(i, j));
}

TEST_CASE("density at the focus-focus value grows as hbar decreases") {
    double prev_ratio = 0.0;
    for (const int n : {10, 20, 40}) {
        const auto d = density_of_states(so_spectrum(n), 0.5, so_window);
        const double at_node = d.sample(1.0, 0.0);
        const double regular = d.sample(0.0, 0.0);
        const double ratio = at_node / regular;
        CHECK(ratio > prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio > 1.2);
}

TEST_CASE("doubling the ball radius multiplies regular counts by about 4") {
    const auto spec = so_spectrum(40);
    // delta values chosen so the radii differ by a factor 2 at this hbar
    const double r = std::pow(spec.hbar, 0.5);
    const double delta2 = std::log(2.0 * r) / std::log(spec.hbar);
    const auto d1 = density_of_states(spec, 0.5, so_window, 40);
    const auto d2 = density_of_states(spec, delta2, so_window, 40);
    // estimates divide by ball area, so equal-density fields should agree;
    // equivalently counts scale by ~4
    const double v1 = d1.sample(0.2, 0.1), v2 = d2.sample(0.2, 0.1);
    CHECK(std::abs(v2 / v1 - 1.0) < 0.2);
}

TEST_CASE("spin-oscillator: exactly one focus candidate within 0.05 of (1,0)") {
    const std::vector<DensityField> fields = {
        density_of_states(so_spectrum(20), 0.5, so_window),
        density_of_states(so_spectrum(40), 0.5, so_window)};
    const auto det = detect_singular_values(fields, 3.0);
    REQUIRE(det.focus.size() == 1);
    CHECK((det.focus[0] - Eigen::Vector2d(1.0, 0.0)).norm() < 0.05);
}

TEST_CASE("toric double-spin: no focus candidates; boundary front near the square") {
    const Window w{-1.4, 1.4, -1.4, 1.4};
    const std::vector<DensityField> fields = {
        density_of_states(toric_joint_spectrum(19, 19), 0.5, w),
        density_of_states(toric_joint_spectrum(39, 39), 0.5, w)};
    const auto det = detect_singular_values(fields, 3.0);
    CHECK(det.focus.empty());
    REQUIRE(!det.boundary.empty());
    const double hbar = 2.0 / 40.0;
    for (const auto& b : det.boundary) {
        // every front sample lies within a ball radius + cell of the square
        const double dx = std::max(0.0, std::abs(b.x()) - 1.0);
        const double dy = std::max(0.0, std::abs(b.y()) - 1.0);
        CHECK(std::max(dx, dy) < std::pow(hbar, 0.5) + 0.1);
    }
}

TEST_CASE("detection requires two scales") {
    const std::vector<DensityField> one = {
        density_of_states(so_spectrum(20), 0.5, so_window)};
    CHECK_THROWS_AS(detect_singular_values(one, 3.0), InsufficientScales);
}

TEST_CASE("empty spectrum raises") {
    JointSpectrum empty;
    empty.hbar = 0.1;
    CHECK_THROWS_AS(density_of_states(empty, 0.5, so_window), EmptySpectrum);
}
