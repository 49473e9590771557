#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semitoric/actions.hpp"
#include "semitoric/quantum.hpp"

using namespace semitoric;

TEST_CASE("reduced action limits on a J-line") {
    // A2 at the bottom of the fiber is 0, at the top it is min(1,j) + 1
    for (const double j : {0.0, 0.5, 1.7}) {
        const double top = std::min(1.0, j) + 1.0;
        CHECK(reduced_action_spin_osc(j, -2.0) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(reduced_action_spin_osc(j, 2.5) == doctest::Approx(top).epsilon(1e-9));
    }
    // symmetry A2(j, h) + A2(j, -h) = total
    for (const double h : {0.05, 0.2, 0.35}) {
        const double total = reduced_action_spin_osc(0.3, 10.0);
        CHECK(reduced_action_spin_osc(0.3, h) + reduced_action_spin_osc(0.3, -h) ==
              doctest::Approx(total).epsilon(1e-8));
    }
}

TEST_CASE("double-spin actions are the identity up to constants") {
    ActionChartRequest req;
    req.base = {0.1, -0.2};
    req.x0 = -0.5;
    req.x1 = 0.5;
    req.y0 = -0.5;
    req.y1 = 0.5;
    const auto chart = classical_action(catalog("double-spin"), req);
    CHECK(chart.value(0.3, 0.4) == doctest::Approx(0.4 - (-0.2)).epsilon(1e-12));
    const auto d = chart.differential(0.0, 0.0);
    CHECK(d(0, 0) == doctest::Approx(1.0));
    CHECK(d(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.determinant() > 0.0);
}

TEST_CASE("spin-oscillator chart: A1 = c1, det dA > 0 on the domain") {
    ActionChartRequest req;
    req.base = {0.0, -0.2};
    req.x0 = -0.2;
    req.x1 = 0.5;
    req.y0 = -0.28;
    req.y1 = -0.05;
    req.nx = 10;
    req.ny = 8;
    const auto chart = classical_action(catalog("spin-oscillator"), req);
    for (double cx = -0.15; cx <= 0.45; cx += 0.1)
        for (double cy = -0.25; cy <= -0.08; cy += 0.05) {
            const auto d = chart.differential(cx, cy);
            CHECK(d.determinant() > 0.0);
        }
    // the gauge zeroes the quadrature value at the base point; the bilinear
    // interpolant carries O(h^2) of its own
    CHECK(std::abs(chart.value(req.base(0), req.base(1))) < 5e-3);
}

TEST_CASE("chart request crossing the cut is rejected") {
    ActionChartRequest req;
    req.base = {0.5, 0.2};
    req.x0 = 0.5;
    req.x1 = 1.5;
    req.y0 = 0.05;
    req.y1 = 0.3;
    CHECK_THROWS_AS(classical_action(catalog("spin-oscillator"), req), SingularValue);
}

TEST_CASE("quantum eigenvalue counts on J-lines match A2 within 2 hbar") {
    // hbar = 0.05 -> n = 39
    QuantizationConfig cfg;
    cfg.n = 39;
    cfg.oscillator_cutoff = 3 * (cfg.n + 1);
    const double hbar = cfg.hbar();
    REQUIRE(hbar == doctest::Approx(0.05));
    const auto spec = joint_spectrum(cfg);
    for (const double j : {0.0, 0.5, 1.2}) {
        // nearest exact J-line
        double best_l1 = 1e300;
        for (const auto& p : spec.points)
            if (std::abs(p.l1 - j) < std::abs(best_l1 - j)) best_l1 = p.l1;
        for (const double c2 : {-0.2, 0.0, 0.15}) {
            int count = 0;
            for (const auto& p : spec.points)
                if (p.l1 == best_l1 && p.l2 <= c2) count += p.mult;
            const double a2 =
                reduced_action_spin_osc(best_l1, c2) - reduced_action_spin_osc(best_l1, -10.0);
            CHECK(std::abs(count * hbar - a2) < 2.0 * hbar);
        }
    }
}

TEST_CASE("dA2/dc2 log-divergence toward the focus-focus value") {
    // approach (1, 0) from below: successive halvings of the radius add the
    // same increment (log 2 / pi for this model)
    const double d1 = reduced_action_spin_osc_dh(1.0, -0.2);
    const double d2 = reduced_action_spin_osc_dh(1.0, -0.1);
    const double d3 = reduced_action_spin_osc_dh(1.0, -0.05);
    const double inc1 = d2 - d1, inc2 = d3 - d2;
    CHECK(inc1 > 0.0);
    CHECK(inc2 > 0.0);
    CHECK(std::abs(inc2 - inc1) / inc1 < 0.25);
    // the model's increment per halving is log(2)/pi
    CHECK(inc1 == doctest::Approx(std::log(2.0) / M_PI).epsilon(0.2));
}

TEST_CASE("first-return fallback reproduces the reduced quadrature (spin-oscillator)") {
    const Eigen::Vector2d c(0.3, -0.22);
    const auto fr = reduced_first_return(catalog("spin-oscillator"), c);
    // dA2/dc2 = tau / 2 pi
    const double quad = reduced_action_spin_osc_dh(c(0), c(1));
    CHECK(fr.tau / (2.0 * M_PI) == doctest::Approx(quad).epsilon(1e-3));
    // dA2/dc1 = -theta / 2 pi, checked against central differences in j
    const double dj = 1e-4;
    const double da1 = (reduced_action_spin_osc(c(0) + dj, c(1)) -
                        reduced_action_spin_osc(c(0) - dj, c(1))) /
                       (2.0 * dj);
    CHECK(-fr.theta / (2.0 * M_PI) == doctest::Approx(da1).epsilon(1e-2));
}

TEST_CASE("pendulum chart via the first-return fallback") {
    ActionChartRequest req;
    req.base = {0.45, 0.3};
    req.x0 = 0.4;
    req.x1 = 0.5;
    req.y0 = 0.25;
    req.y1 = 0.4;
    req.nx = 3;
    req.ny = 3;
    const auto chart = classical_action(catalog("spherical-pendulum"), req);
    const auto d = chart.differential(0.45, 0.32);
    CHECK(d(1, 1) > 0.0);
    CHECK(d.determinant() > 0.0);
}
