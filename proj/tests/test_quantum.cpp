#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semitoric/quantum.hpp"

using namespace semitoric;

TEST_CASE("two-level spin: z spectrum is {-1/2, +1/2} at hbar = 1") {
    const auto ops = spin_operators(1);
    CHECK(ops.hbar == 1.0);
    CHECK(ops.z(0, 0) == doctest::Approx(-0.5));
    CHECK(ops.z(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("z extremes are +-n/(n+1)") {
    for (int n : {1, 4, 11, 40}) {
        const auto zs = spin_z_spectrum(n);
        CHECK(zs.front() == doctest::Approx(-double(n) / (n + 1)).epsilon(1e-14));
        CHECK(zs.back() == doctest::Approx(double(n) / (n + 1)).epsilon(1e-14));
    }
}

TEST_CASE("commutators [x,y] = i hbar z and cyclic") {
    for (int n : {1, 3, 8}) {
        const auto ops = spin_operators(n);
        const Eigen::MatrixXcd xc = ops.x.cast<std::complex<double>>();
        const Eigen::MatrixXcd zc = ops.z.cast<std::complex<double>>();
        const std::complex<double> ih(0.0, ops.hbar);
        CHECK((xc * ops.y - ops.y * xc - ih * zc).norm() < 1e-12);
        CHECK((ops.y * zc - zc * ops.y - ih * xc).norm() < 1e-12);
        CHECK((zc * xc - xc * zc - ih * ops.y).norm() < 1e-12);
    }
}

TEST_CASE("Casimir x^2 + y^2 + z^2 is scalar (1 - hbar^2/4)") {
    for (int n : {1, 2, 5, 12}) {
        const auto ops = spin_operators(n);
        const Eigen::MatrixXcd cas = ops.x.cast<std::complex<double>>() * ops.x +
                                     ops.y * ops.y +
                                     (ops.z.cast<std::complex<double>>() * ops.z);
        const double expect = 1.0 - ops.hbar * ops.hbar / 4.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const std::complex<double> want = i == j ? expect : 0.0;
                CHECK(std::abs(cas(i, j) - want) < 1e-10);
            }
    }
}

TEST_CASE("J spectrum lies exactly in hbar((1-n)/2 + N)") {
    for (int n : {1, 4, 10, 40}) {
        QuantizationConfig cfg;
        cfg.n = n;
        cfg.oscillator_cutoff = n + 12;
        const auto spec = joint_spectrum(cfg);
        const double hbar = cfg.hbar();
        for (const auto& p : spec.points) {
            const double idx = p.l1 / hbar - (1.0 - n) / 2.0;
            CHECK(std::abs(idx - std::round(idx)) < 1e-9);
            CHECK(std::round(idx) >= -1e-9);
        }
    }
}

TEST_CASE("[J, H] vanishes on the retained blocks") {
    for (int n : {1, 4, 10, 40}) {
        QuantizationConfig cfg;
        cfg.n = n;
        cfg.oscillator_cutoff = n == 4 ? 40 : n + 6;
        const auto ops = build_JH_operators(cfg);
        CHECK((ops.J * ops.H - ops.H * ops.J).lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK((ops.H - ops.H.transpose()).lpNorm<Eigen::Infinity>() < 1e-14);
    }
}

TEST_CASE("lowest block is one-dimensional with H eigenvalue 0") {
    QuantizationConfig cfg;
    cfg.n = 3;
    const auto spec = joint_spectrum(cfg);
    const double hbar = cfg.hbar();
    int count = 0;
    for (const auto& p : spec.points)
        if (std::abs(p.l1 - (hbar - 1.0)) < 1e-12) {
            CHECK(p.l2 == doctest::Approx(0.0));
            ++count;
        }
    CHECK(count == 1);
}

TEST_CASE("n = 1 blocks: (0,0) and (1, +-sqrt(2)/4)") {
    QuantizationConfig cfg;
    cfg.n = 1;
    const auto spec = joint_spectrum(cfg);
    // block m = 0: l1 = hbar - 1 = 0 (hbar = 1); single point (0, 0)
    std::vector<double> at0, at1;
    for (const auto& p : spec.points) {
        if (std::abs(p.l1) < 1e-12) at0.push_back(p.l2);
        if (std::abs(p.l1 - 1.0) < 1e-12) at1.push_back(p.l2);
    }
    REQUIRE(at0.size() == 1);
    CHECK(at0[0] == doctest::Approx(0.0));
    REQUIRE(at1.size() == 2);
    // 2x2 block oracle: eigenvalues +-t with t = (1/2) sqrt(1/2)
    const double t = 0.5 * std::sqrt(0.5);
    CHECK(at1[0] == doctest::Approx(-t).epsilon(1e-12));
    CHECK(at1[1] == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("every block's H-spectrum is symmetric about 0") {
    QuantizationConfig cfg;
    cfg.n = 7;
    cfg.oscillator_cutoff = 25;
    const auto spec = joint_spectrum(cfg);
    std::map<long long, std::vector<double>> by_line;
    for (const auto& p : spec.points)
        by_line[llround(p.l1 * 1e12)].push_back(p.l2);
    for (auto& [l1, l2s] : by_line) {
        for (std::size_t i = 0; i < l2s.size(); ++i)
            CHECK(l2s[i] == doctest::Approx(-l2s[l2s.size() - 1 - i]).epsilon(1e-10));
        // no accidental degeneracy within a block at tested sizes
        for (std::size_t i = 1; i < l2s.size(); ++i) CHECK(l2s[i] > l2s[i - 1] + 1e-12);
    }
}

TEST_CASE("toric product grid") {
    const auto four = toric_joint_spectrum(1, 1);
    REQUIRE(four.points.size() == 4);
    for (const auto& p : four.points) {
        CHECK(std::abs(p.l1) == doctest::Approx(0.5));
        CHECK(std::abs(p.l2) == doctest::Approx(0.5));
    }
    const auto grid = toric_joint_spectrum(9, 9);
    CHECK(grid.hbar == doctest::Approx(0.2));
    CHECK(grid.points.size() == 100);
    CHECK(grid.points.front().l1 == doctest::Approx(-0.9));
    CHECK(grid.points.back().l2 == doctest::Approx(0.9));
    // grid spacing exactly hbar in each coordinate
    const auto zs = spin_z_spectrum(9);
    for (std::size_t i = 1; i < zs.size(); ++i)
        CHECK(zs[i] - zs[i - 1] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK_THROWS_AS(toric_joint_spectrum(2, 3), MismatchedHbar);
}

TEST_CASE("cutoff validation") {
    QuantizationConfig cfg;
    cfg.n = 5;
    cfg.oscillator_cutoff = 6; // < n + 2
    CHECK_THROWS_AS(cfg.validate(), CutoffTooSmall);
}

TEST_CASE("weyl law: count * hbar^2 converges to the classical phase volume") {
    // Box B in the image; the classical value is int_B dA2/dc2 with
    // dA2/dc2 = (1/2pi) int 2/sqrt(R^2 - c2^2) dz (test-side quadrature).
    const double x0 = 0.2, x1 = 0.6, y0 = -0.2, y1 = 0.2;
    const auto dA2 = [&](double j, double h) {
        const auto R = [&](double z) {
            const double s = 2.0 * (j - z) * (1.0 - z * z);
            return s <= 0.0 ? 0.0 : 0.5 * std::sqrt(s);
        };
        const int nz = 20000;
        const double zlo = -1.0, zhi = std::min(1.0, j);
        double acc = 0.0;
        for (int i = 0; i < nz; ++i) {
            const double z = zlo + (zhi - zlo) * (i + 0.5) / nz;
            const double r = R(z);
            if (r > std::abs(h)) acc += 2.0 / std::sqrt(r * r - h * h);
        }
        return acc * (zhi - zlo) / nz / (2.0 * M_PI);
    };
    double w = 0.0;
    const int gx = 24, gy = 24;
    for (int i = 0; i < gx; ++i)
        for (int j = 0; j < gy; ++j)
            w += dA2(x0 + (x1 - x0) * (i + 0.5) / gx, y0 + (y1 - y0) * (j + 0.5) / gy);
    w *= (x1 - x0) * (y1 - y0) / (gx * gy);

    std::vector<double> ratios;
    for (int n : {10, 20, 40}) {
        QuantizationConfig cfg;
        cfg.n = n;
        cfg.oscillator_cutoff = 3 * (n + 1);
        const auto spec = joint_spectrum(cfg);
        int count = 0;
        for (const auto& p : spec.points)
            if (p.l1 >= x0 && p.l1 <= x1 && p.l2 >= y0 && p.l2 <= y1) count += p.mult;
        ratios.push_back(count * cfg.hbar() * cfg.hbar() / w);
    }
    CHECK(std::abs(ratios[2] - 1.0) < 0.15);
    CHECK(std::abs(ratios[2] - 1.0) <= std::abs(ratios[0] - 1.0) + 0.02);
}

TEST_CASE("determinism and relabeling invariance of the eigensolver") {
    QuantizationConfig cfg;
    cfg.n = 6;
    const auto a = joint_spectrum(cfg);
    const auto b = joint_spectrum(cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].l1 == b.points[i].l1); // bitwise
        CHECK(a.points[i].l2 == b.points[i].l2);
    }
    // relabeling the basis (reversal) leaves the spectrum fixed to 1e-12
    Eigen::MatrixXd m(5, 5);
    m.setZero();
    for (int k = 0; k + 1 < 5; ++k) m(k, k + 1) = m(k + 1, k) = 1.0 + 0.3 * k;
    Eigen::MatrixXd r = m.colwise().reverse().rowwise().reverse();
    const auto em = jacobi_eigenvalues(m);
    const auto er = jacobi_eigenvalues(r);
    for (int i = 0; i < 5; ++i) CHECK(em[i] == doctest::Approx(er[i]).epsilon(1e-12));
}
