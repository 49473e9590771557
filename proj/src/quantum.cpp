#include "semitoric/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace semitoric {

SpinOperators spin_operators(int n) {
    if (n < 1) throw ConfigError("spin level n must be >= 1");
    const int d = n + 1;
    SpinOperators ops;
    ops.hbar = 2.0 / (n + 1);
    ops.x = Eigen::MatrixXd::Zero(d, d);
    ops.y = Eigen::MatrixXcd::Zero(d, d);
    ops.z = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) ops.z(k, k) = ops.hbar * (k - n / 2.0);
    for (int k = 0; k + 1 < d; ++k) {
        // ladder amplitude sqrt((k+1)(n-k)); x = hbar (L+ + L-)/2,
        // y = hbar (L+ - L-)/(2i)
        const double amp = std::sqrt(double(k + 1) * double(n - k));
        ops.x(k + 1, k) = ops.x(k, k + 1) = 0.5 * ops.hbar * amp;
        ops.y(k + 1, k) = std::complex<double>(0.0, -0.5 * ops.hbar * amp);
        ops.y(k, k + 1) = std::complex<double>(0.0, 0.5 * ops.hbar * amp);
    }
    return ops;
}

namespace {

// Off-diagonal H element within block m between spin indices k and k+1:
// (hbar/2) sqrt(hbar/2) sqrt((k+1)(n-k)(m-k)). The paper's coupling pairs
// the spin raising ladder with the oscillator annihilator, which is what
// keeps H block-diagonal against J.
double coupling(int n, int m, int k, double hbar) {
    return 0.5 * hbar * std::sqrt(0.5 * hbar) *
           std::sqrt(double(k + 1) * double(n - k) * double(m - k));
}

} // namespace

JHOperators build_JH_operators(const QuantizationConfig& config) {
    config.validate();
    const int n = config.n;
    const int nmax = config.cutoff();
    const double hbar = config.hbar();

    JHOperators out;
    out.hbar = hbar;
    for (int m = 0; m < nmax; ++m) {
        out.block_offsets.push_back(static_cast<int>(out.basis.size()));
        const int dim = std::min(n, m) + 1;
        for (int k = 0; k < dim; ++k) out.basis.emplace_back(m, k);
    }
    const int d = static_cast<int>(out.basis.size());
    out.J = Eigen::MatrixXd::Zero(d, d);
    out.H = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const auto [m, k] = out.basis[i];
        out.J(i, i) = hbar * (m + 1) - 1.0; // = hbar (m + (1-n)/2)
        if (k + 1 <= std::min(n, m)) {
            const double t = coupling(n, m, k, hbar);
            out.H(i, i + 1) = t;
            out.H(i + 1, i) = t;
        }
    }
    return out;
}

JointSpectrum joint_spectrum(const QuantizationConfig& config) {
    config.validate();
    const int n = config.n;
    const int nmax = config.cutoff();
    const double hbar = config.hbar();

    JointSpectrum spec;
    spec.hbar = hbar;
    spec.system = "spin-oscillator";
    spec.n = n;
    spec.cutoff = nmax;
    spec.blocks_retained = nmax;

    for (int m = 0; m < nmax; ++m) {
        const int dim = std::min(n, m) + 1;
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(dim, dim);
        for (int k = 0; k + 1 < dim; ++k) {
            const double t = coupling(n, m, k, hbar);
            block(k, k + 1) = t;
            block(k + 1, k) = t;
        }
        Eigen::MatrixXd vecs;
        const auto evals = jacobi_eigenvalues(block, &vecs);
        // residual check against the block
        for (int i = 0; i < dim; ++i) {
            const double resid =
                (block * vecs.col(i) - evals[i] * vecs.col(i)).lpNorm<Eigen::Infinity>();
            if (resid > 1e-9)
                throw EigensolverFailure("residual " + std::to_string(resid) +
                                         " in block m = " + std::to_string(m));
        }
        const double l1 = hbar * (m + 1) - 1.0;
        for (const double l2 : evals) spec.points.push_back({l1, l2, 1});
    }
    sort_points(spec);
    return spec;
}

JointSpectrum toric_joint_spectrum(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw ConfigError("spin levels must be >= 1");
    if (n1 != n2)
        throw MismatchedHbar("product quantization needs equal spin levels (equal hbar)");
    JointSpectrum spec;
    spec.hbar = 2.0 / (n1 + 1);
    spec.system = "double-spin";
    spec.n = n1;
    spec.blocks_retained = n1 + 1;
    const auto zs = spin_z_spectrum(n1);
    for (const double a : zs)
        for (const double b : zs) spec.points.push_back({a, b, 1});
    sort_points(spec);
    return spec;
}

std::vector<double> spin_z_spectrum(int n) {
    std::vector<double> out;
    const double hbar = 2.0 / (n + 1);
    for (int k = 0; k <= n; ++k) out.push_back(hbar * (k - n / 2.0));
    return out;
}

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, Eigen::MatrixXd* vectors) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) < 1e-13 * scale) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    std::vector<double> evals(n);
    for (int i = 0; i < n; ++i) evals[i] = a(order[i], order[i]);
    if (vectors) {
        vectors->resize(n, n);
        for (int i = 0; i < n; ++i) vectors->col(i) = v.col(order[i]);
    }
    return evals;
}

} // namespace semitoric
