#include "semitoric/singular.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <random>

#include "semitoric/optimize.hpp"

namespace semitoric {

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

Eigen::MatrixXd jacobian_in_chart(const System& sys, const PhasePoint& pc) {
    const int n = sys.dof();
    Eigen::MatrixXd jac(n, pc.coords.size());
    for (int i = 0; i < n; ++i) jac.row(i) = sys.grad(i, pc).transpose();
    return jac;
}

struct Pattern {
    int k_e = 0, k_h = 0, k_f = 0;
    bool degenerate = false;
    bool operator==(const Pattern& o) const {
        return k_e == o.k_e && k_h == o.k_h && k_f == o.k_f && degenerate == o.degenerate;
    }
};

Pattern classify_eigs(const std::vector<std::complex<double>>& eigs) {
    Pattern pat;
    double rho = 0.0;
    for (const auto& e : eigs) rho = std::max(rho, std::abs(e));
    if (rho < 1e-12) {
        pat.degenerate = true;
        return pat;
    }
    const double tol = 1e-7 * rho;
    int imag_count = 0, real_count = 0, quad_count = 0, zeros = 0;
    for (const auto& e : eigs) {
        const bool re0 = std::abs(e.real()) < tol;
        const bool im0 = std::abs(e.imag()) < tol;
        if (re0 && im0) ++zeros;
        else if (re0) ++imag_count;   // two per elliptic block
        else if (im0) ++real_count;   // two per hyperbolic block
        else ++quad_count;            // four per focus-focus block
    }
    if (zeros > 0 || imag_count % 2 || real_count % 2 || quad_count % 4) {
        pat.degenerate = true;
        return pat;
    }
    pat.k_e = imag_count / 2;
    pat.k_h = real_count / 2;
    pat.k_f = quad_count / 4;
    return pat;
}

std::vector<std::complex<double>> eig_list(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(a.rows());
    for (int i = 0; i < a.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

// Transversal reduction at a rank-1 point: restrict the Hessian of the
// singular combination g to the symplectic orthogonal of span{X_f} modulo
// X_f itself, where f is the regular combination. Since {g,f} = 0, X_f lies
// in the kernel of Hess g at the point and the reduction is well defined.
Pattern classify_rank1(const System& sys, const PhasePoint& pc,
                       std::vector<std::complex<double>>& freq_out) {
    const int d = static_cast<int>(pc.coords.size());
    const Eigen::MatrixXd jac = jacobian_in_chart(sys, pc);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullU);
    const Eigen::Vector2d c_sing = svd.matrixU().col(1);
    const Eigen::Vector2d c_reg(-c_sing(1), c_sing(0));

    const Eigen::MatrixXd sg =
        c_sing(0) * sys.hess(0, pc) + c_sing(1) * sys.hess(1, pc);
    const Eigen::VectorXd grad_f =
        c_reg(0) * sys.grad(0, pc) + c_reg(1) * sys.grad(1, pc);
    const Eigen::MatrixXd pi = sys.poisson_tensor(pc);
    const Eigen::VectorXd xf = pi * grad_f;

    Pattern pat;
    if (xf.norm() < 1e-10) {
        pat.degenerate = true;
        return pat;
    }
    // The symplectic orthogonal of span{X_f} is ker(df); complete X_f to a
    // basis of it and drop the X_f direction.
    Eigen::JacobiSVD<Eigen::MatrixXd> ker_svd(grad_f.transpose(), Eigen::ComputeFullV);
    const Eigen::MatrixXd ker = ker_svd.matrixV().rightCols(d - 1);
    const Eigen::VectorXd xf_hat = xf / xf.norm();
    const Eigen::MatrixXd complement = ker - xf_hat * (xf_hat.transpose() * ker);
    Eigen::JacobiSVD<Eigen::MatrixXd> comp_svd(complement, Eigen::ComputeFullU);
    const Eigen::VectorXd w1 = comp_svd.matrixU().col(0);
    const Eigen::VectorXd w2 = comp_svd.matrixU().col(1);

    const Eigen::MatrixXd omega = -pi.inverse();
    const double s = w1.dot(omega * w2);
    if (std::abs(s) < 1e-10) {
        pat.degenerate = true;
        return pat;
    }
    Eigen::Matrix2d gt;
    gt(0, 0) = w1.dot(sg * w1);
    gt(0, 1) = w1.dot(sg * w2);
    gt(1, 0) = gt(0, 1);
    gt(1, 1) = w2.dot(sg * w2);
    Eigen::Matrix2d pit;
    pit << 0.0, 1.0 / s, -1.0 / s, 0.0;
    const auto eigs = eig_list(pit * gt);
    freq_out = eigs;
    return classify_eigs(eigs);
}

} // namespace

int jacobian_rank(const System& sys, const PhasePoint& p) {
    PhasePoint pc = p;
    if (p.chart == 0) pc = sys.to_chart(p, sys.preferred_chart(p));
    const Eigen::MatrixXd jac = jacobian_in_chart(sys, pc);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const double thresh = std::max(1e-8 * svd.singularValues()(0), 1e-12);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thresh) ++rank;
    return rank;
}

std::vector<std::complex<double>> linearization_eigenvalues(const System& sys,
                                                            const PhasePoint& p,
                                                            const Eigen::VectorXd& c) {
    PhasePoint pc = p;
    if (p.chart == 0) pc = sys.to_chart(p, sys.preferred_chart(p));
    const int d = static_cast<int>(pc.coords.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < sys.dof(); ++i) s += c(i) * sys.hess(i, pc);
    return eig_list(sys.poisson_tensor(pc) * s);
}

CriticalPointSearch find_critical_points(const System& sys, int rank_target,
                                         int seeds_per_box) {
    if (rank_target < 0 || rank_target >= sys.dof())
        throw ConfigError("rank target must lie in 0..n-1");
    CriticalPointSearch out;

    if (rank_target == 0) {
        std::vector<Eigen::VectorXd> found;
        for (const auto& box : sys.search_boxes()) {
            const int d = static_cast<int>(box.lo.size());
            for (int si = 0; si < seeds_per_box; ++si) {
                Eigen::VectorXd x(d);
                static const int primes[4] = {2, 3, 5, 7};
                for (int k = 0; k < d; ++k)
                    x(k) = box.lo(k) + (box.hi(k) - box.lo(k)) * halton(si + 1, primes[k]);
                // Levenberg-Marquardt on the stacked component gradients;
                // the Jacobian of the residual is the stack of Hessians.
                bool ok = false;
                double lambda = 1e-3;
                for (int it = 0; it < 80; ++it) {
                    const PhasePoint pc{box.chart, x};
                    Eigen::VectorXd r(sys.dof() * d);
                    Eigen::MatrixXd jr(sys.dof() * d, d);
                    for (int i = 0; i < sys.dof(); ++i) {
                        r.segment(i * d, d) = sys.grad(i, pc);
                        jr.block(i * d, 0, d, d) = sys.hess(i, pc);
                    }
                    if (r.lpNorm<Eigen::Infinity>() < 1e-12) {
                        ok = true;
                        break;
                    }
                    const Eigen::MatrixXd h =
                        jr.transpose() * jr + lambda * Eigen::MatrixXd::Identity(d, d);
                    Eigen::VectorXd step = h.ldlt().solve(jr.transpose() * r);
                    const double cap = 0.6;
                    if (step.norm() > cap) step *= cap / step.norm();
                    Eigen::VectorXd xn = x - step;
                    bool inside = true;
                    for (int k = 0; k < d; ++k)
                        inside = inside && xn(k) > 2.0 * box.lo(k) && xn(k) < 2.0 * box.hi(k);
                    if (sys.id() == SystemId::SphericalPendulum &&
                        xn(0) * xn(0) + xn(1) * xn(1) >= 0.98)
                        inside = false;
                    if (!inside) break;
                    x = xn;
                    lambda = std::max(1e-12, lambda * 0.3);
                }
                if (!ok) {
                    ++out.failed_seeds;
                    continue;
                }
                PhasePoint emb = sys.to_embedded({box.chart, x});
                sys.project(emb.coords);
                if (jacobian_rank(sys, emb) != 0) continue;
                bool dup = false;
                for (const auto& f : found)
                    if ((f - emb.coords).lpNorm<Eigen::Infinity>() < 1e-6) dup = true;
                if (!dup) found.push_back(emb.coords);
            }
        }
        std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
            for (int i = 0; i < a.size(); ++i)
                if (std::abs(a(i) - b(i)) > 1e-9) return a(i) < b(i);
            return false;
        });
        for (auto& f : found) out.points.push_back({0, f});
        return out;
    }

    // Rank-1 locus of a 2-DOF system: fiber extrema of H along a J-grid
    // sample the transversally singular curves.
    const auto [jlo_raw, jhi_raw] = sys.j_range(0);
    const double jlo = std::max(jlo_raw, -4.0) + 0.05;
    const double jhi = std::min(jhi_raw, 2.5) - 0.05;
    const int grid = std::max(4, seeds_per_box / 16);
    const bool has_max = std::isfinite(sys.j_range(1).second);
    for (int k = 0; k < grid; ++k) {
        const double j = jlo + (jhi - jlo) * (k + 0.5) / grid;
        for (const bool maximize : {false, true}) {
            if (maximize && !has_max) continue;
            const auto ext = fiber_extremum(sys, 0, j, 1, maximize);
            if (!ext || !ext->certified) {
                ++out.failed_seeds;
                continue;
            }
            PhasePoint emb = sys.to_embedded(ext->point);
            sys.project(emb.coords);
            if (jacobian_rank(sys, emb) == 1) out.points.push_back(emb);
        }
    }
    return out;
}

SingularityReport classify_singularity_report(const System& sys, const PhasePoint& p,
                                              std::uint64_t seed) {
    const int n = sys.dof();
    SingularityReport rep;
    rep.point = sys.to_embedded(p);
    rep.rank = jacobian_rank(sys, rep.point);
    if (rep.rank >= n)
        throw ConfigError("classify_singularity expects a critical point (rank < n)");

    const PhasePoint pc = sys.to_chart(rep.point, sys.preferred_chart(rep.point));

    if (rep.rank == 0) {
        std::mt19937_64 rng(seed ^ 0x5eb170c1ULL);
        std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
        Pattern voted;
        bool have_vote = false;
        for (int round = 0; round < 2 && !have_vote; ++round) {
            std::vector<Pattern> pats;
            std::vector<std::vector<std::complex<double>>> eig_sets;
            for (int draw = 0; draw < 5; ++draw) {
                Eigen::VectorXd c(n);
                if (n == 1) {
                    c(0) = 1.0;
                } else {
                    const double th = unif(rng);
                    c(0) = std::cos(th);
                    c(1) = std::sin(th);
                }
                auto eigs = linearization_eigenvalues(sys, pc, c);
                eig_sets.push_back(eigs);
                pats.push_back(classify_eigs(eigs));
            }
            for (std::size_t i = 0; i < pats.size(); ++i) {
                if (pats[i].degenerate) continue;
                int votes = 0;
                for (const auto& q : pats) votes += (q == pats[i]);
                if (votes >= 4) {
                    voted = pats[i];
                    have_vote = true;
                    rep.frequencies = eig_sets[i];
                    break;
                }
            }
        }
        if (!have_vote) {
            rep.degenerate = true;
            return rep;
        }
        rep.k_e = voted.k_e;
        rep.k_h = voted.k_h;
        rep.k_f = voted.k_f;
        return rep;
    }

    const Pattern pat = classify_rank1(sys, pc, rep.frequencies);
    if (pat.degenerate) {
        rep.degenerate = true;
        return rep;
    }
    rep.k_e = pat.k_e;
    rep.k_h = pat.k_h;
    rep.k_f = pat.k_f;
    return rep;
}

SingularityReport classify_singularity(const System& sys, const PhasePoint& p,
                                       std::uint64_t seed) {
    SingularityReport rep = classify_singularity_report(sys, p, seed);
    if (rep.degenerate)
        throw DegeneratePoint("eigenvalue pattern unstable across generic combinations");
    return rep;
}

SingularityCensus singularity_census(const System& sys, std::uint64_t seed,
                                     int rank1_samples) {
    SingularityCensus census;
    auto r0 = find_critical_points(sys, 0);
    census.failed_seeds = r0.failed_seeds;
    for (const auto& p : r0.points)
        census.rank0.push_back(classify_singularity_report(sys, p, seed));
    if (sys.dof() == 2) {
        auto r1 = find_critical_points(sys, 1, rank1_samples * 16);
        census.failed_seeds += r1.failed_seeds;
        for (const auto& p : r1.points)
            census.rank1_samples.push_back(classify_singularity_report(sys, p, seed));
    }
    return census;
}

} // namespace semitoric
