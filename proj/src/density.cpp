#include "semitoric/density.hpp"

#include <algorithm>
#include <cmath>

namespace semitoric {

double DensityField::sample(double x, double y) const {
    const int i = std::max(0, std::min(nx - 1, int((x - window.xmin) / cell_w())));
    const int j = std::max(0, std::min(ny - 1, int((y - window.ymin) / cell_h())));
    return at(i, j);
}

DensityField density_of_states(const JointSpectrum& spec, double delta,
                               const Window& window, int nx) {
    if (spec.points.empty()) throw EmptySpectrum("spectrum has no points");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");

    DensityField f;
    f.window = window;
    f.hbar = spec.hbar;
    f.delta = delta;
    f.radius = std::pow(spec.hbar, delta);
    const double w = window.xmax - window.xmin, h = window.ymax - window.ymin;
    f.nx = nx > 0 ? nx : std::max(8, int(std::ceil(w / (f.radius / 2.0))));
    f.ny = std::max(8, int(std::ceil(f.nx * h / w)));
    f.value.assign(static_cast<std::size_t>(f.nx) * f.ny, 0.0);
    f.outside.assign(f.value.size(), 0);

    // bin the spectrum for ball counting
    const double r2 = f.radius * f.radius;
    const double ball_area = M_PI * r2;
    std::vector<int> counts(f.value.size(), 0);
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            const double x = f.cx(i), y = f.cy(j);
            int c = 0;
            for (const auto& p : spec.points) {
                const double dx = p.l1 - x, dy = p.l2 - y;
                if (dx * dx + dy * dy <= r2) c += p.mult;
            }
            counts[j * f.nx + i] = c;
            f.value[j * f.nx + i] = c * spec.hbar * spec.hbar / ball_area;
        }
    }
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            if (counts[j * f.nx + i] != 0) continue;
            bool neighbor_hit = false;
            for (int dj = -1; dj <= 1 && !neighbor_hit; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny) continue;
                    if (counts[jj * f.nx + ii] != 0) {
                        neighbor_hit = true;
                        break;
                    }
                }
            if (!neighbor_hit) f.outside[j * f.nx + i] = 1;
        }
    return f;
}

namespace {

// The raw density at a focus-focus value exceeds the regular background
// only logarithmically in hbar, so at desk scale the peak is a local
// feature standing on a smoothly varying field rather than a multiple of
// the global median. Detection therefore measures the local contrast of a
// cell against the median of its Chebyshev-radius-2 ring, compares it with
// theta robust deviations of that contrast over the core cells (at least a
// ball radius away from the boundary front), and keeps only peaks that
// persist across the two hbar scales without their contrast collapsing --
// regular ridges flatten as hbar shrinks, the focus peak does not.

double ring_median(const DensityField& f, int i, int j) {
    std::vector<double> ring;
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
            if (std::max(std::abs(di), std::abs(dj)) != 2) continue;
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny || f.is_outside(ii, jj))
                continue;
            ring.push_back(f.at(ii, jj));
        }
    if (ring.empty()) return 0.0;
    std::sort(ring.begin(), ring.end());
    return ring[ring.size() / 2];
}

struct FieldStats {
    double median = 0.0, mad = 0.0; // of the core cells' local contrast
};

struct Candidate {
    Eigen::Vector2d pos;
    double contrast = 0.0;
};

std::vector<std::uint8_t> core_mask(const DensityField& f) {
    // core cells sit at least one ball radius away from the inside/outside
    // front and from the window edge
    std::vector<Eigen::Vector2d> front;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            if (f.is_outside(i, j)) continue;
            bool edge = i == 0 || j == 0 || i == f.nx - 1 || j == f.ny - 1;
            for (int dj = -1; dj <= 1 && !edge; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny) continue;
                    if (f.is_outside(ii, jj)) edge = true;
                }
            if (edge) front.emplace_back(f.cx(i), f.cy(j));
        }
    std::vector<std::uint8_t> core(f.value.size(), 0);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            if (f.is_outside(i, j)) continue;
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& fr : front)
                dist = std::min(dist, std::hypot(f.cx(i) - fr.x(), f.cy(j) - fr.y()));
            if (dist >= f.radius) core[j * f.nx + i] = 1;
        }
    return core;
}

std::vector<Candidate> field_candidates(const DensityField& f, double theta,
                                        FieldStats* stats_out) {
    const auto core = core_mask(f);
    std::vector<double> contrasts;
    for (int j = 1; j + 1 < f.ny; ++j)
        for (int i = 1; i + 1 < f.nx; ++i)
            if (core[j * f.nx + i])
                contrasts.push_back(f.at(i, j) - ring_median(f, i, j));
    FieldStats st;
    if (!contrasts.empty()) {
        std::vector<double> sorted = contrasts;
        std::sort(sorted.begin(), sorted.end());
        st.median = sorted[sorted.size() / 2];
        std::vector<double> dev;
        for (const double v : contrasts) dev.push_back(std::abs(v - st.median));
        std::sort(dev.begin(), dev.end());
        st.mad = dev[dev.size() / 2];
    }
    if (stats_out) *stats_out = st;
    const double thr = theta * 1.4826 * std::max(st.mad, 1e-12);

    std::vector<Candidate> cands;
    for (int j = 1; j + 1 < f.ny; ++j)
        for (int i = 1; i + 1 < f.nx; ++i) {
            const double v = f.at(i, j);
            if (f.is_outside(i, j)) continue;
            const double contrast = v - ring_median(f, i, j);
            if (contrast <= thr) continue;
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (f.at(i + di, j + dj) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            // Refine against the expected local form of the density near a
            // focus-focus value, v(c) ~ a - b log|c - mu|: grid-search mu in
            // a cell-sized box around the peak, solving the inner linear
            // least squares in (a, b) at each trial.
            std::vector<Eigen::Vector2d> cell_pos;
            std::vector<double> cell_val;
            const int reach = int(std::ceil(1.2 * f.radius / f.cell_w())) + 1;
            for (int dj = -reach; dj <= reach; ++dj)
                for (int di = -reach; di <= reach; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny || f.is_outside(ii, jj))
                        continue;
                    const Eigen::Vector2d pos(f.cx(ii), f.cy(jj));
                    if ((pos - Eigen::Vector2d(f.cx(i), f.cy(j))).norm() > 1.2 * f.radius)
                        continue;
                    cell_pos.push_back(pos);
                    cell_val.push_back(f.at(ii, jj));
                }
            const auto sse_at = [&](const Eigen::Vector2d& mu, double* b_out) {
                double s1 = 0, sl = 0, sll = 0, sv = 0, svl = 0;
                const int m = static_cast<int>(cell_pos.size());
                for (int k = 0; k < m; ++k) {
                    const double d = std::max((cell_pos[k] - mu).norm(), 1e-4);
                    const double l = std::log(d);
                    s1 += 1.0;
                    sl += l;
                    sll += l * l;
                    sv += cell_val[k];
                    svl += cell_val[k] * l;
                }
                const double det = s1 * sll - sl * sl;
                if (std::abs(det) < 1e-12) return 1e300;
                const double b = -(s1 * svl - sl * sv) / det; // v = a - b log d
                const double a = (sv + b * sl) / s1;
                if (b_out) *b_out = b;
                double sse = 0;
                for (int k = 0; k < m; ++k) {
                    const double d = std::max((cell_pos[k] - mu).norm(), 1e-4);
                    const double r = cell_val[k] - (a - b * std::log(d));
                    sse += r * r;
                }
                return sse;
            };
            Eigen::Vector2d best_mu(f.cx(i), f.cy(j));
            double best_sse = 1e300, best_b = 0.0;
            for (int gy = -8; gy <= 8; ++gy)
                for (int gx = -8; gx <= 8; ++gx) {
                    const Eigen::Vector2d mu(f.cx(i) + gx * f.cell_w() / 8.0,
                                             f.cy(j) + gy * f.cell_h() / 8.0);
                    double b = 0.0;
                    const double s = sse_at(mu, &b);
                    if (s < best_sse) {
                        best_sse = s;
                        best_mu = mu;
                        best_b = b;
                    }
                }
            if (best_b <= 0.0) continue; // not a divergent peak
            cands.push_back({best_mu, contrast});
        }
    // merge candidates closer than the ball radius, keeping the strongest
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.contrast > b.contrast; });
    std::vector<Candidate> merged;
    for (const auto& c : cands) {
        bool close = false;
        for (const auto& m : merged)
            if ((c.pos - m.pos).norm() < f.radius) close = true;
        if (!close) merged.push_back(c);
    }
    return merged;
}

} // namespace

SingularDetection detect_singular_values(const std::vector<DensityField>& fields,
                                         double theta) {
    if (fields.size() < 2)
        throw InsufficientScales("need density fields at two hbar scales");
    for (const auto& f : fields)
        if (!(f.delta >= 0.3 && f.delta <= 0.7))
            throw ConfigError("detection expects delta in [0.3, 0.7]");

    // order by decreasing hbar; the finest field provides positions
    std::vector<const DensityField*> ordered;
    for (const auto& f : fields) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->hbar > b->hbar; });
    const DensityField& coarse = *ordered.front();
    const DensityField& fine = *ordered.back();

    SingularDetection det;
    FieldStats st;
    // the fine field drives detection at the full factor; the coarse field
    // only corroborates persistence and uses a halved bar
    const auto cand_coarse = field_candidates(coarse, 0.5 * theta, nullptr);
    const auto cand_fine = field_candidates(fine, theta, &st);
    det.median = st.median;
    det.mad = st.mad;
    const double match_dist = 0.9 * std::max(coarse.radius, fine.radius);
    for (const auto& cf : cand_fine) {
        for (const auto& cc : cand_coarse) {
            if ((cf.pos - cc.pos).norm() <= match_dist &&
                cf.contrast >= 0.5 * cc.contrast) {
                det.focus.push_back(cf.pos);
                break;
            }
        }
    }
    // boundary front: interior cells of the fine field with an Outside
    // neighbor
    for (int j = 1; j + 1 < fine.ny; ++j)
        for (int i = 1; i + 1 < fine.nx; ++i) {
            if (fine.is_outside(i, j)) continue;
            bool front = false;
            for (int dj = -1; dj <= 1 && !front; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (fine.is_outside(i + di, j + dj)) {
                        front = true;
                        break;
                    }
            if (front) det.boundary.emplace_back(fine.cx(i), fine.cy(j));
        }
    return det;
}

} // namespace semitoric
