#include "semitoric/systems.hpp"

#include <algorithm>
#include <map>

namespace semitoric {

namespace {

// Stereographic sphere charts. Style 1 is centered at the south pole
// (z = -1 at the chart origin, projection point the north pole), style 2 at
// the north pole with the sign of b flipped, so both carry the symplectic
// form 4/(1+r^2)^2 da^db for the single orientation {x,y} = -z.
template <typename T>
void stereo_to_xyz(int style, const T& a, const T& b, T& x, T& y, T& z) {
    const T r2 = a * a + b * b;
    const T d = 1.0 / (1.0 + r2);
    x = 2.0 * a * d;
    if (style == 1) {
        y = 2.0 * b * d;
        z = (r2 - 1.0) * d;
    } else {
        y = -1.0 * (2.0 * b * d);
        z = (1.0 - r2) * d;
    }
}

// Graph chart of T*S^2 over a hemisphere, sigma = -1 (chart 1) or +1
// (chart 2). Coordinates (q1, q2, pi1, pi2) are canonical for the induced
// form; the fiber coordinates recover p via p_t = pi - (q_t . pi) q_t,
// p3 = -q3 (q_t . pi).
template <typename T>
void tstar_graph_to_embedded(int sigma, const T* c, T* e) {
    using std::sqrt;
    const T q1 = c[0], q2 = c[1], pi1 = c[2], pi2 = c[3];
    const T q3 = double(sigma) * sqrt(1.0 - q1 * q1 - q2 * q2);
    const T dot = q1 * pi1 + q2 * pi2;
    e[0] = q1;
    e[1] = q2;
    e[2] = q3;
    e[3] = pi1 - dot * q1;
    e[4] = pi2 - dot * q2;
    e[5] = -1.0 * (q3 * dot);
}

template <typename T>
void chart_to_emb(SystemId id, int chart, const T* c, T* e) {
    switch (id) {
        case SystemId::SpinOscillator:
            stereo_to_xyz(chart, c[0], c[1], e[0], e[1], e[2]);
            e[3] = c[2];
            e[4] = c[3];
            return;
        case SystemId::DoubleSpin: {
            const int s1 = 1 + (chart - 1) / 2;
            const int s2 = 1 + (chart - 1) % 2;
            stereo_to_xyz(s1, c[0], c[1], e[0], e[1], e[2]);
            stereo_to_xyz(s2, c[2], c[3], e[3], e[4], e[5]);
            return;
        }
        case SystemId::SphereRotation:
            stereo_to_xyz(chart, c[0], c[1], e[0], e[1], e[2]);
            return;
        case SystemId::SphericalPendulum:
            tstar_graph_to_embedded(chart == 1 ? -1 : +1, c, e);
            return;
    }
    throw ConfigError("unknown system id");
}

template <typename T>
T component_emb(SystemId id, int i, const T* e) {
    switch (id) {
        case SystemId::SpinOscillator:
            if (i == 0) return (e[3] * e[3] + e[4] * e[4]) * 0.5 + e[2];
            return (e[3] * e[0] + e[4] * e[1]) * 0.5;
        case SystemId::DoubleSpin:
            return i == 0 ? e[2] : e[5];
        case SystemId::SphereRotation:
            return e[2];
        case SystemId::SphericalPendulum:
            if (i == 0) return e[0] * e[4] - e[1] * e[3];
            return (e[3] * e[3] + e[4] * e[4] + e[5] * e[5]) * 0.5 + e[2];
    }
    throw ConfigError("unknown system id");
}

template <int N, int E>
void jet_component_in_chart(SystemId id, int i, int chart, const Eigen::VectorXd& x,
                            double& v, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    std::array<Jet<N>, N> c;
    for (int k = 0; k < N; ++k) c[k] = Jet<N>::variable(x(k), k);
    std::array<Jet<N>, E> e;
    if (chart == 0) {
        for (int k = 0; k < N; ++k) e[k] = c[k];
    } else {
        chart_to_emb(id, chart, c.data(), e.data());
    }
    const Jet<N> f = component_emb(id, i, e.data());
    v = f.v;
    g = f.g;
    h = f.h;
}

// 3x3 Poisson block of the embedded sphere, {x_i, x_j} = -eps_{ijk} x_k.
void sphere_block(Eigen::MatrixXd& pi, int o, double x, double y, double z) {
    pi(o + 0, o + 1) = -z;
    pi(o + 1, o + 0) = z;
    pi(o + 0, o + 2) = y;
    pi(o + 2, o + 0) = -y;
    pi(o + 1, o + 2) = -x;
    pi(o + 2, o + 1) = x;
}

void plane_block(Eigen::MatrixXd& pi, int o) {
    pi(o + 0, o + 1) = 1.0;
    pi(o + 1, o + 0) = -1.0;
}

// Stereographic chart block: {a,b} = (1+r^2)^2 / 4.
void stereo_block(Eigen::MatrixXd& pi, int o, double a, double b) {
    const double s = 1.0 + a * a + b * b;
    pi(o + 0, o + 1) = s * s / 4.0;
    pi(o + 1, o + 0) = -s * s / 4.0;
}

} // namespace

System::System(SystemId id) : id_(id) {
    switch (id) {
        case SystemId::SpinOscillator:
            name_ = "spin-oscillator";
            space_ = {SpaceKind::SphereTimesPlane, {1.0}, 4, 2};
            flags_ = {true, true, false};
            component_names_ = {"SpinOscJ", "SpinOscH"};
            break;
        case SystemId::DoubleSpin:
            name_ = "double-spin";
            space_ = {SpaceKind::SphereTimesSphere, {1.0, 1.0}, 4, 2};
            flags_ = {true, true, true};
            component_names_ = {"DoubleSpinJ1", "DoubleSpinJ2"};
            break;
        case SystemId::SphereRotation:
            name_ = "sphere-rotation";
            space_ = {SpaceKind::Sphere, {1.0}, 2, 1};
            flags_ = {true, true, true};
            component_names_ = {"SphereHeight"};
            break;
        case SystemId::SphericalPendulum:
            name_ = "spherical-pendulum";
            space_ = {SpaceKind::CotangentSphere, {1.0}, 4, 2};
            flags_ = {false, true, false};
            component_names_ = {"PendulumJ", "PendulumH"};
            break;
    }
}

int System::embedded_dim() const {
    switch (space_.kind) {
        case SpaceKind::SphereTimesPlane: return 5;
        case SpaceKind::SphereTimesSphere: return 6;
        case SpaceKind::Sphere: return 3;
        case SpaceKind::CotangentSphere: return 6;
    }
    return 0;
}

int System::num_charts() const {
    return space_.kind == SpaceKind::SphereTimesSphere ? 5 : 3;
}

std::pair<double, double> System::j_range(int component) const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (id_) {
        case SystemId::SpinOscillator:
            return component == 0 ? std::make_pair(-1.0, inf) : std::make_pair(-inf, inf);
        case SystemId::DoubleSpin: return {-1.0, 1.0};
        case SystemId::SphereRotation: return {-1.0, 1.0};
        case SystemId::SphericalPendulum:
            return component == 0 ? std::make_pair(-inf, inf) : std::make_pair(-1.0, inf);
    }
    return {-inf, inf};
}

bool System::component_is_circle_action(int i) const {
    switch (id_) {
        case SystemId::SpinOscillator: return i == 0;
        case SystemId::DoubleSpin: return true;
        case SystemId::SphereRotation: return i == 0;
        case SystemId::SphericalPendulum: return i == 0;
    }
    return false;
}

void System::validate(const PhasePoint& p, double tol) const {
    if (p.chart < 0 || p.chart >= num_charts())
        throw InvalidPoint("chart id " + std::to_string(p.chart) + " out of range for " + name_);
    const int want = p.chart == 0 ? embedded_dim() : chart_dim();
    if (p.coords.size() != want)
        throw InvalidPoint("coordinate vector has length " + std::to_string(p.coords.size()) +
                           ", expected " + std::to_string(want));
    if (!p.coords.allFinite()) throw InvalidPoint("non-finite coordinates");
    if (p.chart != 0) {
        if (space_.kind == SpaceKind::CotangentSphere &&
            p.coords(0) * p.coords(0) + p.coords(1) * p.coords(1) >= 1.0)
            throw InvalidPoint("graph chart coordinates leave the hemisphere");
        return;
    }
    const auto check_sphere = [&](int o) {
        const double n2 = p.coords.segment(o, 3).squaredNorm();
        if (std::abs(n2 - 1.0) > tol)
            throw InvalidPoint("sphere constraint violated by " + std::to_string(std::abs(n2 - 1.0)));
    };
    switch (space_.kind) {
        case SpaceKind::SphereTimesPlane: check_sphere(0); break;
        case SpaceKind::SphereTimesSphere: check_sphere(0); check_sphere(3); break;
        case SpaceKind::Sphere: check_sphere(0); break;
        case SpaceKind::CotangentSphere: {
            check_sphere(0);
            const double qp = p.coords.head(3).dot(p.coords.tail(3));
            if (std::abs(qp) > tol)
                throw InvalidPoint("cotangent constraint q.p violated by " + std::to_string(std::abs(qp)));
            break;
        }
    }
}

PhasePoint System::to_embedded(const PhasePoint& p) const {
    if (p.chart == 0) return p;
    Eigen::VectorXd e(embedded_dim());
    if (chart_dim() == 2) {
        std::array<double, 2> c{p.coords(0), p.coords(1)};
        chart_to_emb(id_, p.chart, c.data(), e.data());
    } else {
        std::array<double, 4> c{p.coords(0), p.coords(1), p.coords(2), p.coords(3)};
        chart_to_emb(id_, p.chart, c.data(), e.data());
    }
    return {0, e};
}

PhasePoint System::to_chart(const PhasePoint& p, int chart) const {
    if (chart == p.chart) return p;
    const PhasePoint emb = to_embedded(p);
    if (chart == 0) return emb;
    const Eigen::VectorXd& e = emb.coords;
    Eigen::VectorXd c(chart_dim());
    const auto stereo_inv = [&](int style, double x, double y, double z, int o) {
        const double d = style == 1 ? 1.0 - z : 1.0 + z;
        if (d <= 1e-14) throw InvalidPoint("point at the chart's projection pole");
        c(o) = x / d;
        c(o + 1) = (style == 1 ? y : -y) / d;
    };
    switch (id_) {
        case SystemId::SpinOscillator:
            stereo_inv(chart, e(0), e(1), e(2), 0);
            c(2) = e(3);
            c(3) = e(4);
            break;
        case SystemId::DoubleSpin:
            stereo_inv(1 + (chart - 1) / 2, e(0), e(1), e(2), 0);
            stereo_inv(1 + (chart - 1) % 2, e(3), e(4), e(5), 2);
            break;
        case SystemId::SphereRotation:
            stereo_inv(chart, e(0), e(1), e(2), 0);
            break;
        case SystemId::SphericalPendulum: {
            const double q3 = e(2);
            if ((chart == 1 && q3 >= 0.0) || (chart == 2 && q3 <= 0.0))
                throw InvalidPoint("point not in the requested hemisphere chart");
            c(0) = e(0);
            c(1) = e(1);
            // pi_i = p_i - p3 q_i / q3
            c(2) = e(3) - e(5) * e(0) / q3;
            c(3) = e(4) - e(5) * e(1) / q3;
            break;
        }
    }
    return {chart, c};
}

int System::preferred_chart(const PhasePoint& p) const {
    const PhasePoint emb = to_embedded(p);
    const Eigen::VectorXd& e = emb.coords;
    switch (id_) {
        case SystemId::SpinOscillator: return e(2) <= 0.0 ? 1 : 2;
        case SystemId::DoubleSpin: {
            const int s1 = e(2) <= 0.0 ? 1 : 2;
            const int s2 = e(5) <= 0.0 ? 1 : 2;
            return 1 + (s1 - 1) * 2 + (s2 - 1);
        }
        case SystemId::SphereRotation: return e(2) <= 0.0 ? 1 : 2;
        case SystemId::SphericalPendulum: return e(2) <= 0.0 ? 1 : 2;
    }
    return 0;
}

double System::component(int i, const PhasePoint& p) const {
    const PhasePoint emb = to_embedded(p);
    validate(emb);
    return component_emb(id_, i, emb.coords.data());
}

Eigen::VectorXd System::momentum_map(const PhasePoint& p) const {
    const PhasePoint emb = to_embedded(p);
    validate(emb);
    Eigen::VectorXd f(dof());
    for (int i = 0; i < dof(); ++i) f(i) = component_emb(id_, i, emb.coords.data());
    return f;
}

Eigen::VectorXd System::grad(int i, const PhasePoint& p) const {
    if (p.chart == 0) return ambient_grad(i, p);
    double v;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    if (chart_dim() == 2)
        jet_component_in_chart<2, 3>(id_, i, p.chart, p.coords, v, g, h);
    else if (embedded_dim() == 5)
        jet_component_in_chart<4, 5>(id_, i, p.chart, p.coords, v, g, h);
    else
        jet_component_in_chart<4, 6>(id_, i, p.chart, p.coords, v, g, h);
    return g;
}

Eigen::MatrixXd System::hess(int i, const PhasePoint& p) const {
    if (p.chart == 0)
        throw ConfigError("Hessians are defined in local charts; convert the point first");
    double v;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    if (chart_dim() == 2)
        jet_component_in_chart<2, 3>(id_, i, p.chart, p.coords, v, g, h);
    else if (embedded_dim() == 5)
        jet_component_in_chart<4, 5>(id_, i, p.chart, p.coords, v, g, h);
    else
        jet_component_in_chart<4, 6>(id_, i, p.chart, p.coords, v, g, h);
    return h;
}

Eigen::VectorXd System::ambient_grad(int i, const PhasePoint& p) const {
    const PhasePoint emb = to_embedded(p);
    double v;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    switch (embedded_dim()) {
        case 3: jet_component_in_chart<3, 3>(id_, i, 0, emb.coords, v, g, h); break;
        case 5: jet_component_in_chart<5, 5>(id_, i, 0, emb.coords, v, g, h); break;
        default: jet_component_in_chart<6, 6>(id_, i, 0, emb.coords, v, g, h); break;
    }
    return g;
}

Eigen::MatrixXd System::poisson_tensor(const PhasePoint& p) const {
    const int d = p.chart == 0 ? embedded_dim() : chart_dim();
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(d, d);
    const Eigen::VectorXd& x = p.coords;
    if (p.chart == 0) {
        switch (space_.kind) {
            case SpaceKind::SphereTimesPlane:
                sphere_block(pi, 0, x(0), x(1), x(2));
                plane_block(pi, 3);
                break;
            case SpaceKind::SphereTimesSphere:
                sphere_block(pi, 0, x(0), x(1), x(2));
                sphere_block(pi, 3, x(3), x(4), x(5));
                break;
            case SpaceKind::Sphere:
                sphere_block(pi, 0, x(0), x(1), x(2));
                break;
            case SpaceKind::CotangentSphere: {
                // Dirac bracket of the constrained embedding T*S^2 in R^6:
                // {q_i,p_j} = delta_ij - q_i q_j / |q|^2,
                // {p_i,p_j} = (p_i q_j - q_i p_j) / |q|^2.
                const Eigen::Vector3d q = x.head(3), pp = x.tail(3);
                const double n2 = q.squaredNorm();
                const Eigen::Matrix3d proj =
                    Eigen::Matrix3d::Identity() - q * q.transpose() / n2;
                pi.block<3, 3>(0, 3) = proj;
                pi.block<3, 3>(3, 0) = -proj;
                pi.block<3, 3>(3, 3) =
                    (pp * q.transpose() - q * pp.transpose()) / n2;
                break;
            }
        }
        return pi;
    }
    switch (id_) {
        case SystemId::SpinOscillator:
            stereo_block(pi, 0, x(0), x(1));
            plane_block(pi, 2);
            break;
        case SystemId::DoubleSpin:
            stereo_block(pi, 0, x(0), x(1));
            stereo_block(pi, 2, x(2), x(3));
            break;
        case SystemId::SphereRotation:
            stereo_block(pi, 0, x(0), x(1));
            break;
        case SystemId::SphericalPendulum:
            pi(0, 2) = pi(1, 3) = 1.0;
            pi(2, 0) = pi(3, 1) = -1.0;
            break;
    }
    return pi;
}

double System::poisson_bracket(int i, int j, const PhasePoint& p) const {
    validate(to_embedded(p));
    const Eigen::VectorXd gi = p.chart == 0 ? ambient_grad(i, p) : grad(i, p);
    const Eigen::VectorXd gj = p.chart == 0 ? ambient_grad(j, p) : grad(j, p);
    return gi.dot(poisson_tensor(p) * gj);
}

Eigen::VectorXd System::ham_field(int i, const PhasePoint& p) const {
    validate(to_embedded(p));
    const Eigen::VectorXd g = p.chart == 0 ? ambient_grad(i, p) : grad(i, p);
    return poisson_tensor(p) * g;
}

PhasePoint System::circle_flow(int i, const PhasePoint& p, double theta) const {
    if (!component_is_circle_action(i))
        throw ConfigError("component " + component_names_[i] + " does not generate a circle action");
    PhasePoint emb = to_embedded(p);
    Eigen::VectorXd& e = emb.coords;
    const double c = std::cos(theta), s = std::sin(theta);
    const auto rot_cw = [&](int o) { // (x + iy) -> e^{-i theta} (x + iy)
        const double x = e(o), y = e(o + 1);
        e(o) = c * x + s * y;
        e(o + 1) = -s * x + c * y;
    };
    const auto rot_ccw = [&](int o) {
        const double x = e(o), y = e(o + 1);
        e(o) = c * x - s * y;
        e(o + 1) = s * x + c * y;
    };
    switch (id_) {
        case SystemId::SpinOscillator: rot_cw(0); rot_cw(3); break;
        case SystemId::DoubleSpin: rot_cw(i == 0 ? 0 : 3); break;
        case SystemId::SphereRotation: rot_cw(0); break;
        case SystemId::SphericalPendulum: rot_ccw(0); rot_ccw(3); break;
    }
    return emb;
}

double System::project(Eigen::VectorXd& e) const {
    double moved = 0.0;
    const auto fix_sphere = [&](int o) {
        const double n = e.segment(o, 3).norm();
        moved = std::max(moved, std::abs(n - 1.0));
        e.segment(o, 3) /= n;
    };
    switch (space_.kind) {
        case SpaceKind::SphereTimesPlane: fix_sphere(0); break;
        case SpaceKind::SphereTimesSphere: fix_sphere(0); fix_sphere(3); break;
        case SpaceKind::Sphere: fix_sphere(0); break;
        case SpaceKind::CotangentSphere: {
            fix_sphere(0);
            const Eigen::Vector3d q = e.head(3);
            const double qp = q.dot(e.tail(3));
            moved = std::max(moved, std::abs(qp));
            e.tail(3) -= qp * q;
            break;
        }
    }
    return moved;
}

std::vector<ChartBox> System::search_boxes() const {
    std::vector<ChartBox> boxes;
    const auto box4 = [](int chart, double s1, double s2) {
        ChartBox b;
        b.chart = chart;
        b.lo = Eigen::Vector4d(-s1, -s1, -s2, -s2);
        b.hi = Eigen::Vector4d(s1, s1, s2, s2);
        return b;
    };
    switch (id_) {
        case SystemId::SpinOscillator:
            boxes.push_back(box4(1, 2.2, 3.0));
            boxes.push_back(box4(2, 2.2, 3.0));
            break;
        case SystemId::DoubleSpin:
            for (int ch = 1; ch <= 4; ++ch) boxes.push_back(box4(ch, 2.2, 2.2));
            break;
        case SystemId::SphereRotation:
            for (int ch = 1; ch <= 2; ++ch) {
                ChartBox b;
                b.chart = ch;
                b.lo = Eigen::Vector2d(-2.2, -2.2);
                b.hi = Eigen::Vector2d(2.2, 2.2);
                boxes.push_back(b);
            }
            break;
        case SystemId::SphericalPendulum:
            boxes.push_back(box4(1, 0.8, 2.5));
            boxes.push_back(box4(2, 0.8, 2.5));
            break;
    }
    return boxes;
}

const System& catalog(SystemId id) {
    static const System spin_osc(SystemId::SpinOscillator);
    static const System double_spin(SystemId::DoubleSpin);
    static const System sphere_rot(SystemId::SphereRotation);
    static const System pendulum(SystemId::SphericalPendulum);
    switch (id) {
        case SystemId::SpinOscillator: return spin_osc;
        case SystemId::DoubleSpin: return double_spin;
        case SystemId::SphereRotation: return sphere_rot;
        case SystemId::SphericalPendulum: return pendulum;
    }
    throw ConfigError("unknown system id");
}

const System& catalog(const std::string& id) {
    for (const auto sid : {SystemId::SpinOscillator, SystemId::DoubleSpin,
                           SystemId::SphereRotation, SystemId::SphericalPendulum}) {
        const System& s = catalog(sid);
        if (s.name() == id) return s;
    }
    throw ConfigError("unknown system '" + id + "'; see `list-systems`");
}

std::vector<std::string> catalog_ids() {
    return {"spin-oscillator", "double-spin", "sphere-rotation", "spherical-pendulum"};
}

} // namespace semitoric
