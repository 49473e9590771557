#pragma once

// Catalog of built-in integrable systems and the differential-geometry kernel
// every other module runs on: momentum maps, Poisson brackets, Hamiltonian
// vector fields, all in exact closed form.
//
// Conventions (fixed throughout the toolkit, see README):
//   * The sphere carries the area form of total area 4*pi, oriented so that
//     the embedded Poisson structure is {x,y} = -z (cyclically). Together
//     with {u,v} = +1 on the plane factor this is the orientation for which
//     the spin-oscillator pair J = (u^2+v^2)/2 + z, H = (ux+vy)/2 commutes
//     and J generates a 2*pi-periodic flow.
//   * Each sphere is covered by the embedded chart plus two stereographic
//     charts (centered at the south and north pole). T*S^2 uses graph charts
//     over the two hemispheres with their induced canonical coordinates.
//   * All chart parametrizations are rational-plus-sqrt, so jets give exact
//     first and second derivatives.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "semitoric/errors.hpp"
#include "semitoric/jet.hpp"

namespace semitoric {

enum class SpaceKind { SphereTimesPlane, SphereTimesSphere, Sphere, CotangentSphere };

struct PhaseSpace {
    SpaceKind kind;
    std::vector<double> scales; // Fubini-Study multiples; catalog systems are unit scale
    int dimension;              // 2n
    int dof;                    // n
};

// A point in a chart. Chart 0 is always the canonical embedded chart
// (length 5 for S^2 x R^2, 6 for S^2 x S^2 and T*S^2, 3 for S^2); charts
// >= 1 are honest local coordinate systems of dimension 2n.
struct PhasePoint {
    int chart = 0;
    Eigen::VectorXd coords;
};

struct SystemFlags {
    bool j_proper = true;
    bool j_periodic = true;
    bool toric = false;
};

enum class SystemId { SpinOscillator, DoubleSpin, SphereRotation, SphericalPendulum };

// A box in chart coordinates used to seed searches; part of the documented
// compact search window of find_critical_points.
struct ChartBox {
    int chart;
    Eigen::VectorXd lo, hi;
};

class System {
public:
    explicit System(SystemId id);

    SystemId id() const { return id_; }
    const std::string& name() const { return name_; }
    const PhaseSpace& space() const { return space_; }
    const SystemFlags& flags() const { return flags_; }
    int dof() const { return space_.dof; }
    const std::vector<std::string>& component_names() const { return component_names_; }

    int embedded_dim() const;
    int chart_dim() const { return space_.dimension; }
    int num_charts() const;

    // J-range of the momentum-map first component over M (+-inf when the
    // image is unbounded; callers clip to a window).
    std::pair<double, double> j_range(int component = 0) const;
    bool component_is_circle_action(int i) const;

    void validate(const PhasePoint& p, double tol = 1e-9) const;

    PhasePoint to_embedded(const PhasePoint& p) const;
    PhasePoint to_chart(const PhasePoint& p, int chart) const;
    int preferred_chart(const PhasePoint& p) const;

    double component(int i, const PhasePoint& p) const;
    Eigen::VectorXd momentum_map(const PhasePoint& p) const;

    // Gradient / Hessian of component i in the coordinates of p's chart
    // (charts >= 1 only; the embedded chart is not a coordinate system).
    Eigen::VectorXd grad(int i, const PhasePoint& p) const;
    Eigen::MatrixXd hess(int i, const PhasePoint& p) const;

    // Poisson tensor Pi^{jk} = {x^j, x^k} in the coordinates of p's chart
    // (embedded chart included; for T*S^2 this is the Dirac bracket of the
    // constrained embedding).
    Eigen::MatrixXd poisson_tensor(const PhasePoint& p) const;

    double poisson_bracket(int i, int j, const PhasePoint& p) const;
    // Hamiltonian vector field of component i, in the chart of p.
    Eigen::VectorXd ham_field(int i, const PhasePoint& p) const;
    // Gradient of component i in the chart of p, including the embedded
    // chart (where it is the gradient of the closed-form extension).
    Eigen::VectorXd ambient_grad(int i, const PhasePoint& p) const;

    // Exact time-theta flow of a circle-action component (embedded chart).
    PhasePoint circle_flow(int i, const PhasePoint& p, double theta) const;

    // Re-project an embedded point onto the constraint set; returns the
    // distance moved so integrators can log drift.
    double project(Eigen::VectorXd& emb) const;

    std::vector<ChartBox> search_boxes() const;

private:
    SystemId id_;
    std::string name_;
    PhaseSpace space_;
    SystemFlags flags_;
    std::vector<std::string> component_names_;
};

const System& catalog(const std::string& id);
const System& catalog(SystemId id);
std::vector<std::string> catalog_ids();

} // namespace semitoric
