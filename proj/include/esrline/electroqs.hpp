#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "esrline/fields.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace electroqs {

// Vacuum permittivity, F/m.
inline constexpr double kEps0 = 8.8541878128e-12;

// Uniform-charge rectangular panel on a conductor face.
struct Panel {
    Vec3 center;
    int normal_axis = 2;      // 0/1/2
    double width = 0, height = 0; // in-plane extents along (axis+1)%3, (axis+2)%3
    std::string parent_brick;
    std::string net;

    bool floating() const { return net == kFloatingNet; }
};

// Tiles every brick face (driven and floating alike) with panels of edge
// <= max_panel_edge.
std::vector<Panel> discretize_panels(const Scene& scene, double max_panel_edge);

// Symmetric potential coefficient (V per C). The self term is the closed-form
// center potential of a uniformly charged rectangle.
double potential_coefficient(const Panel& a, const Panel& b, double eps_eff);

// Equipotential group constraints: named nets are one group per net; panels
// on the FLOATING net form one group per brick.
struct PanelSystem {
    std::vector<Panel> panels;
    Eigen::MatrixXd P; // potential coefficients
    double effective_permittivity = 1.0;
    std::vector<std::string> group_of_panel; // constraint-group key per panel

    static std::string group_key(const Panel& p);
};

PanelSystem build_panel_system(std::vector<Panel> panels, double eps_eff);

struct ChargeSolution {
    Eigen::VectorXcd charges; // C per panel
    std::map<std::string, Complex> group_potentials; // driven and floating
    double effective_permittivity = 1.0;

    Complex net_charge(const PanelSystem& system, const std::string& group) const;
};

// Prescribes potentials for the groups named in `net_potentials`; every other
// group floats (equipotential, zero total charge).
ChargeSolution solve_charges(const PanelSystem& system,
                             const std::map<std::string, Complex>& net_potentials);

// Per-panel prescribed potentials for the groups in `driven_groups` (the
// axial line-voltage profile); remaining groups float.
ChargeSolution solve_charges_profile(const PanelSystem& system,
                                     const std::vector<std::string>& driven_groups,
                                     const Eigen::VectorXcd& panel_potentials);

// E phasor at `point` by summing panel contributions (subdivided near-panel
// quadrature when the point is close).
CVec3 e_field(const ChargeSolution& solution, const std::vector<Panel>& panels,
              const Vec3& point);

// Maxwell capacitance matrix over `driven_nets` (each column: charges with
// that net at 1 V, the others at 0 V, everything else floating).
Eigen::MatrixXd capacitance_matrix(const PanelSystem& system,
                                   const std::vector<std::string>& driven_nets);

std::vector<FieldSample> e_field_at_probes(const Scene& scene,
                                           const ChargeSolution& solution,
                                           const std::vector<Panel>& panels,
                                           const ProbeSet& probes);

} // namespace electroqs
} // namespace esrline
