#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esrline/fields.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace magnetoqs {

// Vacuum permeability, H/m.
inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;

// Straight current filament, axis-parallel, with rectangular cross-section.
struct Filament {
    Vec3 start, end;
    double width = 0, height = 0; // cross-section, m
    double conductivity = 0;      // S/m
    std::string parent_brick;
    int node_start = -1, node_end = -1; // electrical nodes

    int axis() const; // 0/1/2
    double length() const { return (end - start).norm(); }
    Vec3 direction() const { return (end - start) / length(); }
    Box bounding_box() const;
};

// Discretized conductor network: filaments plus node bookkeeping.
struct FilamentMesh {
    std::vector<Filament> filaments;
    std::vector<Vec3> node_positions;
    // Per scene port: terminal node indices (positive, negative).
    std::vector<std::pair<int, int>> port_terminals;
};

// Cross-section subdivision counts for the two non-axial directions.
struct Subdivision {
    int nx = 3;
    int ny = 3;
};

// Discretizes every port-connected, non-floating brick into nx*ny parallel
// filaments, each split longitudinally into `segments_per_length` pieces.
// Bricks in electrical contact share nodes at the contact plane.
FilamentMesh discretize_filaments(const Scene& scene, Subdivision subdivision,
                                  int segments_per_length);

// Partial inductance between two axis-parallel filaments (H). Perpendicular
// pairs give exactly 0; antiparallel pairs are negative.
double partial_inductance(const Filament& a, const Filament& b);

// Z = R + j*2*pi*f*L over the filament mesh. R and L are kept separately so
// a frequency sweep re-assembles Z without recomputing the inductances.
struct FilamentSystem {
    FilamentMesh mesh;
    Eigen::VectorXd resistance;   // diagonal of R, ohm
    Eigen::MatrixXd inductance;   // partial inductance matrix, H
    double frequency = 0;         // Hz

    Eigen::MatrixXcd impedance() const;
    FilamentSystem at_frequency(double f) const;
};

FilamentSystem assemble_impedance(FilamentMesh mesh, double frequency);

struct CurrentSolution {
    Eigen::VectorXcd currents; // A per filament (start -> end positive)
    Eigen::VectorXcd node_voltages;
    double frequency = 0;
    Complex terminal_current{0, 0};
    Complex port_impedance{0, 0};  // V(+)/I at the driven port
    double ohmic_loss = 0;         // W, sum R_k |I_k|^2 / 2
    double kcl_residual = 0;       // max KCL violation over internal nodes
};

// Drives `terminal_current` into port `port_index` of the mesh and solves the
// Kirchhoff-constrained impedance system.
CurrentSolution solve_currents(const FilamentSystem& system, Complex terminal_current,
                               std::size_t port_index = 0);

// B phasor at `point` from the solved filament currents (closed-form finite
// segment kernel). Throws PointInsideConductor for points inside a filament.
CVec3 biot_savart(const CurrentSolution& solution, const std::vector<Filament>& filaments,
                  const Vec3& point);

// Field of a single straight segment carrying `current`; exposed for tests.
CVec3 segment_field(const Vec3& a, const Vec3& b, Complex current, const Vec3& point);

std::vector<FieldSample> b_field_at_probes(const Scene& scene,
                                           const CurrentSolution& solution,
                                           const std::vector<Filament>& filaments,
                                           const ProbeSet& probes);

} // namespace magnetoqs
} // namespace esrline
