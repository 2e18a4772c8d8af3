#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "esrline/errors.hpp"
#include "esrline/geometry.hpp"

namespace esrline {

// Net name used by conductors that are not galvanically tied to any port.
inline const std::string kFloatingNet = "FLOATING";

struct Material {
    std::string name;
    double conductivity_300K = 0.0; // S/m, conductors only
    double rrr = 1.0;               // residual-resistance ratio, >= 1
    double relative_permittivity = 1.0;
    bool is_conductor = false;
};

// Conductivity at temperature: anchored at 300 K (bulk value) and 4 K
// (bulk * rrr), log-linear in between, clamped outside.
double conductivity_at_temperature(const Material& material, double temperature_K);

struct Layer {
    std::string name;
    double z_min = 0.0;    // m
    double thickness = 0.0; // m, > 0
    std::string ambient_dielectric; // material name

    double z_max() const { return z_min + thickness; }
};

enum class BrickRole { Signal, Return, Dummy, Gate, Interconnect, ShortStrap };

std::string to_string(BrickRole role);
BrickRole brick_role_from_string(const std::string& s);

struct ConductorBrick {
    std::string id;
    Box extents;
    std::string material; // material name
    std::string net;      // net name or kFloatingNet
    BrickRole role = BrickRole::Signal;

    bool floating() const { return net == kFloatingNet; }
};

struct Port {
    std::string id;
    std::string positive_net;
    std::string negative_net;
    double reference_impedance = 50.0; // ohm
    // Where the port attaches. Optional in scene files; the solvers pick
    // the nearest discretization node. Line generators always set these.
    std::optional<Vec3> positive_location;
    std::optional<Vec3> negative_location;
    // Nodes on the terminal net within this radius of the terminal location
    // are bundled into one electrical node (models the launch bridging the
    // two CPW ground strips). 0 = nearest node only.
    double terminal_merge_radius = 0.0;
};

struct ProbeSet {
    std::string label;
    std::vector<Vec3> points;
};

enum class LineKind { CPS, CPW, CPW_TO_CPS };

std::string to_string(LineKind kind);
LineKind line_kind_from_string(const std::string& s);

struct LineConfig {
    LineKind kind = LineKind::CPS;
    double signal_width = 0.0; // m
    double gap = 0.0;          // m, edge-to-edge
    double ground_width = 0.0; // m (return strip width for CPS)
    double length = 0.0;       // m
    std::string level;         // layer name
    std::string material;      // conductor material name
    bool shorted_end = true;
    // Strip thickness; defaults to the level's layer thickness.
    std::optional<double> thickness;
    // CPW_TO_CPS only: fraction of `length` used by the CPW access section.
    double access_fraction = 0.5;
};

// Raw, not-yet-validated scene description.
struct SceneParts {
    std::vector<Layer> stack;
    std::vector<Material> materials;
    std::vector<ConductorBrick> conductors;
    std::vector<Port> ports;
    std::vector<ProbeSet> probes;
    double temperature = 300.0; // K
};

// Validated scene. Immutable after build_scene; safe to share across threads.
class Scene {
public:
    const std::vector<Layer>& stack() const { return parts_.stack; }
    const std::vector<ConductorBrick>& conductors() const { return parts_.conductors; }
    const std::vector<Port>& ports() const { return parts_.ports; }
    const std::vector<ProbeSet>& probes() const { return parts_.probes; }
    double temperature() const { return parts_.temperature; }
    const SceneParts& parts() const { return parts_; }

    const Material& material(const std::string& name) const;
    const Layer& layer(const std::string& name) const;
    // Layer hosting a brick (resolved during validation).
    const Layer& layer_of(std::size_t brick_index) const;
    Box bounding_box() const { return bbox_; }

    // Conductivity of a brick's material at the scene temperature.
    double brick_conductivity(const ConductorBrick& brick) const;

    // Indices of bricks carrying `net`.
    std::vector<std::size_t> bricks_on_net(const std::string& net) const;
    bool net_exists(const std::string& net) const;

    // Thickness-weighted effective relative permittivity of the dielectric
    // between two z planes (order-independent).
    double effective_permittivity(double z_a, double z_b) const;

    // True when p lies strictly inside any conductor brick.
    bool point_inside_conductor(const Vec3& p, double tol = 0.0) const;

private:
    friend Scene build_scene(SceneParts parts);
    SceneParts parts_;
    std::map<std::string, Material> material_catalog_;
    std::vector<std::size_t> brick_layer_; // brick index -> stack index
    Box bbox_;
};

// Validates and freezes a scene description. Throws OverlappingConductors,
// DanglingNet, ProbeInsideConductor, LayerGap or ValidationError.
Scene build_scene(SceneParts parts);

// Expands a line configuration into conductor bricks plus the matching port.
// The line runs along +y starting at y = 0, centered on x = 0, with the
// short strap at the far end. Net names: "sig" / "ret".
struct GeneratedLine {
    std::vector<ConductorBrick> bricks;
    Port port;
};
GeneratedLine generate_line(const LineConfig& config, const std::vector<Layer>& stack);

// Regular grid of floating dummy bricks filling `region` (x/y extent used;
// z taken from the level) at areal density fill_fraction.
std::vector<ConductorBrick> generate_dummies(const Box& region, double pitch,
                                             double fill_fraction,
                                             const std::string& level,
                                             const std::string& material,
                                             const std::vector<Layer>& stack);

} // namespace esrline
