#include "esrline/presets.hpp"

namespace esrline {
namespace presets {

namespace {
constexpr double nm = 1e-9;
constexpr double um = 1e-6;
} // namespace

std::vector<Material> standard_materials() {
    std::vector<Material> m;
    m.push_back({"m1_metal", 1.0e7, 3.0, 1.0, true});
    m.push_back({"cu", 5.8e7, 10.0, 1.0, true});
    m.push_back({"poly_si", 5.0e5, 1.0, 1.0, true});
    m.push_back({"silicon", 0.0, 1.0, 11.7, false});
    m.push_back({"sio2", 0.0, 1.0, 3.9, false});
    m.push_back({"vacuum", 0.0, 1.0, 1.0, false});
    return m;
}

std::vector<Layer> standard_stack() {
    std::vector<Layer> s;
    s.push_back({"active", 0.0, 100 * nm, "silicon"});
    s.push_back({"poly", 100 * nm, 100 * nm, "sio2"});
    s.push_back({"ild1", 200 * nm, 300 * nm, "sio2"});
    s.push_back({"m1", 500 * nm, 100 * nm, "sio2"});
    s.push_back({"ild2", 600 * nm, 400 * nm, "sio2"});
    return s;
}

SceneParts base_parts(double temperature) {
    SceneParts parts;
    parts.stack = standard_stack();
    parts.materials = standard_materials();
    parts.temperature = temperature;
    return parts;
}

LineConfig nano_antenna_line() {
    LineConfig cfg;
    cfg.kind = LineKind::CPS;
    cfg.signal_width = 100 * nm;
    cfg.gap = 150 * nm;
    cfg.ground_width = 100 * nm;
    cfg.length = 10 * um;
    cfg.level = "m1";
    cfg.material = "m1_metal";
    return cfg;
}

SceneParts nano_antenna_parts(double temperature) {
    SceneParts parts = base_parts(temperature);
    // QDs sit in the active layer under the short strap.
    const double L = nano_antenna_line().length;
    parts.probes.push_back(
        {"QD", {Vec3{0, L + 30 * nm, 50 * nm}, Vec3{0, L + 70 * nm, 50 * nm}}});
    return parts;
}

netline::RlgcModel access_line_rlgc(double frequency) {
    netline::RlgcModel m;
    m.R = 2.0e4;   // ohm/m  (thick-copper feed pair)
    m.L = 4.0e-7;  // H/m
    m.G = 0.0;
    m.C = 1.5e-10; // F/m
    m.frequency = frequency;
    return m;
}

std::vector<LineConfig> comparison_configs() {
    // CPS: symmetric strips. CPW: the usual wide flanking grounds.
    // Mixed: CPW launch tapering to the symmetric CPS near the QDs.
    LineConfig cps = nano_antenna_line();

    LineConfig cpw = cps;
    cpw.kind = LineKind::CPW;
    cpw.gap = 100 * nm;
    cpw.ground_width = 350 * nm;

    LineConfig mixed = cps;
    mixed.kind = LineKind::CPW_TO_CPS;
    mixed.access_fraction = 0.5;
    return {cps, cpw, mixed};
}

SceneParts comparison_parts(double temperature) {
    SceneParts parts = base_parts(temperature);
    // Under the return-conductor side of the strap, where every kind has
    // strap metal overhead.
    const double L = nano_antenna_line().length;
    parts.probes.push_back({"QD",
                            {Vec3{250 * nm, L + 30 * nm, 50 * nm},
                             Vec3{250 * nm, L + 70 * nm, 50 * nm}}});
    return parts;
}

LineConfig stack_line() { return nano_antenna_line(); }

std::vector<std::string> stack_levels() { return {"poly", "m1"}; }

SceneParts stack_parts(double temperature) { return nano_antenna_parts(temperature); }

LineConfig environment_line() { return nano_antenna_line(); }

fom::EnvironmentSpec environment_spec() {
    fom::EnvironmentSpec env;
    // Dummy columns flank the short end of the line, where the line voltage
    // is near zero, so the floating tiles act as near-ground screens.
    env.dummy_region = Box{-1 * um, 1 * um, 9.4 * um, 10.8 * um, 0, 0};
    env.dummy_pitch = 400 * nm;
    env.dummy_fill = 0.5;
    env.dummy_level = "poly";
    env.dummy_material = "poly_si";

    // QD wiring running alongside the line from the feed end to the QDs,
    // threaded through a dummy-free corridor.
    ConductorBrick wire;
    wire.id = "qd_wire";
    wire.extents = Box{370 * nm, 420 * nm, 0.3 * um, 10.45 * um, 100 * nm, 200 * nm};
    wire.material = "poly_si";
    wire.net = "qd_wiring";
    wire.role = BrickRole::Interconnect;
    env.interconnects.push_back(wire);
    return env;
}

SceneParts environment_parts(double temperature) {
    return nano_antenna_parts(temperature);
}

SceneParts parts_by_name(const std::string& name, double temperature) {
    if (name == "nano_antenna") return nano_antenna_parts(temperature);
    if (name == "comparison") return comparison_parts(temperature);
    if (name == "stack") return stack_parts(temperature);
    if (name == "environment") return environment_parts(temperature);
    throw ValidationError("unknown preset '" + name + "'");
}

LineConfig line_by_name(const std::string& name) {
    if (name == "nano_antenna") return nano_antenna_line();
    if (name == "comparison") return comparison_configs().front();
    if (name == "stack") return stack_line();
    if (name == "environment") return environment_line();
    throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"nano_antenna", "comparison", "stack", "environment"};
}

} // namespace presets
} // namespace esrline
