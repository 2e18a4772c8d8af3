#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esrline/fields.hpp"
#include "esrline/fom.hpp"
#include "esrline/netline.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace io {

// Study-level knobs carried by a scene file next to the geometry.
struct SolveSettings {
    double temperature = 300.0;       // K
    double pin_dbm = -7.0;
    std::vector<double> frequencies{10e9}; // Hz
    netline::SolverSettings solver;
};

struct DummySpec {
    Box region; // z ignored, taken from the level
    double pitch = 0;
    double fill_fraction = 0;
    std::string level;
    std::string material;
};

// Parsed scene file: explicit geometry plus optional line/dummy generator
// sections, kept unexpanded so serialization round-trips.
struct SceneDocument {
    std::string preset; // non-empty when loaded from {"preset": ...}
    std::vector<Material> materials;
    std::vector<Layer> stack;
    std::vector<ConductorBrick> conductors;
    std::optional<LineConfig> line;
    std::optional<DummySpec> dummies;
    std::vector<Port> ports; // explicit ports; the line section supplies its own
    std::vector<ProbeSet> probes;
    SolveSettings settings;

    SceneParts expand_parts() const;
    Scene build() const;
};

// JSON scene files. Unknown keys are rejected; every length carries a
// mandatory nm/um/mm/m unit suffix. A top-level {"preset": "<name>"} loads a
// shipped preset and may be combined with a "settings" section.
SceneDocument parse_scene_text(const std::string& text);
SceneDocument parse_scene_file(const std::string& path);
std::string serialize_scene(const SceneDocument& doc);

// Fixed %.9e formatting used by every artifact writer.
std::string format_float(double v);

// CSV with header x_m,y_m,z_m,re_Bx,im_Bx,...,re_Ez,im_Ez; row order = input
// order. b and e must be the same length (E may be empty -> zeros).
void write_field_map(const std::vector<FieldSample>& samples, const std::string& path);

// Touchstone v1.1, "# Hz S RI R <zref>".
void write_touchstone_s1p(const std::vector<double>& frequencies,
                          const std::vector<Complex>& s11, double zref,
                          const std::string& path);
void write_touchstone_s2p(const std::vector<double>& frequencies,
                          const std::vector<netline::Abcd>& abcd, double zref,
                          const std::string& path);

struct TouchstoneData {
    int ports = 1;
    double zref = 50.0;
    std::vector<double> frequencies;
    // Per row: 1 entry (s1p) or 4 in file order S11,S21,S12,S22 (s2p).
    std::vector<std::vector<Complex>> data;
};
TouchstoneData read_touchstone(const std::string& path);

// S-parameters of a two-port ABCD matrix against a real reference impedance.
Eigen::Matrix2cd abcd_to_s(const netline::Abcd& m, double zref);

std::string fom_report_json(const fom::FomReport& report);
void write_comparison_csv(const fom::ComparisonTable& table, const std::string& path);
std::string format_comparison_text(const fom::ComparisonTable& table);

// Resistance (and |S11|) vs frequency CSV for sweep studies.
void write_network_csv(const netline::NetworkModel& model, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

} // namespace io
} // namespace esrline
