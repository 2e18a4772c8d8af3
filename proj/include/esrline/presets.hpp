#pragma once

#include <string>
#include <vector>

#include "esrline/fom.hpp"
#include "esrline/netline.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace presets {

// Shared operating point for the shipped studies.
inline constexpr double kDefaultPinDbm = -7.0;
inline constexpr double kDefaultFrequency = 10e9; // Hz

// Conductors: "m1_metal" (1e7 S/m at 300 K, rrr 3), "cu" and "poly_si".
// Dielectrics: "silicon" (11.7), "sio2" (3.9), "vacuum".
std::vector<Material> standard_materials();

// active / poly / ild1 / m1 / ild2 from z = 0 to 1 um.
std::vector<Layer> standard_stack();

// Stack + materials, no conductors/ports/probes.
SceneParts base_parts(double temperature = 300.0);

// Shorted CPS nano-antenna at M1: 100 nm strips, 150 nm gap, 10 um long.
LineConfig nano_antenna_line();
// base_parts + QD probes below the short strap (z = 50 nm, active layer).
SceneParts nano_antenna_parts(double temperature = 300.0);

// Access section used for de-embedding studies. The values are documented
// toolkit defaults for a low-loss thick-copper feed, not extracted geometry.
netline::RlgcModel access_line_rlgc(double frequency);
inline constexpr double kAccessLineLength = 100e-6; // m

// Configuration study: CPS / CPW / CPW_TO_CPS sharing one probe set.
std::vector<LineConfig> comparison_configs();
SceneParts comparison_parts(double temperature = 300.0);

// Stack study: nano-antenna geometry fabricated at the gate (poly) level
// versus the first metallization level.
LineConfig stack_line();
std::vector<std::string> stack_levels();
SceneParts stack_parts(double temperature = 300.0);

// Environment study: floating poly dummy grid + a floating QD-wiring
// interconnect routed next to the line.
LineConfig environment_line();
fom::EnvironmentSpec environment_spec();
SceneParts environment_parts(double temperature = 300.0);

// Named presets for the CLI ("nano_antenna", "comparison", "stack",
// "environment").
SceneParts parts_by_name(const std::string& name, double temperature = 300.0);
LineConfig line_by_name(const std::string& name);
std::vector<std::string> preset_names();

} // namespace presets
} // namespace esrline
