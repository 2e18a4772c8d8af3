#pragma once

#include <vector>

#include "esrline/fields.hpp"
#include "esrline/netline.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace pipeline {

// One fully solved excitation state: line model, drive, and fields at the
// scene probes (all probe sets flattened, in declaration order).
struct OperatingPoint {
    netline::NetworkPoint network;
    netline::Excitation excitation;
    std::vector<FieldSample> b_samples;
    std::vector<FieldSample> e_samples;
    double ohmic_loss_at_input = 0; // W, filament losses driven by the input current
};

// Scene must contain the generated line (bricks + port named by
// generate_line). The electric drive follows the shorted-line voltage
// profile V(y), split across the two nets by per-cross-section charge
// neutrality (+alpha*V on the positive net, -(1-alpha)*V on the negative),
// with V(y) falling to ~0 at the short strap.
OperatingPoint solve_operating_point(const Scene& scene, const LineConfig& line,
                                     double pin_dbm, double frequency,
                                     const netline::SolverSettings& settings = {});

// Convenience: base parts (environment, probes, materials) + generated line.
Scene scene_with_line(const SceneParts& base, const LineConfig& line);

} // namespace pipeline
} // namespace esrline
