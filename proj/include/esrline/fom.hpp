#pragma once

#include <string>
#include <vector>

#include "esrline/pipeline.hpp"

namespace esrline {
namespace fom {

struct FomReport {
    std::string label;
    double avg_B = 0;                 // T
    double avg_E = 0;                 // V/m
    double ratio_B_over_E = 0;        // T*m/V (+inf sentinel when avg_E == 0)
    bool ratio_is_finite = true;
    double conversion_efficiency = 0; // T per sqrt(W available)
    double s11_dB = 0;
    double dissipated_power = 0;      // W
    double homogeneity_B = 0;         // std/mean of |B| over probes
};

FomReport evaluate_fom(const std::vector<FieldSample>& b_samples,
                       const std::vector<FieldSample>& e_samples,
                       const netline::NetworkPoint& network,
                       const netline::Excitation& excitation,
                       const std::string& label);

struct ComparisonTable {
    std::vector<FomReport> rows;
    std::size_t reference_index = 0;

    // Each quantity divided by the reference row's value (reference -> 1.0).
    struct NormalizedRow {
        std::string label;
        double avg_B = 0, avg_E = 0, ratio_B_over_E = 0, conversion_efficiency = 0,
               dissipated_power = 0, homogeneity_B = 0;
    };
    std::vector<NormalizedRow> normalized() const;
};

// Full pipeline per line configuration on a common base scene (environment +
// probes, no line). Reference row: CPW_TO_CPS when present, else the first.
ComparisonTable compare_configurations(const SceneParts& scene_base,
                                       const std::vector<LineConfig>& configs,
                                       double pin_dbm, double frequency,
                                       const netline::SolverSettings& settings = {});

// Same line configuration fabricated at each stack level.
ComparisonTable compare_stacks(const SceneParts& scene_base, const LineConfig& line,
                               const std::vector<std::string>& levels, double pin_dbm,
                               double frequency,
                               const netline::SolverSettings& settings = {});

// EM-environment study: floating dummy fill and QD interconnect variants.
enum class EnvironmentVariant { Bare, WithDummies, WithInterconnect, Full };
std::string to_string(EnvironmentVariant v);

struct EnvironmentSpec {
    Box dummy_region;
    double dummy_pitch = 0;
    double dummy_fill = 0.5;
    std::string dummy_level;
    std::string dummy_material;
    std::vector<ConductorBrick> interconnects;
};

ComparisonTable compare_environment(const SceneParts& scene_base, const LineConfig& line,
                                    const EnvironmentSpec& env,
                                    const std::vector<EnvironmentVariant>& variants,
                                    double pin_dbm, double frequency,
                                    const netline::SolverSettings& settings = {});

// Base parts with an environment variant applied.
SceneParts apply_environment(const SceneParts& base, const EnvironmentSpec& env,
                             EnvironmentVariant variant);

} // namespace fom
} // namespace esrline
