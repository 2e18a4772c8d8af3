#include "esrline/fom.hpp"

#include <cmath>
#include <limits>

namespace esrline {
namespace fom {

namespace {

double mean_magnitude(const std::vector<FieldSample>& samples, bool magnetic) {
    if (samples.empty()) throw EmptyProbes("field-of-merit evaluation needs probes");
    double acc = 0;
    for (const auto& s : samples) acc += (magnetic ? s.B : s.E).magnitude();
    return acc / static_cast<double>(samples.size());
}

double relative_std(const std::vector<FieldSample>& samples) {
    const double mean = mean_magnitude(samples, true);
    if (mean == 0) return 0;
    double acc = 0;
    for (const auto& s : samples) {
        const double d = s.B.magnitude() - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(samples.size())) / mean;
}

double safe_div(double a, double b) {
    return b != 0 ? a / b : (a != 0 ? std::numeric_limits<double>::infinity() : 1.0);
}

FomReport solve_row(const Scene& scene, const LineConfig& line, double pin_dbm,
                    double frequency, const netline::SolverSettings& settings,
                    const std::string& label) {
    auto op = pipeline::solve_operating_point(scene, line, pin_dbm, frequency, settings);
    return evaluate_fom(op.b_samples, op.e_samples, op.network, op.excitation, label);
}

} // namespace

FomReport evaluate_fom(const std::vector<FieldSample>& b_samples,
                       const std::vector<FieldSample>& e_samples,
                       const netline::NetworkPoint& network,
                       const netline::Excitation& excitation,
                       const std::string& label) {
    if (b_samples.size() != e_samples.size())
        throw MismatchedProbeSets("B and E sample counts differ");
    FomReport r;
    r.label = label;
    r.avg_B = mean_magnitude(b_samples, true);
    r.avg_E = mean_magnitude(e_samples, false);
    if (r.avg_E > 0) {
        r.ratio_B_over_E = r.avg_B / r.avg_E;
    } else {
        r.ratio_B_over_E = std::numeric_limits<double>::infinity();
        r.ratio_is_finite = false;
    }
    r.conversion_efficiency = r.avg_B / std::sqrt(excitation.available_power);
    r.s11_dB = 20.0 * std::log10(std::abs(network.S11));
    r.dissipated_power =
        netline::dissipated_power(excitation.available_power, network.S11);
    r.homogeneity_B = relative_std(b_samples);
    return r;
}

std::vector<ComparisonTable::NormalizedRow> ComparisonTable::normalized() const {
    std::vector<NormalizedRow> out;
    if (rows.empty()) return out;
    const FomReport& ref = rows.at(reference_index);
    for (const auto& r : rows) {
        NormalizedRow n;
        n.label = r.label;
        n.avg_B = safe_div(r.avg_B, ref.avg_B);
        n.avg_E = safe_div(r.avg_E, ref.avg_E);
        n.ratio_B_over_E = safe_div(r.ratio_B_over_E, ref.ratio_B_over_E);
        n.conversion_efficiency =
            safe_div(r.conversion_efficiency, ref.conversion_efficiency);
        n.dissipated_power = safe_div(r.dissipated_power, ref.dissipated_power);
        n.homogeneity_B = safe_div(r.homogeneity_B, ref.homogeneity_B);
        out.push_back(n);
    }
    return out;
}

ComparisonTable compare_configurations(const SceneParts& scene_base,
                                       const std::vector<LineConfig>& configs,
                                       double pin_dbm, double frequency,
                                       const netline::SolverSettings& settings) {
    if (configs.empty()) throw ValidationError("no line configurations to compare");
    ComparisonTable table;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        Scene scene = pipeline::scene_with_line(scene_base, configs[i]);
        table.rows.push_back(solve_row(scene, configs[i], pin_dbm, frequency, settings,
                                       to_string(configs[i].kind)));
        if (configs[i].kind == LineKind::CPW_TO_CPS) table.reference_index = i;
    }
    return table;
}

ComparisonTable compare_stacks(const SceneParts& scene_base, const LineConfig& line,
                               const std::vector<std::string>& levels, double pin_dbm,
                               double frequency, const netline::SolverSettings& settings) {
    if (levels.empty()) throw ValidationError("no stack levels to compare");
    ComparisonTable table;
    for (const auto& level : levels) {
        LineConfig cfg = line;
        cfg.level = level;
        Scene scene = pipeline::scene_with_line(scene_base, cfg);
        table.rows.push_back(
            solve_row(scene, cfg, pin_dbm, frequency, settings, level));
    }
    return table;
}

std::string to_string(EnvironmentVariant v) {
    switch (v) {
    case EnvironmentVariant::Bare: return "bare";
    case EnvironmentVariant::WithDummies: return "dummies";
    case EnvironmentVariant::WithInterconnect: return "interconnect";
    case EnvironmentVariant::Full: return "dummies+interconnect";
    }
    throw ValidationError("unknown environment variant");
}

SceneParts apply_environment(const SceneParts& base, const EnvironmentSpec& env,
                             EnvironmentVariant variant) {
    SceneParts parts = base;
    const bool dummies = variant == EnvironmentVariant::WithDummies ||
                         variant == EnvironmentVariant::Full;
    const bool interconnect = variant == EnvironmentVariant::WithInterconnect ||
                              variant == EnvironmentVariant::Full;
    if (dummies) {
        auto grid = generate_dummies(env.dummy_region, env.dummy_pitch, env.dummy_fill,
                                     env.dummy_level, env.dummy_material, parts.stack);
        // Interconnect routing takes precedence: tiles that would collide
        // with a wire are dropped, leaving a dummy-free corridor. The same
        // corridor is carved in every variant so the grids stay comparable.
        for (const auto& tile : grid) {
            bool blocked = false;
            for (const auto& wire : env.interconnects)
                blocked = blocked || tile.extents.touches(wire.extents, 0.0);
            if (!blocked) parts.conductors.push_back(tile);
        }
    }
    if (interconnect)
        parts.conductors.insert(parts.conductors.end(), env.interconnects.begin(),
                                env.interconnects.end());
    return parts;
}

ComparisonTable compare_environment(const SceneParts& scene_base, const LineConfig& line,
                                    const EnvironmentSpec& env,
                                    const std::vector<EnvironmentVariant>& variants,
                                    double pin_dbm, double frequency,
                                    const netline::SolverSettings& settings) {
    if (variants.empty()) throw ValidationError("no environment variants to compare");
    ComparisonTable table;
    for (auto v : variants) {
        SceneParts parts = apply_environment(scene_base, env, v);
        Scene scene = pipeline::scene_with_line(parts, line);
        table.rows.push_back(
            solve_row(scene, line, pin_dbm, frequency, settings, to_string(v)));
    }
    return table;
}

} // namespace fom
} // namespace esrline
