#include "esrline/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "esrline/electroqs.hpp"

namespace esrline {
namespace pipeline {

namespace {

// V(y)/V(0) along a shorted line: sinh(gamma (l - y)) / sinh(gamma l),
// with the small-argument limit (l - y)/l.
Complex profile_ratio(Complex gamma, double length, double y) {
    const double yc = std::clamp(y, 0.0, length);
    const Complex x = gamma * length;
    if (std::abs(x) < 1e-6) return Complex((length - yc) / length, 0.0);
    return std::sinh(gamma * (length - yc)) / std::sinh(x);
}

} // namespace

Scene scene_with_line(const SceneParts& base, const LineConfig& line) {
    SceneParts parts = base;
    GeneratedLine gen = generate_line(line, parts.stack);
    parts.conductors.insert(parts.conductors.end(), gen.bricks.begin(), gen.bricks.end());
    parts.ports.clear();
    parts.ports.push_back(gen.port);
    return build_scene(std::move(parts));
}

OperatingPoint solve_operating_point(const Scene& scene, const LineConfig& line,
                                     double pin_dbm, double frequency,
                                     const netline::SolverSettings& settings) {
    OperatingPoint op;

    // Line network model at the operating frequency.
    netline::NetworkModel net = netline::frequency_sweep(scene, line, {frequency},
                                                         scene.temperature(), settings);
    op.network = net.points.front();
    op.excitation = netline::excitation_from_power(
        pin_dbm, net.reference_impedance, op.network.Zin,
        op.network.gamma * line.length);

    // Magnetic solve driven by the short-end current (fields are probed near
    // the short where that current flows).
    auto mesh = magnetoqs::discretize_filaments(scene, settings.subdivision,
                                                settings.segments_per_length);
    auto sys = magnetoqs::assemble_impedance(std::move(mesh), frequency);
    auto msol = magnetoqs::solve_currents(sys, op.excitation.short_current);
    const double i_short = std::abs(op.excitation.short_current);
    const double i_in = std::abs(op.excitation.input_current);
    op.ohmic_loss_at_input =
        i_short > 0 ? msol.ohmic_loss * (i_in * i_in) / (i_short * i_short) : 0.0;

    // Electric solve with the axial voltage profile on the line nets.
    const Port& port = scene.ports().front();
    auto panels = electroqs::discretize_panels(scene, settings.max_panel_edge);
    const Layer& lvl = scene.layer(line.level);
    const double probe_z = scene.probes().empty() ? lvl.z_min
                                                  : scene.probes().front().points.front().z;
    const double eps = settings.eps_eff_override.value_or(
        scene.effective_permittivity((lvl.z_min + lvl.z_max()) / 2, probe_z));
    auto psys = electroqs::build_panel_system(std::move(panels), eps);

    // Absolute potentials of the two line nets follow from per-cross-section
    // charge neutrality: v_sig = +alpha*V, v_ret = -(1-alpha)*V with
    // alpha = (C_rr + C_sr)/(C_ss + 2*C_sr + C_rr). A symmetric pair lands on
    // +-V/2; wide grounded shields land near 0 V and screen.
    Eigen::MatrixXd C2 = electroqs::capacitance_matrix(
        psys, {port.positive_net, port.negative_net});
    const double denom = C2(0, 0) + 2 * C2(0, 1) + C2(1, 1);
    const double alpha = denom > 0 ? (C2(1, 1) + C2(0, 1)) / denom : 0.5;

    Eigen::VectorXcd pots = Eigen::VectorXcd::Zero((Eigen::Index)psys.panels.size());
    for (Eigen::Index i = 0; i < pots.size(); ++i) {
        const auto& p = psys.panels[i];
        double sign = 0.0;
        if (p.net == port.positive_net) sign = alpha;
        else if (p.net == port.negative_net) sign = -(1.0 - alpha);
        if (sign != 0.0)
            pots(i) = sign * op.excitation.input_voltage *
                      profile_ratio(op.network.gamma, line.length, p.center.y);
    }
    auto esol = electroqs::solve_charges_profile(
        psys, {port.positive_net, port.negative_net}, pots);

    for (const auto& ps : scene.probes()) {
        auto b = magnetoqs::b_field_at_probes(scene, msol, sys.mesh.filaments, ps);
        auto e = electroqs::e_field_at_probes(scene, esol, psys.panels, ps);
        op.b_samples.insert(op.b_samples.end(), b.begin(), b.end());
        op.e_samples.insert(op.e_samples.end(), e.begin(), e.end());
    }
    return op;
}

} // namespace pipeline
} // namespace esrline
