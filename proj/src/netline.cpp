#include "esrline/netline.hpp"

#include <cmath>

#include "esrline/electroqs.hpp"

namespace esrline {
namespace netline {

namespace {
constexpr double kPi = 3.14159265358979323846;

Complex tanh_safe(Complex x) {
    if (std::fabs(x.real()) > 20.0) return Complex(x.real() > 0 ? 1.0 : -1.0, 0.0);
    if (std::abs(x) < 1e-8) return x * (1.0 - x * x / 3.0);
    return std::tanh(x);
}
} // namespace

Characteristic characteristic(const RlgcModel& rlgc) {
    if (rlgc.L <= 0 || rlgc.C <= 0 || rlgc.R < 0 || rlgc.G < 0)
        throw ValidationError("RLGC model requires L,C > 0 and R,G >= 0");
    const double w = 2 * kPi * rlgc.frequency;
    const Complex zs(rlgc.R, w * rlgc.L);
    const Complex yp(rlgc.G, w * rlgc.C);
    Characteristic out;
    out.gamma = std::sqrt(zs * yp);
    if (out.gamma.real() < 0) out.gamma = -out.gamma;
    out.Z0 = std::sqrt(zs / yp);
    return out;
}

Complex input_impedance_shorted(Complex Z0, Complex gamma, double length) {
    if (length < 0) throw ValidationError("line length must be >= 0");
    return Z0 * tanh_safe(gamma * length);
}

Complex s11(Complex Zin, double Zref) {
    if (Zref <= 0) throw ValidationError("reference impedance must be positive");
    return (Zin - Zref) / (Zin + Zref);
}

Abcd line_abcd(Complex Z0, Complex gamma, double length) {
    const Complex x = gamma * length;
    const Complex ch = std::cosh(x), sh = std::sinh(x);
    Abcd m;
    m << ch, Z0 * sh, sh / Z0, ch;
    return m;
}

Abcd abcd_cascade(const Abcd& a, const Abcd& b) { return a * b; }

Abcd de_embed(const Abcd& total, const Abcd& access) {
    const Complex det = access(0, 0) * access(1, 1) - access(0, 1) * access(1, 0);
    if (std::abs(det) < 1e-12)
        throw SingularAccess("access ABCD matrix is singular");
    Abcd inv;
    inv << access(1, 1) / det, -access(0, 1) / det, -access(1, 0) / det,
        access(0, 0) / det;
    return inv * total;
}

Excitation excitation_from_power(double input_power_dbm, double Zref, Complex Zin,
                                 Complex gamma_times_length) {
    Excitation e;
    e.input_power_dbm = input_power_dbm;
    e.reference_impedance = Zref;
    e.available_power = std::pow(10.0, input_power_dbm / 10.0) * 1e-3;
    e.reflection = s11(Zin, Zref);
    if (std::abs(e.reflection) > 1.0 + 1e-9)
        throw ActiveLoad("reflection coefficient magnitude exceeds 1");
    e.accepted_power = e.available_power * (1.0 - std::norm(e.reflection));
    e.incident_wave = Complex(std::sqrt(2.0 * e.available_power), 0.0);
    const double sz = std::sqrt(Zref);
    e.input_voltage = e.incident_wave * sz * (1.0 + e.reflection);
    e.input_current = e.incident_wave / sz * (1.0 - e.reflection);
    // Current transfer along the shorted section: I(l) = I(0)/cosh(gamma l).
    Complex ch = std::fabs(gamma_times_length.real()) > 20.0
                     ? Complex(1e300, 0)
                     : std::cosh(gamma_times_length);
    e.short_current = e.input_current / ch;
    return e;
}

double dissipated_power(double available_power_W, Complex s11_value) {
    return available_power_W * (1.0 - std::norm(s11_value));
}

namespace {

double line_capacitance(const Scene& scene, const LineConfig& line,
                        const SolverSettings& settings) {
    const Port& port = scene.ports().front();
    std::vector<electroqs::Panel> panels;
    for (const auto& p : electroqs::discretize_panels(scene, settings.max_panel_edge)) {
        if (p.net == port.positive_net || p.net == port.negative_net)
            panels.push_back(p);
    }
    const Layer& lvl = scene.layer(line.level);
    const double eps = settings.eps_eff_override.value_or(
        scene.effective_permittivity(lvl.z_min, lvl.z_max()));
    auto sys = electroqs::build_panel_system(std::move(panels), eps);
    // Neutral differential mode of the two-conductor reduction:
    // C_line = (C_ss*C_rr - C_sr^2) / (C_ss + 2*C_sr + C_rr).
    Eigen::MatrixXd C = electroqs::capacitance_matrix(
        sys, {port.positive_net, port.negative_net});
    const double denom = C(0, 0) + 2 * C(0, 1) + C(1, 1);
    if (denom <= 0) throw SingularSystem("degenerate line capacitance matrix");
    return (C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0)) / denom;
}

} // namespace

RlgcExtraction extract_rlgc(const Scene& scene, const LineConfig& line, double frequency,
                            const SolverSettings& settings) {
    if (scene.ports().empty()) throw NoPortNets("scene has no ports");
    auto mesh = magnetoqs::discretize_filaments(scene, settings.subdivision,
                                                settings.segments_per_length);
    // L at DC is extracted from a low-frequency solve; R from the requested one.
    const double f_for_L = frequency > 0 ? frequency : 1e6;
    auto sys = magnetoqs::assemble_impedance(std::move(mesh), f_for_L);
    auto sol = magnetoqs::solve_currents(sys, Complex(1.0, 0.0));
    const Complex zp = sol.port_impedance;

    RlgcExtraction out;
    out.line_length = line.length;
    out.rlgc.frequency = frequency;
    out.rlgc.G = 0.0;
    out.rlgc.L = zp.imag() / (2 * kPi * f_for_L * line.length);
    if (frequency > 0 && frequency != f_for_L) {
        auto solf = magnetoqs::solve_currents(sys.at_frequency(frequency), Complex(1, 0));
        out.port_impedance = solf.port_impedance;
        out.rlgc.R = solf.port_impedance.real() / line.length;
        out.rlgc.L = solf.port_impedance.imag() / (2 * kPi * frequency * line.length);
    } else {
        out.port_impedance = frequency > 0 ? zp : Complex(zp.real(), 0.0);
        out.rlgc.R = zp.real() / line.length;
    }
    out.rlgc.C = line_capacitance(scene, line, settings) / line.length;
    return out;
}

NetworkModel frequency_sweep(const Scene& scene, const LineConfig& line,
                             const std::vector<double>& frequencies, double temperature,
                             const SolverSettings& settings) {
    if (frequencies.empty()) throw ValidationError("empty frequency list");
    for (std::size_t i = 1; i < frequencies.size(); ++i)
        if (frequencies[i] <= frequencies[i - 1])
            throw ValidationError("frequencies must be strictly increasing");

    SceneParts parts = scene.parts();
    parts.temperature = temperature;
    Scene at_temp = build_scene(parts);

    auto mesh = magnetoqs::discretize_filaments(at_temp, settings.subdivision,
                                                settings.segments_per_length);
    auto sys = magnetoqs::assemble_impedance(std::move(mesh), frequencies.front());
    const double cap = line_capacitance(at_temp, line, settings);

    NetworkModel model;
    model.frequencies = frequencies;
    model.reference_impedance = at_temp.ports().front().reference_impedance;
    model.line_length = line.length;
    for (double f : frequencies) {
        auto sol = magnetoqs::solve_currents(sys.at_frequency(f), Complex(1.0, 0.0));
        NetworkPoint pt;
        pt.frequency = f;
        pt.rlgc.frequency = f;
        pt.rlgc.R = sol.port_impedance.real() / line.length;
        pt.rlgc.L = sol.port_impedance.imag() / (2 * kPi * f * line.length);
        pt.rlgc.G = 0.0;
        pt.rlgc.C = cap / line.length;
        auto ch = characteristic(pt.rlgc);
        pt.Z0 = ch.Z0;
        pt.gamma = ch.gamma;
        pt.Zin = input_impedance_shorted(ch.Z0, ch.gamma, line.length);
        pt.S11 = s11(pt.Zin, model.reference_impedance);
        if (std::abs(pt.S11) > 1.0 + 1e-12)
            throw ActiveLoad("passivity violated at " + std::to_string(f) + " Hz");
        pt.abcd = line_abcd(ch.Z0, ch.gamma, line.length);
        model.points.push_back(pt);
    }
    return model;
}

} // namespace netline
} // namespace esrline
