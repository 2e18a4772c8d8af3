#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "esrline/magnetoqs.hpp"
#include "esrline/scene.hpp"

namespace esrline {
namespace netline {

// Discretization controls shared by the field-solver bridge.
struct SolverSettings {
    magnetoqs::Subdivision subdivision{3, 3};
    int segments_per_length = 8;
    double max_panel_edge = 5e-7; // m
    std::optional<double> eps_eff_override;
};

// Per-unit-length line parameters at one frequency.
struct RlgcModel {
    double R = 0; // ohm/m
    double L = 0; // H/m
    double G = 0; // S/m
    double C = 0; // F/m
    double frequency = 0;
};

// Z0 = sqrt((R+jwL)/(G+jwC)), gamma = sqrt((R+jwL)(G+jwC)), Re(gamma) >= 0.
struct Characteristic {
    Complex Z0;
    Complex gamma; // 1/m
};
Characteristic characteristic(const RlgcModel& rlgc);

// Input impedance of a shorted line section: Z0 * tanh(gamma * length).
Complex input_impedance_shorted(Complex Z0, Complex gamma, double length);

Complex s11(Complex Zin, double Zref);

using Abcd = Eigen::Matrix2cd;

// ABCD of a uniform line section.
Abcd line_abcd(Complex Z0, Complex gamma, double length);
Abcd abcd_cascade(const Abcd& a, const Abcd& b);
// Removes a leading access section: de_embed(cascade(access, dut), access) = dut.
Abcd de_embed(const Abcd& total, const Abcd& access);

// One-port drive derived from available power (peak-phasor convention,
// P = |V||I|cos(phi)/2).
struct Excitation {
    double input_power_dbm = 0;
    double reference_impedance = 50;
    double available_power = 0; // W
    Complex reflection;         // S11 at the line input
    double accepted_power = 0;  // W
    Complex incident_wave;      // a, sqrt(W) scaled, |a|^2/2 = available power
    Complex input_voltage;      // V at the line input
    Complex input_current;      // A into the line
    Complex short_current;      // A through the short termination
};

// gamma_times_length describes the line between input and short; pass 0 for
// a lumped or unknown line (short current == input current).
Excitation excitation_from_power(double input_power_dbm, double Zref, Complex Zin,
                                 Complex gamma_times_length = Complex(0, 0));

double dissipated_power(double available_power_W, Complex s11);

// Extracted line model plus the underlying filament solve at one frequency.
struct RlgcExtraction {
    RlgcModel rlgc;
    Complex port_impedance; // of the full line loop (ohm)
    double line_length = 0;
};

RlgcExtraction extract_rlgc(const Scene& scene, const LineConfig& line, double frequency,
                            const SolverSettings& settings = {});

struct NetworkPoint {
    double frequency = 0;
    RlgcModel rlgc;
    Complex Z0, gamma;
    Complex Zin; // shorted-line input impedance
    Complex S11;
    Abcd abcd;
};

struct NetworkModel {
    std::vector<double> frequencies;
    std::vector<NetworkPoint> points;
    double reference_impedance = 50;
    double line_length = 0;
};

// Full pipeline (rlgc -> characteristic -> Zin -> S11) per frequency at the
// given temperature's conductivities.
NetworkModel frequency_sweep(const Scene& scene, const LineConfig& line,
                             const std::vector<double>& frequencies, double temperature,
                             const SolverSettings& settings = {});

} // namespace netline
} // namespace esrline
