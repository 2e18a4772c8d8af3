// Acceptance gate: one line per criterion with pinned tolerances. Exit code
// is the number of failed criteria. argv[1] must point at the esrline-cli
// binary (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "esrline/electroqs.hpp"
#include "esrline/fom.hpp"
#include "esrline/io.hpp"
#include "esrline/magnetoqs.hpp"
#include "esrline/netline.hpp"
#include "esrline/pipeline.hpp"
#include "esrline/presets.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace esrline;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double nm = 1e-9;
constexpr double um = 1e-6;

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("[%s] %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

double mean_b(const std::vector<FieldSample>& s) {
    double acc = 0;
    for (const auto& x : s) acc += x.B.magnitude();
    return acc / double(s.size());
}

double mean_e(const std::vector<FieldSample>& s) {
    double acc = 0;
    for (const auto& x : s) acc += x.E.magnitude();
    return acc / double(s.size());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ---- criterion 1: analytic magnetic-field anchors --------------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    using magnetoqs::kMu0;
    const Complex I(1e-3, 0);

    // Finite wire vs the infinite-wire law at length/distance = 200.
    const double r = 1 * um, half = 100 * um;
    CVec3 B = magnetoqs::segment_field({0, -half, 0}, {0, half, 0}, I, {r, 0, 0});
    const double wire_err =
        std::fabs(B.magnitude() - kMu0 * std::abs(I) / (2 * kPi * r)) /
        (kMu0 * std::abs(I) / (2 * kPi * r));

    // Square loop, field at the center: 2*sqrt(2)*mu0*I/(pi*a).
    const double a = 10 * um, h = a / 2;
    CVec3 Bc = magnetoqs::segment_field({-h, -h, 0}, {h, -h, 0}, I, {0, 0, 0}) +
               magnetoqs::segment_field({h, -h, 0}, {h, h, 0}, I, {0, 0, 0}) +
               magnetoqs::segment_field({h, h, 0}, {-h, h, 0}, I, {0, 0, 0}) +
               magnetoqs::segment_field({-h, h, 0}, {-h, -h, 0}, I, {0, 0, 0});
    const double loop_expect = 2 * std::sqrt(2.0) * kMu0 * std::abs(I) / (kPi * a);
    const double loop_err = std::fabs(Bc.magnitude() - loop_expect) / loop_expect;

    const double dt = seconds_since(t0);
    report(1, wire_err <= 0.01 && loop_err <= 0.001 && dt < 1.0,
           "analytic field anchors: long wire 1%, square loop 0.1%, under 1 s",
           fmt("wire err %.2e, loop err %.2e, %.2f s", wire_err, loop_err, dt));
}

// ---- criterion 2: electrostatic anchors and sign structure ------------------

SceneParts plate_parts(double d, double t) {
    SceneParts parts;
    parts.materials.push_back({"metal", 5.8e7, 1.0, 1.0, true});
    parts.materials.push_back({"diel", 0.0, 1.0, 1.0, false});
    parts.stack.push_back({"bulk", 0.0, 20 * um, "diel"});
    parts.conductors.push_back({"bot", Box{0, 10 * um, 0, 10 * um, 5 * um, 5 * um + t},
                                "metal", "a", BrickRole::Signal});
    parts.conductors.push_back(
        {"top", Box{0, 10 * um, 0, 10 * um, 5 * um + t + d, 5 * um + 2 * t + d}, "metal",
         "b", BrickRole::Return});
    parts.ports.push_back({"p1", "a", "b"});
    return parts;
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const double d = 0.1 * um; // plate side / separation = 100
    Scene scene = build_scene(plate_parts(d, 0.2 * um));
    const double expect = electroqs::kEps0 * (10 * um) * (10 * um) / d;

    std::vector<double> cap;
    for (double edge : {2 * um, 1 * um, 0.5 * um}) {
        auto panels = electroqs::discretize_panels(scene, edge);
        auto system = electroqs::build_panel_system(std::move(panels), 1.0);
        auto sol = electroqs::solve_charges(system, {{"a", Complex(0.5, 0)},
                                                     {"b", Complex(-0.5, 0)}});
        cap.push_back(sol.net_charge(system, "a").real());
    }
    const double c_err = std::fabs(cap.back() - expect) / expect;
    const bool converging = std::fabs(cap[2] - cap[1]) < std::fabs(cap[1] - cap[0]);

    // Maxwell capacitance sign structure on every shipped preset.
    bool signs_ok = true;
    for (const auto& name : presets::preset_names()) {
        Scene s = pipeline::scene_with_line(presets::parts_by_name(name),
                                            presets::line_by_name(name));
        auto panels = electroqs::discretize_panels(s, 5e-7);
        auto system = electroqs::build_panel_system(std::move(panels), 3.9);
        Eigen::MatrixXd C = electroqs::capacitance_matrix(system, {"sig", "ret"});
        signs_ok = signs_ok && C(0, 0) > 0 && C(1, 1) > 0 && C(0, 1) < 0 && C(1, 0) < 0;
    }

    const double dt = seconds_since(t0);
    report(2, c_err <= 0.10 && converging && signs_ok && dt < 30.0,
           "parallel-plate capacitance 10% + refinement + Maxwell signs, under 30 s",
           fmt("C err %.2e, converging %.0f, %.1f s", c_err, converging ? 1.0 : 0.0, dt));
}

// ---- criterion 3: closed forms vs brute-force quadrature --------------------

void criterion_3() {
    std::mt19937 rng(20260823u);
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    double worst = 0;
    // 12 randomized parallel-filament pairs (a third of them antiparallel).
    for (int k = 0; k < 12; ++k) {
        magnetoqs::Filament fa, fb;
        const double w1 = uni(50, 300) * nm, h1 = uni(50, 300) * nm;
        const double w2 = uni(50, 300) * nm, h2 = uni(50, 300) * nm;
        const double l1 = uni(1, 5) * um, l2 = uni(1, 5) * um;
        const double sep = uni(0.02, 1) * um;
        const double dx = 0.5 * (w1 + h1) + 0.5 * (w2 + h2) + sep;
        const double dy = uni(-1, 1) * um, dz = uni(-0.5, 0.5) * um;
        fa.start = {0, 0, 0};
        fa.end = {0, l1, 0};
        fa.width = w1;
        fa.height = h1;
        fb.width = w2;
        fb.height = h2;
        if (k % 3 == 0) {
            fb.start = {dx, dy + l2, dz};
            fb.end = {dx, dy, dz};
        } else {
            fb.start = {dx, dy, dz};
            fb.end = {dx, dy + l2, dz};
        }
        const double closed = magnetoqs::partial_inductance(fa, fb);
        const double brute = oracles::partial_inductance_quadrature(fa, fb, 1e-6);
        worst = std::max(worst, std::fabs(closed - brute) / std::fabs(brute));
    }
    // 8 randomized panel self terms.
    for (int k = 0; k < 8; ++k) {
        electroqs::Panel p;
        p.center = {0, 0, 0};
        p.normal_axis = 2;
        p.width = uni(0.05, 2) * um;
        p.height = uni(0.05, 2) * um;
        p.parent_brick = "p";
        p.net = "n";
        const double eps_eff = uni(1.0, 12.0);
        const double closed = electroqs::potential_coefficient(p, p, eps_eff);
        const double brute = oracles::panel_self_quadrature(p.width, p.height, eps_eff);
        worst = std::max(worst, std::fabs(closed - brute) / std::fabs(brute));
    }

    report(3, worst <= 1e-4,
           "closed-form interaction integrals vs quadrature on 20 random geometries",
           fmt("worst rel err %.2e, tol 1e-4", worst));
}

// ---- criterion 4: CPS / CPW / balun comparison -------------------------------

double avg_b_at_unit_current(const LineConfig& cfg) {
    Scene scene = pipeline::scene_with_line(presets::comparison_parts(), cfg);
    auto mesh = magnetoqs::discretize_filaments(scene, {3, 3}, 8);
    auto system = magnetoqs::assemble_impedance(std::move(mesh),
                                                presets::kDefaultFrequency);
    auto sol = magnetoqs::solve_currents(system, Complex(1e-3, 0));
    auto samples = magnetoqs::b_field_at_probes(scene, sol, system.mesh.filaments,
                                                scene.probes().front());
    return mean_b(samples);
}

void criterion_4() {
    auto configs = presets::comparison_configs(); // CPS, CPW, CPW_TO_CPS
    const double b_cps = avg_b_at_unit_current(configs[0]);
    const double b_cpw = avg_b_at_unit_current(configs[1]);
    const double ratio = b_cpw / b_cps;

    auto table = fom::compare_configurations(presets::comparison_parts(), configs,
                                             presets::kDefaultPinDbm,
                                             presets::kDefaultFrequency);
    std::size_t cpw_row = 1; // declaration order above
    bool cpw_best = true;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (i != cpw_row)
            cpw_best = cpw_best &&
                       table.rows[cpw_row].ratio_B_over_E > table.rows[i].ratio_B_over_E;

    report(4, ratio >= 0.375 && ratio <= 0.625 && cpw_best,
           "avg_B(CPW)/avg_B(CPS) = 0.5 +- 25% at equal current; CPW tops B/E",
           fmt("ratio %.3f, CPW best %.0f", ratio, cpw_best ? 1.0 : 0.0));
}

// ---- criterion 5: gate level vs first metallization --------------------------

void criterion_5() {
    auto table = fom::compare_stacks(presets::stack_parts(), presets::stack_line(),
                                     presets::stack_levels(), presets::kDefaultPinDbm,
                                     presets::kDefaultFrequency);
    const auto& gate = table.rows[0]; // "poly"
    const auto& m1 = table.rows[1];
    const bool pass = m1.avg_B < gate.avg_B && m1.ratio_B_over_E < gate.ratio_B_over_E;
    report(5, pass, "moving the line from the gate level to M1 lowers avg_B and B/E",
           fmt("avg_B %.3e -> %.3e", gate.avg_B, m1.avg_B));
}

// ---- criterion 6: floating dummy screening -----------------------------------

void criterion_6() {
    const auto base = presets::environment_parts();
    const auto line = presets::environment_line();
    auto avg_e_at_fill = [&](double fill) {
        auto env = presets::environment_spec();
        env.dummy_fill = fill;
        SceneParts parts = fom::apply_environment(
            base, env,
            fill > 0 ? fom::EnvironmentVariant::WithDummies : fom::EnvironmentVariant::Bare);
        Scene scene = pipeline::scene_with_line(parts, line);
        auto op = pipeline::solve_operating_point(scene, line, presets::kDefaultPinDbm,
                                                  presets::kDefaultFrequency);
        return mean_e(op.e_samples);
    };
    const double e0 = avg_e_at_fill(0.0);
    const double e1 = avg_e_at_fill(0.1);
    const double e3 = avg_e_at_fill(0.3);
    const double e5 = avg_e_at_fill(0.5);
    const bool pass = e5 <= 0.6 * e0 && e0 > e1 && e1 > e3 && e3 > e5;
    report(6, pass, "dummy fill 0.5 cuts avg_E by 40%+, monotone over {0.1,0.3,0.5}",
           fmt("relative avg_E %.3f / %.3f / %.3f", e1 / e0, e3 / e0, e5 / e0));
}

// ---- criterion 7: de-embedded antenna resistance fraction ---------------------

void criterion_7() {
    SceneParts parts = presets::nano_antenna_parts();
    for (auto& m : parts.materials)
        if (m.name == "m1_metal") {
            m.conductivity_300K = 3e7;
            m.rrr = 1.0;
        }
    const auto line = presets::nano_antenna_line();
    Scene scene = pipeline::scene_with_line(parts, line);
    auto model = netline::frequency_sweep(scene, line, {1e8, 1e9, 3e9, 1e10}, 300.0, {});

    double min_fraction = 1e30;
    for (const auto& p : model.points) {
        auto acc = netline::characteristic(presets::access_line_rlgc(p.frequency));
        netline::Abcd access = netline::line_abcd(acc.Z0, acc.gamma,
                                                  presets::kAccessLineLength);
        netline::Abcd total = netline::abcd_cascade(access, p.abcd);
        netline::Abcd antenna = netline::de_embed(total, access);
        const double r_total = (total(0, 1) / total(1, 1)).real();
        const double r_ant = (antenna(0, 1) / antenna(1, 1)).real();
        min_fraction = std::min(min_fraction, r_ant / r_total);
    }
    report(7, min_fraction > 0.6,
           "antenna dominates the de-embedded resistance at 3e7 S/m, 0.1-10 GHz",
           fmt("min fraction %.3f", min_fraction));
}

// ---- criterion 8: flat real input impedance -----------------------------------

void criterion_8() {
    const auto line = presets::nano_antenna_line();
    Scene scene = pipeline::scene_with_line(presets::nano_antenna_parts(), line);
    auto model = netline::frequency_sweep(scene, line,
                                          {1e8, 5e8, 1e9, 2e9, 5e9, 1e10}, 300.0, {});
    double lo = 1e30, hi = 0;
    for (const auto& p : model.points) {
        lo = std::min(lo, p.Zin.real());
        hi = std::max(hi, p.Zin.real());
    }
    const double spread = (hi - lo) / lo;
    report(8, spread < 0.30, "real(Zin) varies under 30% across 0.1-10 GHz",
           fmt("re(Zin) %.2f..%.2f ohm, spread %.1f%%", lo, hi, 100 * spread));
}

// ---- criterion 9: cryogenic matching never worse -------------------------------

void criterion_9() {
    const auto line = presets::nano_antenna_line();
    std::vector<double> freqs;
    for (int i = 0; i < 101; ++i) freqs.push_back(0.1e9 + i * (19.9e9 / 100));
    Scene warm = pipeline::scene_with_line(presets::nano_antenna_parts(300.0), line);
    Scene cold = pipeline::scene_with_line(presets::nano_antenna_parts(4.0), line);
    auto m300 = netline::frequency_sweep(warm, line, freqs, 300.0, {});
    auto m4 = netline::frequency_sweep(cold, line, freqs, 4.0, {});
    bool pass = true;
    double worst = -1e30;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double excess = std::abs(m4.points[i].S11) - std::abs(m300.points[i].S11);
        worst = std::max(worst, excess);
        pass = pass && excess <= 1e-12;
    }
    report(9, pass, "|S11| at 4 K never exceeds |S11| at 300 K on the 101-point sweep",
           fmt("max(|S11|_4K - |S11|_300K) = %.2e", worst));
}

// ---- criterion 10: power bookkeeping -------------------------------------------

void criterion_10() {
    const auto line = presets::nano_antenna_line();
    Scene scene = pipeline::scene_with_line(presets::nano_antenna_parts(), line);
    auto op = pipeline::solve_operating_point(scene, line, -7.0,
                                              presets::kDefaultFrequency);
    const double accepted = op.excitation.accepted_power;
    const double ohmic = op.ohmic_loss_at_input;
    const double err = std::fabs(accepted - ohmic) / accepted;
    report(10, err <= 0.05,
           "accepted power equals summed filament ohmic losses within 5% at -7 dBm",
           fmt("accepted %.3e W, ohmic %.3e W, err %.2e", accepted, ohmic, err));
}

// ---- criterion 11: deterministic artifacts --------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion_11(const char* cli) {
    if (!cli) {
        report(11, false, "byte-identical artifacts on repeated runs",
               "no CLI path on the command line");
        return;
    }
    const fs::path root = fs::temp_directory_path() / "esrline_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream(root / "nano.json") << "{\"preset\": \"nano_antenna\"}\n";
        std::ofstream(root / "stack.json") << "{\"preset\": \"stack\"}\n";
    }
    struct Job {
        std::string args;
        std::string scene;
        std::vector<std::string> artifacts;
    };
    const std::vector<Job> jobs = {
        {"solve", "nano.json", {"fields.csv", "fom.json"}},
        {"sweep --freq 1e9:10e9:5", "nano.json", {"sweep.s1p", "network.csv"}},
        {"compare --study stack --levels poly,m1", "stack.json",
         {"comparison.csv", "comparison.txt"}},
    };
    bool pass = true;
    std::string detail = "ok";
    for (const auto& job : jobs) {
        std::vector<std::string> blobs[2];
        for (int run = 0; run < 2 && pass; ++run) {
            const fs::path out = root / ("run" + std::to_string(run));
            fs::remove_all(out);
            std::ostringstream cmd;
            cmd << '"' << cli << "\" " << job.args << " --scene \""
                << (root / job.scene).string() << "\" --out \"" << out.string()
                << "\" > /dev/null 2>&1";
            if (std::system(cmd.str().c_str()) != 0) {
                pass = false;
                detail = job.args + ": nonzero exit";
                break;
            }
            for (const auto& a : job.artifacts) blobs[run].push_back(slurp(out / a));
        }
        if (pass && blobs[0] != blobs[1]) {
            pass = false;
            detail = job.args + ": artifacts differ between runs";
        }
    }
    fs::remove_all(root);
    report(11, pass, "byte-identical artifacts on repeated solve/sweep/compare runs",
           detail);
}

} // namespace

int main(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11(argc > 1 ? argv[1] : nullptr);
    std::printf("acceptance: %d/11 passed in %.1f s\n", 11 - g_failures,
                seconds_since(t0));
    return g_failures;
}
