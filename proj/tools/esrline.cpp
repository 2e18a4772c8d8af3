// Command-line front end: scene solving, frequency sweeps, comparison
// studies, de-embedding and scene validation.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esrline/io.hpp"
#include "esrline/pipeline.hpp"
#include "esrline/presets.hpp"

namespace fs = std::filesystem;
using namespace esrline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

int exit_code_for(const Error& e) {
    static const std::set<std::string> parse_codes = {
        "ParseError",        "ValidationError",     "UnknownUnit",
        "OverlappingConductors", "DanglingNet",     "ProbeInsideConductor",
        "LayerGap",          "ConfigDoesNotFitLayer", "EmptyRegion",
        "NotAConductor",     "EmptyProbes",         "MismatchedProbeSets"};
    if (e.code() == "IoError") return kExitIo;
    if (parse_codes.count(e.code())) return kExitParse;
    return kExitSolver;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') { out += "\\n"; continue; }
        out.push_back(c);
    }
    return out;
}

void print_error(const std::string& code, const std::string& message) {
    std::cerr << "{\"error\":\"" << json_escape(code) << "\",\"message\":\""
              << json_escape(message) << "\"}\n";
}

struct CommonOpts {
    std::string scene_path;
    std::string out_dir = ".";
    double temperature = -1;  // <0: keep the scene file's value
    double pin_dbm = -1e9;    // sentinel: keep the scene file's value
    std::string freq_spec;    // start:stop:count, overrides the scene file
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_out) {
    cmd->add_option("--scene", o.scene_path, "Scene JSON file")->required();
    auto* out = cmd->add_option("--out", o.out_dir, "Output directory");
    if (need_out) out->required();
    cmd->add_option("--temp", o.temperature, "Operating temperature [K]");
    cmd->add_option("--pin", o.pin_dbm, "Available input power [dBm]");
    cmd->add_option("--freq", o.freq_spec, "Frequency grid start:stop:count [Hz]");
}

std::vector<double> parse_freq_spec(const std::string& spec) {
    double start, stop;
    long count;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' ||
        in.rdbuf()->in_avail() != 0)
        throw ValidationError("--freq expects start:stop:count, got '" + spec + "'");
    if (count < 1 || start <= 0 || (count > 1 && stop <= start))
        throw ValidationError("--freq grid must be positive and increasing");
    std::vector<double> f;
    for (long i = 0; i < count; ++i)
        f.push_back(count == 1 ? start : start + (stop - start) * double(i) / double(count - 1));
    return f;
}

io::SceneDocument load_document(const CommonOpts& o) {
    io::SceneDocument doc = io::parse_scene_file(o.scene_path);
    if (o.temperature > 0) doc.settings.temperature = o.temperature;
    if (o.pin_dbm > -1e8) doc.settings.pin_dbm = o.pin_dbm;
    if (!o.freq_spec.empty()) doc.settings.frequencies = parse_freq_spec(o.freq_spec);
    return doc;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

const LineConfig& require_line(const io::SceneDocument& doc) {
    if (!doc.line)
        throw ValidationError("this study needs a 'line' (or preset) section in the scene");
    return *doc.line;
}

io::SceneDocument without_line(io::SceneDocument doc) {
    doc.line.reset();
    return doc;
}

int cmd_validate(const CommonOpts& o) {
    io::SceneDocument doc = load_document(o);
    Scene scene = doc.build();
    std::cout << "{\"valid\":true,\"conductors\":" << scene.conductors().size()
              << ",\"ports\":" << scene.ports().size()
              << ",\"probe_sets\":" << scene.probes().size()
              << ",\"layers\":" << scene.stack().size() << "}\n";
    return kExitOk;
}

int cmd_solve(const CommonOpts& o) {
    io::SceneDocument doc = load_document(o);
    const LineConfig& line = require_line(doc);
    Scene scene = doc.build();
    ensure_out_dir(o.out_dir);

    const double f = doc.settings.frequencies.front();
    auto op = pipeline::solve_operating_point(scene, line, doc.settings.pin_dbm, f,
                                              doc.settings.solver);
    std::vector<FieldSample> merged = op.b_samples;
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].E = op.e_samples[i].E;
    io::write_field_map(merged, o.out_dir + "/fields.csv");

    auto report = fom::evaluate_fom(op.b_samples, op.e_samples, op.network,
                                    op.excitation, "solve");
    io::write_text_file(o.out_dir + "/fom.json", io::fom_report_json(report));
    std::cout << io::fom_report_json(report);
    return kExitOk;
}

int cmd_sweep(const CommonOpts& o) {
    io::SceneDocument doc = load_document(o);
    const LineConfig& line = require_line(doc);
    Scene scene = doc.build();
    ensure_out_dir(o.out_dir);

    auto model = netline::frequency_sweep(scene, line, doc.settings.frequencies,
                                          doc.settings.temperature, doc.settings.solver);
    std::vector<Complex> s11;
    for (const auto& p : model.points) s11.push_back(p.S11);
    io::write_touchstone_s1p(model.frequencies, s11, model.reference_impedance,
                             o.out_dir + "/sweep.s1p");
    io::write_network_csv(model, o.out_dir + "/network.csv");
    std::cout << "{\"points\":" << model.points.size() << ",\"s1p\":\"" << o.out_dir
              << "/sweep.s1p\"}\n";
    return kExitOk;
}

int cmd_compare(const CommonOpts& o, const std::string& study,
                const std::string& levels_csv) {
    io::SceneDocument doc = load_document(o);
    const LineConfig line = require_line(doc);
    SceneParts base = without_line(doc).expand_parts();
    ensure_out_dir(o.out_dir);
    const double f = doc.settings.frequencies.front();

    fom::ComparisonTable table;
    if (study == "config") {
        std::vector<LineConfig> configs;
        if (doc.preset == "comparison") {
            // The shipped comparison study carries curated per-kind
            // dimensions (the CPW gets its wide flanking grounds).
            configs = presets::comparison_configs();
        } else {
            for (LineKind k : {LineKind::CPS, LineKind::CPW, LineKind::CPW_TO_CPS}) {
                LineConfig c = line;
                c.kind = k;
                configs.push_back(c);
            }
        }
        table = fom::compare_configurations(base, configs, doc.settings.pin_dbm, f,
                                            doc.settings.solver);
    } else if (study == "stack") {
        std::vector<std::string> levels;
        std::istringstream in(levels_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) if (!tok.empty()) levels.push_back(tok);
        if (levels.empty()) throw ValidationError("--levels required for the stack study");
        table = fom::compare_stacks(base, line, levels, doc.settings.pin_dbm, f,
                                    doc.settings.solver);
    } else if (study == "env") {
        if (!doc.dummies)
            throw ValidationError("the env study needs a 'dummies' section in the scene");
        fom::EnvironmentSpec env;
        env.dummy_region = doc.dummies->region;
        env.dummy_pitch = doc.dummies->pitch;
        env.dummy_fill = doc.dummies->fill_fraction;
        env.dummy_level = doc.dummies->level;
        env.dummy_material = doc.dummies->material;
        SceneParts bare;
        {
            io::SceneDocument d = without_line(doc);
            d.dummies.reset();
            bare = d.expand_parts();
        }
        // Interconnect bricks come from the scene's explicit conductors.
        SceneParts stripped = bare;
        stripped.conductors.clear();
        for (const auto& b : bare.conductors) {
            if (b.role == BrickRole::Interconnect)
                env.interconnects.push_back(b);
            else
                stripped.conductors.push_back(b);
        }
        table = fom::compare_environment(
            stripped, line, env,
            {fom::EnvironmentVariant::Bare, fom::EnvironmentVariant::WithDummies,
             fom::EnvironmentVariant::WithInterconnect, fom::EnvironmentVariant::Full},
            doc.settings.pin_dbm, f, doc.settings.solver);
    } else {
        throw ValidationError("unknown study '" + study + "' (config|stack|env)");
    }

    io::write_comparison_csv(table, o.out_dir + "/comparison.csv");
    io::write_text_file(o.out_dir + "/comparison.txt", io::format_comparison_text(table));
    std::cout << io::format_comparison_text(table);
    return kExitOk;
}

int cmd_deembed(const CommonOpts& o, double access_length) {
    io::SceneDocument doc = load_document(o);
    const LineConfig& line = require_line(doc);
    Scene scene = doc.build();
    ensure_out_dir(o.out_dir);

    auto model = netline::frequency_sweep(scene, line, doc.settings.frequencies,
                                          doc.settings.temperature, doc.settings.solver);
    std::ostringstream csv;
    csv << "frequency_Hz,re_Zin_total_ohm,re_Zin_antenna_ohm,antenna_resistance_fraction\n";
    std::vector<Complex> s11_antenna;
    for (const auto& p : model.points) {
        auto acc = netline::characteristic(presets::access_line_rlgc(p.frequency));
        netline::Abcd access = netline::line_abcd(acc.Z0, acc.gamma, access_length);
        netline::Abcd total = netline::abcd_cascade(access, p.abcd);
        netline::Abcd antenna = netline::de_embed(total, access);
        const Complex zin_total = total(0, 1) / total(1, 1);
        const Complex zin_ant = antenna(0, 1) / antenna(1, 1);
        s11_antenna.push_back(netline::s11(zin_ant, model.reference_impedance));
        csv << io::format_float(p.frequency) << ',' << io::format_float(zin_total.real())
            << ',' << io::format_float(zin_ant.real()) << ','
            << io::format_float(zin_ant.real() / zin_total.real()) << '\n';
    }
    io::write_touchstone_s1p(model.frequencies, s11_antenna, model.reference_impedance,
                             o.out_dir + "/antenna.s1p");
    io::write_text_file(o.out_dir + "/resistance_fraction.csv", csv.str());
    std::cout << "{\"points\":" << model.points.size() << ",\"antenna_s1p\":\""
              << o.out_dir << "/antenna.s1p\"}\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-static EM co-simulation of shorted ESR control lines"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string study = "config";
    std::string levels = "poly,m1";
    double access_length = presets::kAccessLineLength;

    auto* solve = app.add_subcommand("solve", "Fields + figures of merit at one frequency");
    add_common(solve, o, true);
    auto* sweep = app.add_subcommand("sweep", "S11 / RLGC frequency sweep (Touchstone + CSV)");
    add_common(sweep, o, true);
    auto* compare = app.add_subcommand("compare", "Comparison studies");
    add_common(compare, o, true);
    compare->add_option("--study", study, "config | stack | env");
    compare->add_option("--levels", levels, "Comma-separated layer names (stack study)");
    auto* deembed = app.add_subcommand("deembed", "De-embed the antenna from an access section");
    add_common(deembed, o, true);
    deembed->add_option("--access-length", access_length, "Access section length [m]");
    auto* validate = app.add_subcommand("validate", "Parse and validate a scene file");
    add_common(validate, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        print_error("ParseError", e.what());
        return kExitParse;
    }

    try {
        if (solve->parsed()) return cmd_solve(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (compare->parsed()) return cmd_compare(o, study, levels);
        if (deembed->parsed()) return cmd_deembed(o, access_length);
        if (validate->parsed()) return cmd_validate(o);
    } catch (const Error& e) {
        print_error(e.code(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return kExitSolver;
    }
    return kExitOk;
}
