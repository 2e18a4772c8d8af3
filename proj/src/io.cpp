#include "esrline/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "esrline/presets.hpp"
#include "esrline/units.hpp"

namespace esrline {
namespace io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw ParseError(msg); }

void require_keys(const json& obj, const std::string& context,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) parse_fail(context + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end())
            parse_fail(context + ": unknown key '" + it.key() + "'");
    }
}

const json& need(const json& obj, const std::string& context, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(context + ": missing key '" + key + "'");
    return *it;
}

double get_number(const json& obj, const std::string& context, const char* key) {
    const json& v = need(obj, context, key);
    if (!v.is_number()) parse_fail(context + ": '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

std::string get_string(const json& obj, const std::string& context, const char* key) {
    const json& v = need(obj, context, key);
    if (!v.is_string()) parse_fail(context + ": '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

// Lengths are strings with a mandatory unit suffix.
double get_length(const json& obj, const std::string& context, const char* key) {
    return parse_length(get_string(obj, context, key));
}

std::string length_str(double meters) {
    char buf[48];
    // Meters with no rescaling: serialize(parse(...)) is bit-exact.
    std::snprintf(buf, sizeof buf, "%.17gm", meters);
    return buf;
}

Box parse_box(const json& obj, const std::string& context, bool with_z) {
    if (with_z)
        require_keys(obj, context, {"x0", "x1", "y0", "y1", "z0", "z1"});
    else
        require_keys(obj, context, {"x0", "x1", "y0", "y1"});
    Box b;
    b.x0 = get_length(obj, context, "x0");
    b.x1 = get_length(obj, context, "x1");
    b.y0 = get_length(obj, context, "y0");
    b.y1 = get_length(obj, context, "y1");
    if (with_z) {
        b.z0 = get_length(obj, context, "z0");
        b.z1 = get_length(obj, context, "z1");
    }
    return b;
}

json box_json(const Box& b, bool with_z) {
    json o;
    o["x0"] = length_str(b.x0);
    o["x1"] = length_str(b.x1);
    o["y0"] = length_str(b.y0);
    o["y1"] = length_str(b.y1);
    if (with_z) {
        o["z0"] = length_str(b.z0);
        o["z1"] = length_str(b.z1);
    }
    return o;
}

SolveSettings parse_settings(const json& obj) {
    require_keys(obj, "settings",
                 {"temperature", "pin_dbm", "frequencies_Hz", "subdivision",
                  "segments_per_length", "max_panel_edge", "eps_eff"});
    SolveSettings s;
    if (obj.contains("temperature")) s.temperature = get_number(obj, "settings", "temperature");
    if (obj.contains("pin_dbm")) s.pin_dbm = get_number(obj, "settings", "pin_dbm");
    if (obj.contains("frequencies_Hz")) {
        const json& f = obj["frequencies_Hz"];
        if (!f.is_array() || f.empty()) parse_fail("settings: frequencies_Hz must be a non-empty array");
        s.frequencies.clear();
        for (const auto& v : f) {
            if (!v.is_number()) parse_fail("settings: frequencies_Hz entries must be numbers");
            s.frequencies.push_back(v.get<double>());
        }
    }
    if (obj.contains("subdivision")) {
        const json& sd = obj["subdivision"];
        if (!sd.is_array() || sd.size() != 2) parse_fail("settings: subdivision must be [nx, ny]");
        s.solver.subdivision.nx = sd[0].get<int>();
        s.solver.subdivision.ny = sd[1].get<int>();
    }
    if (obj.contains("segments_per_length"))
        s.solver.segments_per_length =
            static_cast<int>(get_number(obj, "settings", "segments_per_length"));
    if (obj.contains("max_panel_edge"))
        s.solver.max_panel_edge = get_length(obj, "settings", "max_panel_edge");
    if (obj.contains("eps_eff"))
        s.solver.eps_eff_override = get_number(obj, "settings", "eps_eff");
    return s;
}

json settings_json(const SolveSettings& s) {
    json o;
    o["temperature"] = s.temperature;
    o["pin_dbm"] = s.pin_dbm;
    o["frequencies_Hz"] = s.frequencies;
    o["subdivision"] = {s.solver.subdivision.nx, s.solver.subdivision.ny};
    o["segments_per_length"] = s.solver.segments_per_length;
    o["max_panel_edge"] = length_str(s.solver.max_panel_edge);
    if (s.solver.eps_eff_override) o["eps_eff"] = *s.solver.eps_eff_override;
    return o;
}

LineConfig parse_line(const json& obj) {
    require_keys(obj, "line",
                 {"kind", "signal_width", "gap", "ground_width", "length", "level",
                  "material", "shorted_end", "thickness", "access_fraction"});
    LineConfig c;
    c.kind = line_kind_from_string(get_string(obj, "line", "kind"));
    c.signal_width = get_length(obj, "line", "signal_width");
    c.gap = get_length(obj, "line", "gap");
    c.ground_width = get_length(obj, "line", "ground_width");
    c.length = get_length(obj, "line", "length");
    c.level = get_string(obj, "line", "level");
    c.material = get_string(obj, "line", "material");
    if (obj.contains("shorted_end")) c.shorted_end = obj["shorted_end"].get<bool>();
    if (obj.contains("thickness")) c.thickness = get_length(obj, "line", "thickness");
    if (obj.contains("access_fraction"))
        c.access_fraction = get_number(obj, "line", "access_fraction");
    return c;
}

json line_json(const LineConfig& c) {
    json o;
    o["kind"] = to_string(c.kind);
    o["signal_width"] = length_str(c.signal_width);
    o["gap"] = length_str(c.gap);
    o["ground_width"] = length_str(c.ground_width);
    o["length"] = length_str(c.length);
    o["level"] = c.level;
    o["material"] = c.material;
    o["shorted_end"] = c.shorted_end;
    if (c.thickness) o["thickness"] = length_str(*c.thickness);
    if (c.kind == LineKind::CPW_TO_CPS) o["access_fraction"] = c.access_fraction;
    return o;
}

SceneDocument parse_document(const json& root) {
    require_keys(root, "scene",
                 {"preset", "materials", "stack", "conductors", "line", "dummies",
                  "ports", "probes", "settings"});

    SceneDocument doc;
    if (root.contains("preset")) {
        for (const char* k : {"materials", "stack", "conductors", "ports", "probes"})
            if (root.contains(k))
                parse_fail(std::string("scene: 'preset' cannot be combined with '") + k + "'");
        const std::string name = root["preset"].get<std::string>();
        doc.preset = name;
        if (root.contains("settings")) doc.settings = parse_settings(root["settings"]);
        SceneParts parts = presets::parts_by_name(name, doc.settings.temperature);
        doc.materials = parts.materials;
        doc.stack = parts.stack;
        doc.conductors = parts.conductors;
        doc.ports = parts.ports;
        doc.probes = parts.probes;
        doc.line = root.contains("line") ? parse_line(root["line"])
                                         : presets::line_by_name(name);
        if (root.contains("dummies")) {
            // fall through to the shared dummy parser below
        }
    } else {
        for (const auto& m : need(root, "scene", "materials")) {
            require_keys(m, "material",
                         {"name", "conductivity_300K", "rrr", "relative_permittivity",
                          "is_conductor"});
            Material mat;
            mat.name = get_string(m, "material", "name");
            mat.is_conductor = need(m, "material", "is_conductor").get<bool>();
            if (m.contains("conductivity_300K"))
                mat.conductivity_300K = get_number(m, "material", "conductivity_300K");
            if (m.contains("rrr")) mat.rrr = get_number(m, "material", "rrr");
            if (m.contains("relative_permittivity"))
                mat.relative_permittivity = get_number(m, "material", "relative_permittivity");
            doc.materials.push_back(mat);
        }
        for (const auto& l : need(root, "scene", "stack")) {
            require_keys(l, "layer", {"name", "z_min", "thickness", "ambient_dielectric"});
            Layer layer;
            layer.name = get_string(l, "layer", "name");
            layer.z_min = get_length(l, "layer", "z_min");
            layer.thickness = get_length(l, "layer", "thickness");
            layer.ambient_dielectric = get_string(l, "layer", "ambient_dielectric");
            doc.stack.push_back(layer);
        }
        if (root.contains("conductors")) {
            for (const auto& c : root["conductors"]) {
                require_keys(c, "conductor", {"id", "extents", "material", "net", "role"});
                ConductorBrick b;
                b.id = get_string(c, "conductor", "id");
                b.extents = parse_box(need(c, "conductor", "extents"), "conductor extents", true);
                b.material = get_string(c, "conductor", "material");
                b.net = get_string(c, "conductor", "net");
                b.role = brick_role_from_string(get_string(c, "conductor", "role"));
                doc.conductors.push_back(b);
            }
        }
        if (root.contains("line")) doc.line = parse_line(root["line"]);
        if (root.contains("ports")) {
            for (const auto& p : root["ports"]) {
                require_keys(p, "port",
                             {"id", "positive_net", "negative_net", "reference_impedance"});
                Port port;
                port.id = get_string(p, "port", "id");
                port.positive_net = get_string(p, "port", "positive_net");
                port.negative_net = get_string(p, "port", "negative_net");
                if (p.contains("reference_impedance"))
                    port.reference_impedance = get_number(p, "port", "reference_impedance");
                doc.ports.push_back(port);
            }
        }
        if (root.contains("probes")) {
            for (const auto& p : root["probes"]) {
                require_keys(p, "probe set", {"label", "points"});
                ProbeSet ps;
                ps.label = get_string(p, "probe set", "label");
                for (const auto& pt : need(p, "probe set", "points")) {
                    if (!pt.is_array() || pt.size() != 3)
                        parse_fail("probe point must be [x, y, z] lengths");
                    ps.points.push_back(Vec3{parse_length(pt[0].get<std::string>()),
                                             parse_length(pt[1].get<std::string>()),
                                             parse_length(pt[2].get<std::string>())});
                }
                doc.probes.push_back(ps);
            }
        }
        if (root.contains("settings")) doc.settings = parse_settings(root["settings"]);
    }

    if (root.contains("dummies")) {
        const json& d = root["dummies"];
        require_keys(d, "dummies", {"region", "pitch", "fill_fraction", "level", "material"});
        DummySpec spec;
        spec.region = parse_box(need(d, "dummies", "region"), "dummy region", false);
        spec.pitch = get_length(d, "dummies", "pitch");
        spec.fill_fraction = get_number(d, "dummies", "fill_fraction");
        spec.level = get_string(d, "dummies", "level");
        spec.material = get_string(d, "dummies", "material");
        doc.dummies = spec;
    }
    return doc;
}

} // namespace

SceneParts SceneDocument::expand_parts() const {
    SceneParts parts;
    parts.materials = materials;
    parts.stack = stack;
    parts.conductors = conductors;
    parts.ports = ports;
    parts.probes = probes;
    parts.temperature = settings.temperature;
    if (dummies) {
        auto grid = generate_dummies(dummies->region, dummies->pitch,
                                     dummies->fill_fraction, dummies->level,
                                     dummies->material, parts.stack);
        // Explicit conductors (interconnect wiring in particular) take
        // precedence over fill: colliding tiles are dropped.
        for (const auto& tile : grid) {
            bool blocked = false;
            for (const auto& c : conductors)
                blocked = blocked || tile.extents.touches(c.extents, 0.0);
            if (!blocked) parts.conductors.push_back(tile);
        }
    }
    if (line) {
        GeneratedLine gen = generate_line(*line, parts.stack);
        parts.conductors.insert(parts.conductors.end(), gen.bricks.begin(),
                                gen.bricks.end());
        parts.ports.push_back(gen.port);
    }
    return parts;
}

Scene SceneDocument::build() const { return build_scene(expand_parts()); }

SceneDocument parse_scene_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
        }
        throw ParseError("invalid JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what());
    }
    return parse_document(root);
}

SceneDocument parse_scene_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scene file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene_text(buf.str());
}

std::string serialize_scene(const SceneDocument& doc) {
    json root;
    root["materials"] = json::array();
    for (const auto& m : doc.materials) {
        json o;
        o["name"] = m.name;
        o["conductivity_300K"] = m.conductivity_300K;
        o["rrr"] = m.rrr;
        o["relative_permittivity"] = m.relative_permittivity;
        o["is_conductor"] = m.is_conductor;
        root["materials"].push_back(o);
    }
    root["stack"] = json::array();
    for (const auto& l : doc.stack) {
        json o;
        o["name"] = l.name;
        o["z_min"] = length_str(l.z_min);
        o["thickness"] = length_str(l.thickness);
        o["ambient_dielectric"] = l.ambient_dielectric;
        root["stack"].push_back(o);
    }
    if (!doc.conductors.empty()) {
        root["conductors"] = json::array();
        for (const auto& b : doc.conductors) {
            json o;
            o["id"] = b.id;
            o["extents"] = box_json(b.extents, true);
            o["material"] = b.material;
            o["net"] = b.net;
            o["role"] = to_string(b.role);
            root["conductors"].push_back(o);
        }
    }
    if (doc.line) root["line"] = line_json(*doc.line);
    if (doc.dummies) {
        json o;
        o["region"] = box_json(doc.dummies->region, false);
        o["pitch"] = length_str(doc.dummies->pitch);
        o["fill_fraction"] = doc.dummies->fill_fraction;
        o["level"] = doc.dummies->level;
        o["material"] = doc.dummies->material;
        root["dummies"] = o;
    }
    if (!doc.ports.empty()) {
        root["ports"] = json::array();
        for (const auto& p : doc.ports) {
            json o;
            o["id"] = p.id;
            o["positive_net"] = p.positive_net;
            o["negative_net"] = p.negative_net;
            o["reference_impedance"] = p.reference_impedance;
            root["ports"].push_back(o);
        }
    }
    if (!doc.probes.empty()) {
        root["probes"] = json::array();
        for (const auto& ps : doc.probes) {
            json o;
            o["label"] = ps.label;
            o["points"] = json::array();
            for (const auto& pt : ps.points)
                o["points"].push_back(
                    {length_str(pt.x), length_str(pt.y), length_str(pt.z)});
            root["probes"].push_back(o);
        }
    }
    root["settings"] = settings_json(doc.settings);
    return root.dump(2) + "\n";
}

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_field_map(const std::vector<FieldSample>& samples, const std::string& path) {
    if (samples.empty()) throw IoError("no field samples to write");
    std::ostringstream out;
    out << "x_m,y_m,z_m,re_Bx,im_Bx,re_By,im_By,re_Bz,im_Bz,"
           "re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez\n";
    for (const auto& s : samples) {
        out << format_float(s.position.x) << ',' << format_float(s.position.y) << ','
            << format_float(s.position.z);
        for (const Complex& c : {s.B.x, s.B.y, s.B.z, s.E.x, s.E.y, s.E.z})
            out << ',' << format_float(c.real()) << ',' << format_float(c.imag());
        out << '\n';
    }
    write_text_file(path, out.str());
}

namespace {
std::string touchstone_header(double zref) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "# Hz S RI R %.9g\n", zref);
    return buf;
}
} // namespace

void write_touchstone_s1p(const std::vector<double>& frequencies,
                          const std::vector<Complex>& s11, double zref,
                          const std::string& path) {
    if (frequencies.size() != s11.size() || frequencies.empty())
        throw IoError("frequency/S11 lists empty or mismatched");
    std::ostringstream out;
    out << "! 1-port S-parameters\n" << touchstone_header(zref);
    for (std::size_t i = 0; i < frequencies.size(); ++i)
        out << format_float(frequencies[i]) << ' ' << format_float(s11[i].real()) << ' '
            << format_float(s11[i].imag()) << '\n';
    write_text_file(path, out.str());
}

Eigen::Matrix2cd abcd_to_s(const netline::Abcd& m, double zref) {
    const Complex A = m(0, 0), B = m(0, 1), C = m(1, 0), D = m(1, 1);
    const Complex den = A + B / zref + C * zref + D;
    Eigen::Matrix2cd s;
    s(0, 0) = (A + B / zref - C * zref - D) / den;
    s(0, 1) = 2.0 * (A * D - B * C) / den;
    s(1, 0) = 2.0 / den;
    s(1, 1) = (-A + B / zref - C * zref + D) / den;
    return s;
}

void write_touchstone_s2p(const std::vector<double>& frequencies,
                          const std::vector<netline::Abcd>& abcd, double zref,
                          const std::string& path) {
    if (frequencies.size() != abcd.size() || frequencies.empty())
        throw IoError("frequency/ABCD lists empty or mismatched");
    std::ostringstream out;
    out << "! 2-port S-parameters\n" << touchstone_header(zref);
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        Eigen::Matrix2cd s = abcd_to_s(abcd[i], zref);
        out << format_float(frequencies[i]);
        // Touchstone 1.1 two-port order: S11 S21 S12 S22.
        for (const Complex& c : {s(0, 0), s(1, 0), s(0, 1), s(1, 1)})
            out << ' ' << format_float(c.real()) << ' ' << format_float(c.imag());
        out << '\n';
    }
    write_text_file(path, out.str());
}

TouchstoneData read_touchstone(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    TouchstoneData data;
    bool header_seen = false;
    std::string line;
    while (std::getline(in, line)) {
        const auto bang = line.find('!');
        if (bang != std::string::npos) line.erase(bang);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "#") {
            std::string unit, param, fmt, r;
            double zref;
            if (!(ls >> unit >> param >> fmt >> r >> zref) || unit != "Hz" ||
                param != "S" || fmt != "RI" || r != "R")
                throw ParseError("unsupported Touchstone header in '" + path + "'");
            data.zref = zref;
            header_seen = true;
            continue;
        }
        if (!header_seen) throw ParseError("Touchstone data before header in '" + path + "'");
        std::vector<double> nums;
        nums.push_back(std::stod(first));
        double v;
        while (ls >> v) nums.push_back(v);
        if (nums.size() != 3 && nums.size() != 9)
            throw ParseError("unexpected Touchstone row width in '" + path + "'");
        data.frequencies.push_back(nums[0]);
        std::vector<Complex> row;
        for (std::size_t i = 1; i + 1 < nums.size(); i += 2)
            row.emplace_back(nums[i], nums[i + 1]);
        data.ports = row.size() == 1 ? 1 : 2;
        data.data.push_back(std::move(row));
    }
    if (data.frequencies.empty()) throw ParseError("no data rows in '" + path + "'");
    return data;
}

std::string fom_report_json(const fom::FomReport& r) {
    std::ostringstream out;
    out << "{\"label\":\"" << r.label << "\""
        << ",\"avg_B_T\":" << format_float(r.avg_B)
        << ",\"avg_E_V_per_m\":" << format_float(r.avg_E)
        << ",\"ratio_B_over_E\":"
        << (r.ratio_is_finite ? format_float(r.ratio_B_over_E) : std::string("\"inf\""))
        << ",\"ratio_is_finite\":" << (r.ratio_is_finite ? "true" : "false")
        << ",\"conversion_efficiency_T_per_sqrtW\":" << format_float(r.conversion_efficiency)
        << ",\"s11_dB\":" << format_float(r.s11_dB)
        << ",\"dissipated_power_W\":" << format_float(r.dissipated_power)
        << ",\"homogeneity_B\":" << format_float(r.homogeneity_B) << "}\n";
    return out.str();
}

void write_comparison_csv(const fom::ComparisonTable& table, const std::string& path) {
    std::ostringstream out;
    out << "label,avg_B_T,avg_E_V_per_m,ratio_B_over_E,"
           "conversion_efficiency_T_per_sqrtW,s11_dB,dissipated_power_W,homogeneity_B,"
           "norm_avg_B,norm_avg_E,norm_ratio_B_over_E\n";
    auto norm = table.normalized();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        out << r.label << ',' << format_float(r.avg_B) << ',' << format_float(r.avg_E)
            << ',' << format_float(r.ratio_B_over_E) << ','
            << format_float(r.conversion_efficiency) << ',' << format_float(r.s11_dB)
            << ',' << format_float(r.dissipated_power) << ','
            << format_float(r.homogeneity_B) << ',' << format_float(norm[i].avg_B)
            << ',' << format_float(norm[i].avg_E) << ','
            << format_float(norm[i].ratio_B_over_E) << '\n';
    }
    write_text_file(path, out.str());
}

std::string format_comparison_text(const fom::ComparisonTable& table) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %15s %15s %15s %10s %12s\n", "label", "avg_B[T]",
                  "avg_E[V/m]", "B/E[T*m/V]", "S11[dB]", "P_diss[W]");
    out << buf;
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%-22s %15.6e %15.6e %15.6e %10.3f %12.4e%s\n",
                      r.label.c_str(), r.avg_B, r.avg_E, r.ratio_B_over_E, r.s11_dB,
                      r.dissipated_power,
                      &r == &table.rows[table.reference_index] ? "  (ref)" : "");
        out << buf;
    }
    return out.str();
}

void write_network_csv(const netline::NetworkModel& model, const std::string& path) {
    std::ostringstream out;
    out << "frequency_Hz,R_ohm_per_m,L_H_per_m,C_F_per_m,re_Zin_ohm,im_Zin_ohm,"
           "re_S11,im_S11,mag_S11\n";
    for (const auto& p : model.points) {
        out << format_float(p.frequency) << ',' << format_float(p.rlgc.R) << ','
            << format_float(p.rlgc.L) << ',' << format_float(p.rlgc.C) << ','
            << format_float(p.Zin.real()) << ',' << format_float(p.Zin.imag()) << ','
            << format_float(p.S11.real()) << ',' << format_float(p.S11.imag()) << ','
            << format_float(std::abs(p.S11)) << '\n';
    }
    write_text_file(path, out.str());
}

} // namespace io
} // namespace esrline
