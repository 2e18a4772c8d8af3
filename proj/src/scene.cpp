#include "esrline/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace esrline {

namespace {
// Geometric tolerance for contact / containment decisions (1 fm at the
// nanometer scales this toolkit targets).
constexpr double kGeomTol = 1e-13;
} // namespace

double conductivity_at_temperature(const Material& material, double temperature_K) {
    if (!material.is_conductor)
        throw NotAConductor("material '" + material.name + "' is not a conductor");
    const double sigma300 = material.conductivity_300K;
    const double sigma4 = sigma300 * material.rrr;
    if (temperature_K >= 300.0) return sigma300;
    if (temperature_K <= 4.0) return sigma4;
    const double t = (temperature_K - 4.0) / (300.0 - 4.0);
    return std::exp(std::log(sigma4) + t * (std::log(sigma300) - std::log(sigma4)));
}

std::string to_string(BrickRole role) {
    switch (role) {
        case BrickRole::Signal: return "signal";
        case BrickRole::Return: return "return";
        case BrickRole::Dummy: return "dummy";
        case BrickRole::Gate: return "gate";
        case BrickRole::Interconnect: return "interconnect";
        case BrickRole::ShortStrap: return "short_strap";
    }
    return "signal";
}

BrickRole brick_role_from_string(const std::string& s) {
    if (s == "signal") return BrickRole::Signal;
    if (s == "return") return BrickRole::Return;
    if (s == "dummy") return BrickRole::Dummy;
    if (s == "gate") return BrickRole::Gate;
    if (s == "interconnect") return BrickRole::Interconnect;
    if (s == "short_strap") return BrickRole::ShortStrap;
    throw ValidationError("unknown conductor role '" + s + "'");
}

std::string to_string(LineKind kind) {
    switch (kind) {
        case LineKind::CPS: return "CPS";
        case LineKind::CPW: return "CPW";
        case LineKind::CPW_TO_CPS: return "CPW_TO_CPS";
    }
    return "CPS";
}

LineKind line_kind_from_string(const std::string& s) {
    if (s == "CPS") return LineKind::CPS;
    if (s == "CPW") return LineKind::CPW;
    if (s == "CPW_TO_CPS") return LineKind::CPW_TO_CPS;
    throw ValidationError("unknown line kind '" + s + "'");
}

const Material& Scene::material(const std::string& name) const {
    auto it = material_catalog_.find(name);
    if (it == material_catalog_.end())
        throw ValidationError("unknown material '" + name + "'");
    return it->second;
}

const Layer& Scene::layer(const std::string& name) const {
    for (const auto& l : parts_.stack)
        if (l.name == name) return l;
    throw ValidationError("unknown layer '" + name + "'");
}

const Layer& Scene::layer_of(std::size_t brick_index) const {
    return parts_.stack.at(brick_layer_.at(brick_index));
}

double Scene::brick_conductivity(const ConductorBrick& brick) const {
    return conductivity_at_temperature(material(brick.material), parts_.temperature);
}

std::vector<std::size_t> Scene::bricks_on_net(const std::string& net) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parts_.conductors.size(); ++i)
        if (parts_.conductors[i].net == net) out.push_back(i);
    return out;
}

bool Scene::net_exists(const std::string& net) const {
    return !bricks_on_net(net).empty();
}

double Scene::effective_permittivity(double z_a, double z_b) const {
    double lo = std::min(z_a, z_b), hi = std::max(z_a, z_b);
    if (hi - lo < kGeomTol) {
        for (const auto& l : parts_.stack)
            if (lo >= l.z_min - kGeomTol && lo <= l.z_max() + kGeomTol)
                return material(l.ambient_dielectric).relative_permittivity;
        return 1.0;
    }
    double weighted = 0.0;
    double covered = 0.0;
    for (const auto& l : parts_.stack) {
        double seg = std::min(hi, l.z_max()) - std::max(lo, l.z_min);
        if (seg > 0) {
            weighted += seg * material(l.ambient_dielectric).relative_permittivity;
            covered += seg;
        }
    }
    weighted += (hi - lo - covered) * 1.0; // uncovered gaps count as vacuum
    return weighted / (hi - lo);
}

bool Scene::point_inside_conductor(const Vec3& p, double tol) const {
    for (const auto& b : parts_.conductors)
        if (b.extents.strictly_contains(p, tol)) return true;
    return false;
}

Scene build_scene(SceneParts parts) {
    Scene scene;

    // Materials.
    for (const auto& m : parts.materials) {
        if (m.name.empty()) throw ValidationError("material with empty name");
        if (m.is_conductor && m.conductivity_300K <= 0)
            throw ValidationError("conductor '" + m.name + "' needs conductivity_300K > 0");
        if (!m.is_conductor && m.relative_permittivity < 1.0)
            throw ValidationError("dielectric '" + m.name + "' needs relative_permittivity >= 1");
        if (m.rrr < 1.0)
            throw ValidationError("material '" + m.name + "' has rrr < 1");
        if (!scene.material_catalog_.emplace(m.name, m).second)
            throw ValidationError("duplicate material '" + m.name + "'");
    }

    // Stack: sorted ascending, non-overlapping.
    std::sort(parts.stack.begin(), parts.stack.end(),
              [](const Layer& a, const Layer& b) { return a.z_min < b.z_min; });
    for (std::size_t i = 0; i < parts.stack.size(); ++i) {
        const auto& l = parts.stack[i];
        if (l.thickness <= 0)
            throw ValidationError("layer '" + l.name + "' has non-positive thickness");
        if (!scene.material_catalog_.count(l.ambient_dielectric))
            throw ValidationError("layer '" + l.name + "' references unknown dielectric");
        if (i > 0 && parts.stack[i - 1].z_max() > l.z_min + kGeomTol)
            throw ValidationError("layers '" + parts.stack[i - 1].name + "' and '" +
                                  l.name + "' overlap");
    }

    if (parts.temperature <= 0)
        throw ValidationError("temperature must be positive");

    scene.parts_ = parts;

    // Bricks: well-formed extents, known conductor material, layer assignment.
    scene.brick_layer_.resize(parts.conductors.size());
    for (std::size_t i = 0; i < parts.conductors.size(); ++i) {
        const auto& b = parts.conductors[i];
        const auto& e = b.extents;
        if (!(e.x1 > e.x0 && e.y1 > e.y0 && e.z1 > e.z0))
            throw ValidationError("brick '" + b.id + "' has degenerate extents");
        if (!scene.material(b.material).is_conductor)
            throw NotAConductor("brick '" + b.id + "' uses dielectric material '" +
                                b.material + "'");
        if (b.floating() && b.role != BrickRole::Dummy && b.role != BrickRole::Gate)
            throw ValidationError("brick '" + b.id +
                                  "': FLOATING net is only allowed for dummy/gate roles");
        bool placed = false;
        for (std::size_t li = 0; li < parts.stack.size(); ++li) {
            const auto& l = parts.stack[li];
            if (e.z0 >= l.z_min - kGeomTol && e.z1 <= l.z_max() + kGeomTol) {
                scene.brick_layer_[i] = li;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw LayerGap("brick '" + b.id + "' does not fit inside a single layer");
    }

    // Pairwise overlap check (touching faces are allowed and mean contact).
    for (std::size_t i = 0; i < parts.conductors.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.conductors.size(); ++j) {
            double v = parts.conductors[i].extents.overlap_volume(parts.conductors[j].extents);
            double min_v = std::min(parts.conductors[i].extents.volume(),
                                    parts.conductors[j].extents.volume());
            if (v > 1e-9 * min_v)
                throw OverlappingConductors("bricks '" + parts.conductors[i].id +
                                            "' and '" + parts.conductors[j].id +
                                            "' share interior volume");
        }
    }

    // Bounding box: conductors plus stack z-range.
    if (!parts.conductors.empty()) {
        scene.bbox_ = parts.conductors.front().extents;
        for (const auto& b : parts.conductors) scene.bbox_ = scene.bbox_.united(b.extents);
    }
    double stack_span = 0.0;
    for (const auto& l : parts.stack) {
        scene.bbox_.z0 = std::min(scene.bbox_.z0, l.z_min);
        scene.bbox_.z1 = std::max(scene.bbox_.z1, l.z_max());
        stack_span = std::max(stack_span, scene.bbox_.z1 - scene.bbox_.z0);
    }
    // Laterally the scene extends one stack height beyond the metal: probe
    // points live in the dielectric near the conductors, not only under them.
    scene.bbox_.x0 -= stack_span;
    scene.bbox_.x1 += stack_span;
    scene.bbox_.y0 -= stack_span;
    scene.bbox_.y1 += stack_span;

    // Ports: nets exist and form connected brick groups.
    for (const auto& p : parts.ports) {
        if (p.positive_net == p.negative_net)
            throw ValidationError("port '" + p.id + "' has identical nets");
        for (const auto& net : {p.positive_net, p.negative_net}) {
            auto members = scene.bricks_on_net(net);
            if (members.empty())
                throw DanglingNet("port '" + p.id + "' references net '" + net +
                                  "' with no bricks");
            // All bricks of the net must sit in one touch-connected component
            // of the conductor adjacency graph.
            std::vector<std::size_t> comp(parts.conductors.size());
            for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = i;
            std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
                while (comp[a] != a) a = comp[a] = comp[comp[a]];
                return a;
            };
            for (std::size_t i = 0; i < comp.size(); ++i)
                for (std::size_t j = i + 1; j < comp.size(); ++j)
                    if (parts.conductors[i].extents.touches(parts.conductors[j].extents, kGeomTol))
                        comp[find(i)] = find(j);
            for (std::size_t k = 1; k < members.size(); ++k)
                if (find(members[k]) != find(members[0]))
                    throw DanglingNet("net '" + net + "' of port '" + p.id +
                                      "' is not a connected conductor group");
        }
    }

    // Probes: inside the scene bounds, outside every conductor.
    for (const auto& ps : parts.probes) {
        if (ps.points.empty())
            throw ValidationError("probe set '" + ps.label + "' is empty");
        for (const auto& pt : ps.points) {
            if (!scene.bbox_.contains(pt, kGeomTol))
                throw ValidationError("probe '" + ps.label +
                                      "' has a point outside the scene bounding box");
            if (scene.point_inside_conductor(pt, kGeomTol))
                throw ProbeInsideConductor("probe '" + ps.label +
                                           "' has a point inside a conductor");
        }
    }

    return scene;
}

GeneratedLine generate_line(const LineConfig& config, const std::vector<Layer>& stack) {
    if (config.signal_width <= 0 || config.gap <= 0 || config.ground_width <= 0 ||
        config.length <= 0)
        throw ValidationError("line config dimensions must be positive");
    const Layer* level = nullptr;
    for (const auto& l : stack)
        if (l.name == config.level) level = &l;
    if (!level) throw ValidationError("line level '" + config.level + "' not in stack");

    const double t = config.thickness.value_or(level->thickness);
    if (t > level->thickness + 1e-15)
        throw ConfigDoesNotFitLayer("strip thickness exceeds layer '" + level->name +
                                    "' thickness");
    const double z0 = level->z_min, z1 = level->z_min + t;
    const double w = config.signal_width, g = config.gap, wg = config.ground_width;
    const double L = config.length;
    const double strap_len = w; // y-extent of the short strap

    GeneratedLine out;
    auto brick = [&](std::string id, double x0, double x1, double y0, double y1,
                     std::string net, BrickRole role) {
        out.bricks.push_back({std::move(id), Box{x0, x1, y0, y1, z0, z1},
                              config.material, std::move(net), role});
    };

    const double zc = (z0 + z1) / 2;
    Port port;
    port.id = "p1";
    port.positive_net = "sig";
    port.negative_net = "ret";

    switch (config.kind) {
        case LineKind::CPS: {
            brick("sig_strip", -g / 2 - w, -g / 2, 0, L, "sig", BrickRole::Signal);
            brick("ret_strip", g / 2, g / 2 + wg, 0, L, "ret", BrickRole::Return);
            brick("strap", -g / 2 - w, g / 2 + wg, L, L + strap_len, "sig",
                  BrickRole::ShortStrap);
            port.positive_location = Vec3{-g / 2 - w / 2, 0, zc};
            port.negative_location = Vec3{g / 2 + wg / 2, 0, zc};
            break;
        }
        case LineKind::CPW: {
            brick("sig_strip", -w / 2, w / 2, 0, L, "sig", BrickRole::Signal);
            brick("gnd_left", -w / 2 - g - wg, -w / 2 - g, 0, L, "ret", BrickRole::Return);
            brick("gnd_right", w / 2 + g, w / 2 + g + wg, 0, L, "ret", BrickRole::Return);
            brick("strap", -w / 2 - g - wg, w / 2 + g + wg, L, L + strap_len, "sig",
                  BrickRole::ShortStrap);
            port.positive_location = Vec3{0, 0, zc};
            port.negative_location = Vec3{0, 0, zc};
            port.terminal_merge_radius = w / 2 + g + wg + strap_len;
            break;
        }
        case LineKind::CPW_TO_CPS: {
            const double La = std::clamp(config.access_fraction, 0.05, 0.95) * L;
            brick("sig_strip", -w / 2, w / 2, 0, L, "sig", BrickRole::Signal);
            brick("gnd_left", -w / 2 - g - wg, -w / 2 - g, 0, La, "ret", BrickRole::Return);
            brick("gnd_right", w / 2 + g, w / 2 + g + wg, 0, La, "ret", BrickRole::Return);
            // Feed-side ground tie: the balun reference plane joins the two
            // grounds; realized as metal behind the launch so the left ground
            // is not a dead-end branch.
            brick("tie_left", -w / 2 - g - wg, -w / 2 - g, -strap_len, 0, "ret",
                  BrickRole::Return);
            brick("tie_right", w / 2 + g, w / 2 + g + wg, -strap_len, 0, "ret",
                  BrickRole::Return);
            brick("tie_bar", -w / 2 - g - wg, w / 2 + g + wg, -2 * strap_len,
                  -strap_len, "ret", BrickRole::Return);
            brick("ret_strip", w / 2 + g, w / 2 + g + wg, La, L, "ret", BrickRole::Return);
            brick("strap", -w / 2, w / 2 + g + wg, L, L + strap_len, "sig",
                  BrickRole::ShortStrap);
            port.positive_location = Vec3{0, 0, zc};
            port.negative_location = Vec3{0, 0, zc};
            port.terminal_merge_radius = w / 2 + g + wg + strap_len;
            break;
        }
    }
    out.port = port;
    return out;
}

std::vector<ConductorBrick> generate_dummies(const Box& region, double pitch,
                                             double fill_fraction,
                                             const std::string& level,
                                             const std::string& material,
                                             const std::vector<Layer>& stack) {
    if (fill_fraction < 0 || fill_fraction > 1)
        throw ValidationError("fill_fraction must lie in [0, 1]");
    if (pitch <= 0) throw ValidationError("dummy pitch must be positive");
    const double rx = region.x1 - region.x0, ry = region.y1 - region.y0;
    if (rx <= 0 || ry <= 0) throw EmptyRegion("dummy region has no area");
    const Layer* lvl = nullptr;
    for (const auto& l : stack)
        if (l.name == level) lvl = &l;
    if (!lvl) throw ValidationError("dummy level '" + level + "' not in stack");

    std::vector<ConductorBrick> out;
    if (fill_fraction == 0.0) return out;
    const int nx = static_cast<int>(std::floor(rx / pitch + 1e-9));
    const int ny = static_cast<int>(std::floor(ry / pitch + 1e-9));
    if (nx == 0 || ny == 0) throw EmptyRegion("dummy region smaller than one pitch");
    const double edge = pitch * std::sqrt(fill_fraction);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double cx = region.x0 + (i + 0.5) * pitch;
            const double cy = region.y0 + (j + 0.5) * pitch;
            ConductorBrick b;
            b.id = "dummy_" + std::to_string(i) + "_" + std::to_string(j);
            b.extents = Box{cx - edge / 2, cx + edge / 2, cy - edge / 2, cy + edge / 2,
                            lvl->z_min, lvl->z_max()};
            b.material = material;
            b.net = kFloatingNet;
            b.role = BrickRole::Dummy;
            out.push_back(std::move(b));
        }
    }
    return out;
}

} // namespace esrline
