#include <cmath>

#include "doctest.h"
#include "esrline/presets.hpp"
#include "esrline/scene.hpp"

using namespace esrline;

namespace {

constexpr double nm = 1e-9;
constexpr double um = 1e-6;

SceneParts two_strip_parts() {
    SceneParts parts = presets::base_parts();
    parts.conductors.push_back(
        {"a", Box{0, 100 * nm, 0, 10 * um, 500 * nm, 600 * nm}, "m1_metal", "sig",
         BrickRole::Signal});
    parts.conductors.push_back(
        {"b", Box{300 * nm, 400 * nm, 0, 10 * um, 500 * nm, 600 * nm}, "m1_metal", "ret",
         BrickRole::Return});
    parts.ports.push_back({"p1", "sig", "ret"});
    parts.probes.push_back({"probe", {Vec3{200 * nm, 5 * um, 550 * nm}}});
    return parts;
}

} // namespace

TEST_CASE("minimal two-strip scene validates") {
    Scene scene = build_scene(two_strip_parts());
    CHECK(scene.conductors().size() == 2);
    CHECK(scene.ports().size() == 1);
    CHECK(scene.probes().size() == 1);
    CHECK(scene.layer_of(0).name == "m1");
}

TEST_CASE("scene validation is idempotent") {
    Scene once = build_scene(two_strip_parts());
    Scene twice = build_scene(once.parts());
    CHECK(twice.conductors().size() == once.conductors().size());
    CHECK(twice.bounding_box().x0 == doctest::Approx(once.bounding_box().x0));
    CHECK(twice.bounding_box().y1 == doctest::Approx(once.bounding_box().y1));
}

TEST_CASE("overlapping bricks are rejected") {
    SceneParts parts = two_strip_parts();
    parts.conductors.push_back({"c", Box{50 * nm, 150 * nm, 0, 10 * um, 500 * nm, 600 * nm},
                                "m1_metal", "sig", BrickRole::Signal});
    CHECK_THROWS_AS(build_scene(parts), OverlappingConductors);
}

TEST_CASE("probe inside a conductor is rejected") {
    SceneParts parts = two_strip_parts();
    parts.probes.push_back({"bad", {Vec3{50 * nm, 5 * um, 550 * nm}}});
    CHECK_THROWS_AS(build_scene(parts), ProbeInsideConductor);
}

TEST_CASE("port on a missing net is rejected") {
    SceneParts parts = two_strip_parts();
    parts.ports.push_back({"p2", "sig", "nowhere"});
    CHECK_THROWS_AS(build_scene(parts), DanglingNet);
}

TEST_CASE("brick spanning two layers is rejected") {
    SceneParts parts = two_strip_parts();
    parts.conductors.push_back({"tall", Box{600 * nm, 700 * nm, 0, 1 * um, 150 * nm, 550 * nm},
                                "poly_si", "sig", BrickRole::Gate});
    CHECK_THROWS_AS(build_scene(parts), LayerGap);
}

TEST_CASE("floating net is only allowed for dummies and gates") {
    SceneParts parts = two_strip_parts();
    parts.conductors.push_back({"f", Box{600 * nm, 700 * nm, 0, 1 * um, 500 * nm, 600 * nm},
                                "m1_metal", kFloatingNet, BrickRole::Signal});
    CHECK_THROWS_AS(build_scene(parts), ValidationError);
    parts.conductors.back().role = BrickRole::Dummy;
    CHECK_NOTHROW(build_scene(parts));
}

TEST_CASE("CPS line expands to two strips plus a strap") {
    LineConfig cfg;
    cfg.kind = LineKind::CPS;
    cfg.signal_width = 200 * nm;
    cfg.gap = 200 * nm;
    cfg.ground_width = 200 * nm;
    cfg.length = 10 * um;
    cfg.level = "m1";
    cfg.material = "m1_metal";
    GeneratedLine gen = generate_line(cfg, presets::standard_stack());
    CHECK(gen.bricks.size() == 3);
    int straps = 0;
    for (const auto& b : gen.bricks) {
        CHECK((b.net == "sig" || b.net == "ret"));
        if (b.role == BrickRole::ShortStrap) ++straps;
    }
    CHECK(straps == 1);
    CHECK(gen.port.positive_net == "sig");
    CHECK(gen.port.negative_net == "ret");
}

TEST_CASE("CPW line expands to signal plus two grounds on one return net") {
    LineConfig cfg;
    cfg.kind = LineKind::CPW;
    cfg.signal_width = 200 * nm;
    cfg.gap = 200 * nm;
    cfg.ground_width = 200 * nm;
    cfg.length = 10 * um;
    cfg.level = "m1";
    cfg.material = "m1_metal";
    GeneratedLine gen = generate_line(cfg, presets::standard_stack());
    CHECK(gen.bricks.size() == 4);
    int returns = 0;
    for (const auto& b : gen.bricks)
        if (b.net == "ret") ++returns;
    CHECK(returns == 2);
}

TEST_CASE("CPW-to-CPS line keeps one continuous signal net") {
    LineConfig cfg;
    cfg.kind = LineKind::CPW_TO_CPS;
    cfg.signal_width = 100 * nm;
    cfg.gap = 150 * nm;
    cfg.ground_width = 100 * nm;
    cfg.length = 10 * um;
    cfg.level = "m1";
    cfg.material = "m1_metal";
    cfg.access_fraction = 0.5;
    GeneratedLine gen = generate_line(cfg, presets::standard_stack());
    // Signal strip spans the full length in one brick; both sections share it.
    double sig_y0 = 1, sig_y1 = 0;
    for (const auto& b : gen.bricks) {
        if (b.net != "sig" || b.role != BrickRole::Signal) continue;
        sig_y0 = std::min(sig_y0, b.extents.y0);
        sig_y1 = std::max(sig_y1, b.extents.y1);
    }
    CHECK(sig_y0 == doctest::Approx(0.0));
    CHECK(sig_y1 == doctest::Approx(cfg.length));
    // And the whole thing builds into a valid connected scene.
    SceneParts parts = presets::base_parts();
    parts.conductors = gen.bricks;
    parts.ports.push_back(gen.port);
    CHECK_NOTHROW(build_scene(parts));
}

TEST_CASE("every line kind carries exactly one short strap") {
    for (LineKind kind : {LineKind::CPS, LineKind::CPW, LineKind::CPW_TO_CPS}) {
        LineConfig cfg = presets::nano_antenna_line();
        cfg.kind = kind;
        GeneratedLine gen = generate_line(cfg, presets::standard_stack());
        int straps = 0;
        for (const auto& b : gen.bricks)
            if (b.role == BrickRole::ShortStrap) ++straps;
        CHECK(straps == 1);
    }
}

TEST_CASE("strip thicker than its layer is rejected") {
    LineConfig cfg = presets::nano_antenna_line();
    cfg.thickness = 200 * nm; // m1 layer is 100 nm thick
    CHECK_THROWS_AS(generate_line(cfg, presets::standard_stack()), ConfigDoesNotFitLayer);
}

TEST_CASE("dummy grid arithmetic") {
    const auto stack = presets::standard_stack();
    Box region{0, 2 * um, 0, 2 * um, 0, 0};

    auto grid = generate_dummies(region, 500 * nm, 0.25, "poly", "poly_si", stack);
    CHECK(grid.size() == 16);
    for (const auto& b : grid) {
        CHECK(b.extents.x1 - b.extents.x0 == doctest::Approx(250 * nm));
        CHECK(b.extents.y1 - b.extents.y0 == doctest::Approx(250 * nm));
        CHECK(b.net == kFloatingNet);
        CHECK(b.role == BrickRole::Dummy);
    }

    CHECK(generate_dummies(region, 500 * nm, 0.0, "poly", "poly_si", stack).empty());

    auto full = generate_dummies(region, 500 * nm, 1.0, "poly", "poly_si", stack);
    CHECK(full.size() == 16);
    // Abutting edge-to-edge must still build as a non-overlapping scene.
    SceneParts parts = presets::base_parts();
    parts.conductors = full;
    parts.conductors.push_back({"sig_b", Box{3 * um, 3.1 * um, 0, 1 * um, 500 * nm, 600 * nm},
                                "m1_metal", "sig", BrickRole::Signal});
    parts.conductors.push_back({"ret_b", Box{3.3 * um, 3.4 * um, 0, 1 * um, 500 * nm, 600 * nm},
                                "m1_metal", "ret", BrickRole::Return});
    parts.ports.push_back({"p1", "sig", "ret"});
    CHECK_NOTHROW(build_scene(parts));

    CHECK_THROWS_AS(generate_dummies(Box{0, 100 * nm, 0, 100 * nm, 0, 0}, 500 * nm, 0.5,
                                     "poly", "poly_si", stack),
                    EmptyRegion);
}

TEST_CASE("dummy metal density matches the fill fraction") {
    const auto stack = presets::standard_stack();
    Box region{0, 2 * um, 0, 2 * um, 0, 0};
    for (double fill : {0.1, 0.3, 0.5, 1.0}) {
        auto grid = generate_dummies(region, 500 * nm, fill, "poly", "poly_si", stack);
        double metal = 0;
        for (const auto& b : grid)
            metal += (b.extents.x1 - b.extents.x0) * (b.extents.y1 - b.extents.y0);
        const double area = (region.x1 - region.x0) * (region.y1 - region.y0);
        CHECK(metal / area == doctest::Approx(fill).epsilon(1e-9));
    }
}

TEST_CASE("conductivity anchors and interpolation") {
    Material cu{"cu", 5.8e7, 1.0, 1.0, true};
    CHECK(conductivity_at_temperature(cu, 4.0) == doctest::Approx(5.8e7));

    Material m1{"m1_metal", 1.0e7, 3.0, 1.0, true};
    CHECK(conductivity_at_temperature(m1, 4.0) == doctest::Approx(3.0e7));
    CHECK(conductivity_at_temperature(m1, 300.0) == doctest::Approx(1.0e7));
    CHECK(conductivity_at_temperature(m1, 1.0) == doctest::Approx(3.0e7));
    CHECK(conductivity_at_temperature(m1, 400.0) == doctest::Approx(1.0e7));

    // Monotonically non-increasing in T between the anchors.
    double prev = conductivity_at_temperature(m1, 4.0);
    for (double t = 10; t <= 300; t += 10) {
        double s = conductivity_at_temperature(m1, t);
        CHECK(s <= prev + 1e-6);
        CHECK(s >= 1.0e7);
        CHECK(s <= 3.0e7);
        prev = s;
    }

    Material oxide{"sio2", 0.0, 1.0, 3.9, false};
    CHECK_THROWS_AS(conductivity_at_temperature(oxide, 4.0), NotAConductor);
}

TEST_CASE("effective permittivity is a thickness-weighted average") {
    Scene scene = build_scene(two_strip_parts());
    // Everything between z = 200 nm and 500 nm is sio2.
    CHECK(scene.effective_permittivity(200 * nm, 500 * nm) == doctest::Approx(3.9));
    // active (silicon, 11.7) over [0, 100nm] + sio2 over [100, 200nm].
    CHECK(scene.effective_permittivity(0, 200 * nm) ==
          doctest::Approx((11.7 * 100 + 3.9 * 100) / 200.0));
}
