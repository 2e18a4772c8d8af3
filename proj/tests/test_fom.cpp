#include <cmath>

#include "doctest.h"
#include "esrline/fom.hpp"
#include "esrline/presets.hpp"

using namespace esrline;
using namespace esrline::fom;

namespace {

constexpr double nm = 1e-9;
constexpr double um = 1e-6;

FieldSample sample(double bmag, double emag) {
    FieldSample s;
    s.B.x = Complex(bmag, 0);
    s.E.z = Complex(emag, 0);
    return s;
}

netline::NetworkPoint fake_network() {
    netline::NetworkPoint pt;
    pt.frequency = 10e9;
    pt.Zin = Complex(30, 40);
    pt.S11 = netline::s11(pt.Zin, 50.0);
    return pt;
}

netline::Excitation fake_excitation(double pin_dbm) {
    return netline::excitation_from_power(pin_dbm, 50.0, Complex(30, 40));
}

} // namespace

TEST_CASE("uniform field magnitudes give zero homogeneity spread") {
    std::vector<FieldSample> b{sample(1e-3, 0), sample(1e-3, 0)};
    std::vector<FieldSample> e{sample(0, 100), sample(0, 300)};
    auto r = evaluate_fom(b, e, fake_network(), fake_excitation(-7), "t");
    CHECK(r.homogeneity_B == doctest::Approx(0.0));
    CHECK(r.avg_B == doctest::Approx(1e-3));
    CHECK(r.avg_E == doctest::Approx(200.0));
    CHECK(r.ratio_B_over_E == doctest::Approx(1e-3 / 200.0));
    CHECK(r.ratio_B_over_E * r.avg_E == doctest::Approx(r.avg_B).epsilon(1e-12));
}

TEST_CASE("fields scale with the square root of available power") {
    // The linear solvers make B proportional to the drive amplitude; the
    // report only re-derives conversion efficiency, which must not change.
    std::vector<FieldSample> b1{sample(1e-3, 0)};
    std::vector<FieldSample> b2{sample(1e-3 * std::sqrt(2.0), 0)};
    std::vector<FieldSample> e{sample(0, 100)};
    auto r1 = evaluate_fom(b1, e, fake_network(), fake_excitation(-7), "t");
    auto r2 = evaluate_fom(b2, e, fake_network(), fake_excitation(-7 + 10 * std::log10(2.0)), "t");
    CHECK(r2.avg_B == doctest::Approx(std::sqrt(2.0) * r1.avg_B).epsilon(1e-9));
    CHECK(r2.conversion_efficiency == doctest::Approx(r1.conversion_efficiency).epsilon(1e-9));
}

TEST_CASE("fully screened probes yield the infinity sentinel") {
    std::vector<FieldSample> b{sample(1e-3, 0)};
    std::vector<FieldSample> e{sample(0, 0)};
    auto r = evaluate_fom(b, e, fake_network(), fake_excitation(-7), "t");
    CHECK(!r.ratio_is_finite);
    CHECK(std::isinf(r.ratio_B_over_E));
}

TEST_CASE("empty or mismatched probe sets are rejected") {
    std::vector<FieldSample> none;
    std::vector<FieldSample> one{sample(1e-3, 0)};
    std::vector<FieldSample> two{sample(1e-3, 0), sample(1e-3, 0)};
    CHECK_THROWS_AS(evaluate_fom(none, none, fake_network(), fake_excitation(-7), "t"),
                    EmptyProbes);
    CHECK_THROWS_AS(evaluate_fom(one, two, fake_network(), fake_excitation(-7), "t"),
                    MismatchedProbeSets);
}

TEST_CASE("comparing a configuration with itself normalizes to ones") {
    auto cfg = presets::nano_antenna_line();
    auto table = compare_configurations(presets::nano_antenna_parts(), {cfg, cfg},
                                        presets::kDefaultPinDbm, presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 2);
    auto norm = table.normalized();
    for (const auto& row : norm) {
        CHECK(row.avg_B == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.avg_E == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.ratio_B_over_E == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("the reference row is the balun configuration when present") {
    auto table = compare_configurations(presets::comparison_parts(),
                                        presets::comparison_configs(),
                                        presets::kDefaultPinDbm, presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[table.reference_index].label == "CPW_TO_CPS");
    auto norm = table.normalized();
    CHECK(norm[table.reference_index].avg_B == doctest::Approx(1.0));
}

TEST_CASE("duplicated stack level gives identical rows") {
    auto table = compare_stacks(presets::stack_parts(), presets::stack_line(),
                                {"m1", "m1"}, presets::kDefaultPinDbm,
                                presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].avg_B == doctest::Approx(table.rows[1].avg_B));
    CHECK(table.rows[0].avg_E == doctest::Approx(table.rows[1].avg_E));
}

TEST_CASE("field strength decays with line-to-probe distance over synthetic levels") {
    SceneParts parts = presets::base_parts();
    // Three metal levels at increasing height above the probe plane.
    parts.stack.clear();
    parts.stack.push_back({"active", 0.0, 100 * nm, "silicon"});
    parts.stack.push_back({"lvl1", 100 * nm, 100 * nm, "sio2"});
    parts.stack.push_back({"gap1", 200 * nm, 300 * nm, "sio2"});
    parts.stack.push_back({"lvl2", 500 * nm, 100 * nm, "sio2"});
    parts.stack.push_back({"gap2", 600 * nm, 500 * nm, "sio2"});
    parts.stack.push_back({"lvl3", 1100 * nm, 100 * nm, "sio2"});
    const double L = presets::nano_antenna_line().length;
    parts.probes.push_back({"QD", {Vec3{0, L + 30 * nm, 50 * nm}, Vec3{0, L + 70 * nm, 50 * nm}}});

    auto table = compare_stacks(parts, presets::stack_line(), {"lvl1", "lvl2", "lvl3"},
                                presets::kDefaultPinDbm, presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].avg_B > table.rows[1].avg_B);
    CHECK(table.rows[1].avg_B > table.rows[2].avg_B);
}

TEST_CASE("bare environment compared with itself is unchanged") {
    auto env = presets::environment_spec();
    auto table = compare_environment(presets::environment_parts(),
                                     presets::environment_line(), env,
                                     {EnvironmentVariant::Bare, EnvironmentVariant::Bare},
                                     presets::kDefaultPinDbm, presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].avg_B == doctest::Approx(table.rows[1].avg_B));
    CHECK(table.rows[0].avg_E == doctest::Approx(table.rows[1].avg_E));
}

TEST_CASE("environment variants add the expected conductors") {
    auto env = presets::environment_spec();
    auto base = presets::environment_parts();
    auto bare = apply_environment(base, env, EnvironmentVariant::Bare);
    auto dumm = apply_environment(base, env, EnvironmentVariant::WithDummies);
    auto wire = apply_environment(base, env, EnvironmentVariant::WithInterconnect);
    auto full = apply_environment(base, env, EnvironmentVariant::Full);
    CHECK(bare.conductors.size() == base.conductors.size());
    CHECK(dumm.conductors.size() > bare.conductors.size());
    CHECK(wire.conductors.size() == bare.conductors.size() + env.interconnects.size());
    CHECK(full.conductors.size() ==
          dumm.conductors.size() + env.interconnects.size());
}

TEST_CASE("interconnect wiring degrades the field ratio") {
    auto env = presets::environment_spec();
    auto table = compare_environment(
        presets::environment_parts(), presets::environment_line(), env,
        {EnvironmentVariant::Bare, EnvironmentVariant::WithInterconnect},
        presets::kDefaultPinDbm, presets::kDefaultFrequency);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].avg_E >= table.rows[0].avg_E);
    CHECK(table.rows[1].ratio_B_over_E < table.rows[0].ratio_B_over_E);
}
