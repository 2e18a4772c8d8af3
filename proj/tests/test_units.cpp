#include "doctest.h"
#include "esrline/errors.hpp"
#include "esrline/units.hpp"

using namespace esrline;

TEST_CASE("length parsing accepts the four suffixes") {
    CHECK(parse_length("200nm") == doctest::Approx(200e-9));
    CHECK(parse_length("10 um") == doctest::Approx(10e-6));
    CHECK(parse_length("1.5mm") == doctest::Approx(1.5e-3));
    CHECK(parse_length("0.01m") == doctest::Approx(0.01));
    CHECK(parse_length("-50nm") == doctest::Approx(-50e-9));
}

TEST_CASE("length parsing rejects missing or bogus units") {
    CHECK_THROWS_AS(parse_length("200"), UnknownUnit);
    CHECK_THROWS_AS(parse_length("200km"), UnknownUnit);
    CHECK_THROWS_AS(parse_length("abc"), UnknownUnit);
    CHECK_THROWS_AS(parse_length(""), UnknownUnit);
}

TEST_CASE("length formatting round-trips through the parser") {
    for (double v : {1e-9, 123.456e-9, 10e-6, 2.5e-3, 0.0}) {
        CHECK(parse_length(format_length(v)) == doctest::Approx(v).epsilon(1e-12));
    }
}
