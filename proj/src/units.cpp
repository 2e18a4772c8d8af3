#include "esrline/units.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "esrline/errors.hpp"

namespace esrline {

double parse_length(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    double value = std::strtod(s, &end);
    if (end == s) throw UnknownUnit("not a length: '" + text + "'");
    while (*end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    std::string unit(end);
    double scale;
    if (unit == "nm") scale = 1e-9;
    else if (unit == "um" || unit == "µm" || unit == "μm") scale = 1e-6;
    else if (unit == "mm") scale = 1e-3;
    else if (unit == "m") scale = 1.0;
    else if (unit.empty())
        throw UnknownUnit("length '" + text + "' is missing a unit (nm/um/mm/m)");
    else
        throw UnknownUnit("unknown length unit '" + unit + "' in '" + text + "'");
    return value * scale;
}

std::string format_length(double meters) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12gnm", meters * 1e9);
    return buf;
}

} // namespace esrline
