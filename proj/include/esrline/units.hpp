#pragma once

#include <string>

namespace esrline {

// Parses a length with a mandatory unit suffix ("200nm", "10 um", "1.5mm",
// "0.01m"). Throws UnknownUnit when the suffix is missing or not recognized.
double parse_length(const std::string& text);

// Formats a length in meters with full precision and an explicit unit.
std::string format_length(double meters);

} // namespace esrline
