#pragma once

#include <vector>

#include "esrline/geometry.hpp"

namespace esrline {

// Complex B and E phasors sampled at one probe point.
struct FieldSample {
    Vec3 position;
    CVec3 B; // tesla
    CVec3 E; // volt per meter
};

} // namespace esrline
