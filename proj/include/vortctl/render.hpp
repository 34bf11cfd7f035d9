#pragma once

#include <string>

#include "vortctl/fem.hpp"
#include "vortctl/mesh.hpp"

namespace vortctl {

/// Flat-shaded SVG rendering of a nodal field: one filled polygon per
/// triangle colored by its mean value, plus a small min/max legend.
/// Deterministic output bytes for fixed inputs.
std::string field_svg(const ScalarField& field, int width_px = 640);

}  // namespace vortctl
