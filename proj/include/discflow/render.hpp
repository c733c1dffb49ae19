// Streamline rendering: iso-contours of the streamfunction extracted by
// marching squares on the collocation grid mapped to Cartesian coordinates,
// written as a deterministic SVG. Counterclockwise cells (psi > 0) are drawn
// purple, clockwise ones blue.

#pragma once

#include <string>

#include "discflow/flow.hpp"

namespace discflow {

struct RenderOptions {
    int levels = 15;     // iso-levels, symmetric about 0
    int size_px = 720;   // image width and height
};

// Writes an SVG file; output bytes depend only on the design and options.
void render_streamlines(const FlowDesign& d, const std::string& path,
                        const RenderOptions& opts = {});

std::string render_streamlines_svg(const FlowDesign& d, const RenderOptions& opts = {});

// Number of strict sign alternations of psi around the circle at the grid
// radius closest to `radius` (zeros are skipped, wrap-around included).
int azimuthal_sign_changes(const FlowDesign& d, double radius);

}  // namespace discflow
