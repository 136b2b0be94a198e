#pragma once
#include <string>
#include <vector>

#include "mqc/mesh.hpp"

namespace mqc {

struct SvgOptions {
    double pixel_width = 800.0;    // height follows the aspect ratio
    double stroke_width = 0.5;     // in output pixels
    std::string stroke = "#333333";
    /// Optional per-face scalar (|mu|, density, ...) mapped onto a
    /// blue-to-red ramp; empty = white fill.
    std::vector<double> face_scalar;
};

/// Deterministic wireframe rendering of a planar embedding.
void render_svg(const Embedding2D& map, const std::string& path, const SvgOptions& options = {});

}  // namespace mqc
