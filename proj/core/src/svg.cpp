#include "mqc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mqc/error.hpp"

namespace mqc {

namespace {

std::string ramp_color(double t) {
    // blue (0) -> white (0.5) -> red (1)
    t = std::clamp(t, 0.0, 1.0);
    const auto channel = [](double v) {
        return static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    };
    const int r = channel(t <= 0.5 ? 2.0 * t : 1.0);
    const int g = channel(t <= 0.5 ? 2.0 * t : 2.0 - 2.0 * t);
    const int b = channel(t <= 0.5 ? 1.0 : 2.0 - 2.0 * t);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void render_svg(const Embedding2D& map, const std::string& path, const SvgOptions& options) {
    const TriMesh& mesh = *map.parent;
    if (!options.face_scalar.empty() &&
        options.face_scalar.size() != static_cast<size_t>(mesh.num_faces()))
        fail_validation("render_svg: face_scalar size mismatch");

    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{-lo.x, -lo.y};
    for (const auto& p : map.positions) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    const double span_x = std::max(hi.x - lo.x, 1e-30);
    const double span_y = std::max(hi.y - lo.y, 1e-30);
    const double margin = 0.02 * options.pixel_width;
    const double scale = (options.pixel_width - 2.0 * margin) / span_x;
    const double height = span_y * scale + 2.0 * margin;
    // y flipped so the embedding appears with its mathematical orientation
    const auto px = [&](const Vec2& p) { return margin + scale * (p.x - lo.x); };
    const auto py = [&](const Vec2& p) { return height - margin - scale * (p.y - lo.y); };

    double smin = 0.0, smax = 1.0;
    if (!options.face_scalar.empty()) {
        smin = *std::min_element(options.face_scalar.begin(), options.face_scalar.end());
        smax = *std::max_element(options.face_scalar.begin(), options.face_scalar.end());
    }

    std::ofstream out(path);
    if (!out) fail_io("render_svg: cannot open " + path);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" height=\"%.1f\" "
                  "viewBox=\"0 0 %.1f %.1f\">\n",
                  options.pixel_width, height, options.pixel_width, height);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<g stroke=\"%s\" stroke-width=\"%.3f\" stroke-linejoin=\"round\">\n",
                  options.stroke.c_str(), options.stroke_width);
    out << buf;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        std::string fill = "#ffffff";
        if (!options.face_scalar.empty()) {
            const double v = options.face_scalar[f];
            fill = ramp_color(smax > smin ? (v - smin) / (smax - smin) : 0.5);
        }
        std::snprintf(buf, sizeof(buf),
                      "<polygon fill=\"%s\" points=\"%.3f,%.3f %.3f,%.3f %.3f,%.3f\"/>\n",
                      fill.c_str(), px(map.pos(t[0])), py(map.pos(t[0])), px(map.pos(t[1])),
                      py(map.pos(t[1])), px(map.pos(t[2])), py(map.pos(t[2])));
        out << buf;
    }
    out << "</g>\n</svg>\n";
    if (!out) fail_io("render_svg: write failure on " + path);
}

}  // namespace mqc
