#include "vortctl/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vortctl {

namespace {

// Compact diverging-ish ramp: blue - white - red over [0, 1].
void ramp(double s, int& r, int& g, int& b) {
    s = std::clamp(s, 0.0, 1.0);
    if (s < 0.5) {
        const double u = s / 0.5;
        r = static_cast<int>(30 + 225 * u);
        g = static_cast<int>(60 + 195 * u);
        b = 255;
    } else {
        const double u = (s - 0.5) / 0.5;
        r = 255;
        g = static_cast<int>(255 - 195 * u);
        b = static_cast<int>(255 - 225 * u);
    }
}

}  // namespace

std::string field_svg(const ScalarField& field, int width_px) {
    if (field.mesh == nullptr || field.values.size() != field.mesh->node_count())
        throw std::invalid_argument("field_svg: field/mesh size mismatch");
    const Mesh& mesh = *field.mesh;
    const Vector& values = field.values;
    double xmin = mesh.nodes[0].x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
    for (const Vec2& p : mesh.nodes) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span_x = std::max(xmax - xmin, 1e-12);
    const double span_y = std::max(ymax - ymin, 1e-12);
    const double scale = width_px / span_x;
    const int height_px = static_cast<int>(std::ceil(span_y * scale)) + 24;

    double vmin = values.minCoeff(), vmax = values.maxCoeff();
    if (vmax - vmin < 1e-300) vmax = vmin + 1.0;

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n",
                  width_px, height_px);
    out += buf;
    auto px = [&](Vec2 p) {
        // y up in model coordinates, y down in SVG
        return Vec2{(p.x - xmin) * scale, (ymax - p.y) * scale};
    };
    for (const Tri& t : mesh.triangles) {
        const Vec2 a = px(mesh.nodes[t.v[0]]), b = px(mesh.nodes[t.v[1]]), c = px(mesh.nodes[t.v[2]]);
        const double mean = (values[t.v[0]] + values[t.v[1]] + values[t.v[2]]) / 3.0;
        int r, g, bb;
        ramp((mean - vmin) / (vmax - vmin), r, g, bb);
        std::snprintf(buf, sizeof buf,
                      "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"rgb(%d,%d,%d)\" "
                      "stroke=\"none\"/>\n",
                      a.x, a.y, b.x, b.y, c.x, c.y, r, g, bb);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"4\" y=\"%d\" font-size=\"12\" font-family=\"monospace\">min %.6g  "
                  "max %.6g</text>\n</svg>\n",
                  height_px - 6, vmin, vmax);
    out += buf;
    return out;
}

}  // namespace vortctl
