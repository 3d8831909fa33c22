#include "wormlab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace wormlab::svg {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// y flipped so the unit square reads the usual way up.
double flip(double y) { return 1.0 - y; }

}  // namespace

std::string generation_svg(const graphs::Generation& g) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 1 1\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#ffffff\" stroke=\"#000000\" "
           "stroke-width=\"0.002\"/>\n";
    for (const auto& c : g.cells) {
        const double x0 = to_double(c.x0);
        const double x1 = to_double(c.x0 + c.width);
        const double yl = to_double(c.y0);
        const double yr = to_double(c.bottom_at(c.x0 + c.width));
        const double h = to_double(c.height);
        const char* fill = c.flag == graphs::CellFlag::normal ? "#4477aa" : "#ee6677";
        out << "<polygon points=\"" << fmt(x0) << "," << fmt(flip(yl)) << " " << fmt(x1) << ","
            << fmt(flip(yr)) << " " << fmt(x1) << "," << fmt(flip(yr + h)) << " " << fmt(x0) << ","
            << fmt(flip(yl + h)) << "\" fill=\"" << fill
            << "\" stroke=\"#223344\" stroke-width=\"0.0005\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string density_heatmap_svg(const modulus::GridDensity& rho, const modulus::CurveFamily* fam) {
    const int n = rho.grid.n;
    double vmax = 0.0;
    for (double v : rho.values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 1 1\">\n";
    const double cell = 1.0 / n;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double v = rho.at(ix, iy) / vmax;
            if (v <= 0.0) continue;
            const int r = 255;
            const int gb = static_cast<int>(255.0 * (1.0 - v));
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", r, gb, gb);
            out << "<rect x=\"" << fmt(ix * cell) << "\" y=\"" << fmt(flip((iy + 1) * cell))
                << "\" width=\"" << fmt(cell) << "\" height=\"" << fmt(cell) << "\" fill=\"" << color
                << "\"/>\n";
        }
    }
    out << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"none\" stroke=\"#000000\" "
           "stroke-width=\"0.002\"/>\n";
    if (fam != nullptr) {
        for (const auto& c : fam->curves) {
            out << "<polyline points=\"";
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (i) out << " ";
                out << fmt(c[i].x) << "," << fmt(flip(c[i].y));
            }
            out << "\" fill=\"none\" stroke=\"#2255cc\" stroke-width=\"0.0015\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace wormlab::svg
