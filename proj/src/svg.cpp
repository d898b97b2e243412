#include "ermakov/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ermakov/csv.hpp"
#include "ermakov/errors.hpp"

namespace ermakov {

void write_svg_polylines(const std::string& path, const std::vector<SvgSeries>& series,
                         const std::string& title, int width, int height) {
    if (series.empty()) throw Error("svg: nothing to plot");

    double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.size() < 2)
            throw Error("svg: series needs matching x/y arrays with at least 2 points");
        for (double v : s.x) {
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (double v : s.y) {
            ylo = std::min(ylo, v);
            yhi = std::max(yhi, v);
        }
    }
    if (!(xhi > xlo)) xhi = xlo + 1.0;
    if (!(yhi > ylo)) yhi = ylo + 1.0;

    const double margin = 0.05;
    const double px0 = margin * width, px1 = (1.0 - margin) * width;
    const double py0 = (1.0 - margin) * height, py1 = margin * height; // y grows upward
    const auto sx = [&](double x) { return px0 + (x - xlo) / (xhi - xlo) * (px1 - px0); };
    const auto sy = [&](double y) { return py0 + (y - ylo) / (yhi - ylo) * (py1 - py0); };

    std::ofstream out(path);
    if (!out) throw Error("svg: cannot write '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "  <title>" << title << "</title>\n";
    out << "  <rect x=\"" << px0 << "\" y=\"" << py1 << "\" width=\"" << (px1 - px0)
        << "\" height=\"" << (py0 - py1) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const auto& s : series) {
        out << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << format_double(sx(s.x[i])) << ',' << format_double(sy(s.y[i]));
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace ermakov
