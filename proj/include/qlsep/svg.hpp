#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qlsep/io.hpp"

namespace qlsep {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Standalone SVG line chart with the source data embedded as a table in a
// <desc> block. No interactivity; consumers are batch users.
inline std::string svg_line_chart(const std::string &title, const std::string &x_label,
                                  const std::string &y_label,
                                  const std::vector<PlotSeries> &series) {
    const double width = 640.0;
    const double height = 420.0;
    const double ml = 70.0;
    const double mr = 30.0;
    const double mt = 50.0;
    const double mb = 60.0;

    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;
    bool first = true;
    for (const auto &s : series) {
        for (const auto &[x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax == xmin) {
        xmax = xmin + 1.0;
    }
    if (ymax == ymin) {
        ymax = ymin + 1.0;
    }
    // A little headroom so lines do not sit on the frame.
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<desc>data table\nseries,x,y\n";
    for (const auto &s : series) {
        for (const auto &[x, y] : s.points) {
            svg << s.name << ',' << fmt_double(x) << ',' << fmt_double(y) << '\n';
        }
    }
    svg << "</desc>\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";

    // Frame and ticks.
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (width - ml - mr)
        << "\" height=\"" << (height - mt - mb)
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        svg << "<text x=\"" << px(fx) << "\" y=\"" << (height - mb + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt_double(std::round(fx * 1000.0) / 1000.0) << "</text>\n";
        svg << "<text x=\"" << (ml - 8) << "\" y=\"" << (py(fy) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt_double(std::round(fy * 1000.0) / 1000.0) << "</text>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << (width - mr)
            << "\" y2=\"" << py(fy) << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << (height - 16)
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 18 " << height / 2 << ")\">" << y_label << "</text>\n";

    std::size_t color = 0;
    double legend_y = mt + 16.0;
    for (const auto &s : series) {
        const char *stroke = palette[color % 7];
        ++color;
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        for (const auto &[x, y] : s.points) {
            svg << px(x) << ',' << py(y) << ' ';
        }
        svg << "\"/>\n";
        for (const auto &[x, y] : s.points) {
            svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
                << stroke << "\"/>\n";
        }
        svg << "<rect x=\"" << (width - mr - 170) << "\" y=\"" << (legend_y - 9)
            << "\" width=\"12\" height=\"12\" fill=\"" << stroke << "\"/>\n";
        svg << "<text x=\"" << (width - mr - 152) << "\" y=\"" << (legend_y + 2)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.name << "</text>\n";
        legend_y += 18.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace qlsep
