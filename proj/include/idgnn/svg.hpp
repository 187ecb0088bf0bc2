#pragma once

// Minimal native SVG line plots for metric curves; no plotting dependency.

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "idgnn/train.hpp"

namespace idgnn {

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<std::pair<double, double>> points;  // (x, y)
};

struct SvgPlotOptions {
    double width = 640, height = 400, margin = 50;
    std::string title, x_label = "epoch", y_label = "value";
    double y_min = 0.0, y_max = 1.0;
    bool auto_y = true;
};

inline void write_svg_plot(const std::vector<Series>& series, const SvgPlotOptions& opt,
                           const std::string& path) {
    double xmin = 0, xmax = 1, ymin = opt.y_min, ymax = opt.y_max;
    bool any = false;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!any) {
                xmin = xmax = x;
                if (opt.auto_y) ymin = ymax = y;
                any = true;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            if (opt.auto_y) {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pw = opt.width - 2 * opt.margin, ph = opt.height - 2 * opt.margin;
    auto px = [&](double x) { return opt.margin + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return opt.height - opt.margin - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << opt.width << "' height='"
        << opt.height << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << opt.margin << "' y1='" << opt.height - opt.margin << "' x2='"
        << opt.width - opt.margin << "' y2='" << opt.height - opt.margin
        << "' stroke='black'/>\n";
    svg << "<line x1='" << opt.margin << "' y1='" << opt.margin << "' x2='" << opt.margin
        << "' y2='" << opt.height - opt.margin << "' stroke='black'/>\n";
    svg << "<text x='" << opt.width / 2 << "' y='20' text-anchor='middle' font-size='14'>"
        << opt.title << "</text>\n";
    svg << "<text x='" << opt.width / 2 << "' y='" << opt.height - 8
        << "' text-anchor='middle' font-size='12'>" << opt.x_label << "</text>\n";
    svg << "<text x='14' y='" << opt.height / 2 << "' font-size='12' transform='rotate(-90 14 "
        << opt.height / 2 << ")' text-anchor='middle'>" << opt.y_label << "</text>\n";
    // axis extent labels
    svg << "<text x='" << opt.margin << "' y='" << opt.height - opt.margin + 16
        << "' font-size='10'>" << xmin << "</text>\n";
    svg << "<text x='" << opt.width - opt.margin << "' y='" << opt.height - opt.margin + 16
        << "' text-anchor='end' font-size='10'>" << xmax << "</text>\n";
    svg << "<text x='" << opt.margin - 4 << "' y='" << opt.height - opt.margin
        << "' text-anchor='end' font-size='10'>" << ymin << "</text>\n";
    svg << "<text x='" << opt.margin - 4 << "' y='" << opt.margin + 4
        << "' text-anchor='end' font-size='10'>" << ymax << "</text>\n";

    double legend_y = opt.margin;
    for (const auto& s : series) {
        if (!s.points.empty()) {
            svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (auto [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
            svg << "'/>\n";
        }
        svg << "<line x1='" << opt.width - opt.margin - 130 << "' y1='" << legend_y << "' x2='"
            << opt.width - opt.margin - 110 << "' y2='" << legend_y << "' stroke='" << s.color
            << "' stroke-width='2'/>\n";
        svg << "<text x='" << opt.width - opt.margin - 104 << "' y='" << legend_y + 4
            << "' font-size='11'>" << s.label << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << svg.str();
}

inline std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<MetricsRow> rows;
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ss(line);
        MetricsRow r;
        char comma;
        std::string split;
        ss >> r.epoch >> comma;
        std::getline(ss, split, ',');
        r.split = split;
        ss >> r.task_metric >> comma >> r.invariance_ratio >> comma >> r.K >> comma >> r.seed;
        if (ss.fail()) throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace idgnn
