#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace dioph {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Minimal static SVG line chart (no dependencies). Log axes take log10 of
// the data; callers pass positive values in that case.
inline std::string render_svg_chart(const std::string& title, const std::string& xlabel,
                                    const std::string& ylabel, std::vector<PlotSeries> series,
                                    bool logx = false, bool logy = false) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& s : series)
        for (auto& p : s.points) {
            xmin = std::min(xmin, tx(p.first));
            xmax = std::max(xmax, tx(p.first));
            ymin = std::min(ymin, ty(p.second));
            ymax = std::max(ymax, ty(p.second));
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto X = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };

    const char* colors[] = {"#1f6fb2", "#c44e52", "#55a868", "#8172b2", "#937860"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";
    // Axes.
    svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << (logx ? " (log10)" : "")
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << ylabel << (logy ? " (log10)" : "") << "</text>\n";
    // Min/max tick labels.
    char buf[64];
    auto label = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };
    svg << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" font-size=\"10\">"
        << label(logx ? std::pow(10, xmin) : xmin) << "</text>\n";
    svg << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << label(logx ? std::pow(10, xmax) : xmax)
        << "</text>\n";
    svg << "<text x=\"" << ml - 4 << "\" y=\"" << H - mb << "\" text-anchor=\"end\" font-size=\"10\">"
        << label(logy ? std::pow(10, ymin) : ymin) << "</text>\n";
    svg << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10
        << "\" text-anchor=\"end\" font-size=\"10\">" << label(logy ? std::pow(10, ymax) : ymax)
        << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = colors[si % 5];
        std::sort(series[si].points.begin(), series[si].points.end());
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto& p : series[si].points) svg << X(p.first) << "," << Y(p.second) << " ";
        svg << "\"/>\n";
        for (auto& p : series[si].points)
            svg << "<circle cx=\"" << X(p.first) << "\" cy=\"" << Y(p.second)
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 + 16 * si
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
            << series[si].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace dioph
