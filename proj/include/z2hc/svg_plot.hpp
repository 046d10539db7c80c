#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "z2hc/errors.hpp"
#include "z2hc/schedule.hpp"

namespace z2hc {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool line = false; // false: markers only
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 760;
    int height = 520;
};

namespace detail {

inline std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Tick spacing of the form {1,2,5}*10^k giving roughly the requested count.
inline double nice_tick_step(double span, int target) {
    double raw = span / std::max(target, 1);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double frac = raw / mag;
    double nice = frac <= 1.0 ? 1.0 : frac <= 2.0 ? 2.0 : frac <= 5.0 ? 5.0 : 10.0;
    return nice * mag;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace detail

// Self-contained SVG 1.1 scatter/line plot. Output bytes are a pure function
// of the spec: fixed palette, %.6g coordinates, no timestamps.
inline std::string render_svg(const PlotSpec& spec) {
    using detail::fmt6;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const int n_colors = 8;
    const double ml = 72, mr = 24, mt = 46, mb = 58;
    double pw = spec.width - ml - mr, ph = spec.height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool have = false;
    for (const Series& s : spec.series) {
        if (s.x.size() != s.y.size()) throw invalid_argument("plot series size mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!have) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                have = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (!have) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    if (ymax == ymin) {
        ymin -= 1;
        ymax += 1;
    }
    double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
           "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " + std::to_string(spec.height) +
           "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt6(spec.width / 2.0) +
           "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
           detail::xml_escape(spec.title) + "</text>\n";

    // Axes box.
    svg += "<rect x=\"" + fmt6(ml) + "\" y=\"" + fmt6(mt) + "\" width=\"" + fmt6(pw) +
           "\" height=\"" + fmt6(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";

    double xstep = detail::nice_tick_step(xmax - xmin, 6);
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12 * xstep; t += xstep) {
        double X = px(t);
        svg += "<line x1=\"" + fmt6(X) + "\" y1=\"" + fmt6(mt + ph) + "\" x2=\"" + fmt6(X) +
               "\" y2=\"" + fmt6(mt + ph + 5) + "\" stroke=\"#333333\"/>\n";
        svg += "<line x1=\"" + fmt6(X) + "\" y1=\"" + fmt6(mt) + "\" x2=\"" + fmt6(X) +
               "\" y2=\"" + fmt6(mt + ph) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + fmt6(X) + "\" y=\"" + fmt6(mt + ph + 19) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               fmt6(std::abs(t) < 1e-12 * xstep ? 0.0 : t) + "</text>\n";
    }
    double ystep = detail::nice_tick_step(ymax - ymin, 6);
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-12 * ystep; t += ystep) {
        double Y = py(t);
        svg += "<line x1=\"" + fmt6(ml - 5) + "\" y1=\"" + fmt6(Y) + "\" x2=\"" + fmt6(ml) +
               "\" y2=\"" + fmt6(Y) + "\" stroke=\"#333333\"/>\n";
        svg += "<line x1=\"" + fmt6(ml) + "\" y1=\"" + fmt6(Y) + "\" x2=\"" + fmt6(ml + pw) +
               "\" y2=\"" + fmt6(Y) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + fmt6(ml - 8) + "\" y=\"" + fmt6(Y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               fmt6(std::abs(t) < 1e-12 * ystep ? 0.0 : t) + "</text>\n";
    }
    svg += "<text x=\"" + fmt6(ml + pw / 2) + "\" y=\"" + fmt6(spec.height - 14.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
           detail::xml_escape(spec.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt6(mt + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fmt6(mt + ph / 2) + ")\">" + detail::xml_escape(spec.y_label) + "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const Series& s = spec.series[si];
        const char* color = palette[si % n_colors];
        if (s.line) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                pts += fmt6(px(s.x[i])) + "," + fmt6(py(s.y[i])) + " ";
            }
            if (!pts.empty()) pts.pop_back();
            svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + fmt6(px(s.x[i])) + "\" cy=\"" + fmt6(py(s.y[i])) +
                       "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.8\"/>\n";
            }
        }
        if (spec.series.size() > 1) {
            double ly = mt + 16.0 + 16.0 * si;
            svg += "<line x1=\"" + fmt6(ml + pw - 130) + "\" y1=\"" + fmt6(ly - 4) + "\" x2=\"" +
                   fmt6(ml + pw - 112) + "\" y2=\"" + fmt6(ly - 4) + "\" stroke=\"" + color +
                   "\" stroke-width=\"3\"/>\n";
            svg += "<text x=\"" + fmt6(ml + pw - 106) + "\" y=\"" + fmt6(ly) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(s.label) +
                   "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

// Writes the SVG and a companion CSV of the plotted points (same path with
// .points.csv suffix) so every figure can be re-analyzed without parsing SVG.
// The distinct suffix keeps the companion from clobbering a user CSV that
// shares the figure's stem.
inline void write_plot(const std::string& svg_path, const PlotSpec& spec) {
    if (svg_path.size() < 4 || svg_path.substr(svg_path.size() - 4) != ".svg")
        throw invalid_argument("plot path must end in .svg");
    {
        std::ofstream out(svg_path, std::ios::binary);
        if (!out) throw resource_error("cannot write " + svg_path);
        out << render_svg(spec);
    }
    std::string csv_path = svg_path.substr(0, svg_path.size() - 4) + ".points.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw resource_error("cannot write " + csv_path);
    csv << "series,x,y\n";
    for (const Series& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            csv << s.label << ',' << fmt17(s.x[i]) << ',' << fmt17(s.y[i]) << '\n';
}

} // namespace z2hc
