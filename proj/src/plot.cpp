#include "salodom/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "salodom/error.hpp"

namespace salodom {

namespace {

constexpr const char* kPalette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr int kMargin = 60;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00" so snapshots do not depend on the sign of tiny values.
    if (std::string(buf) == "-0.00") return "0.00";
    return buf;
}

std::string tick_label(double v, double step) {
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < 0.5 * step * 1e-6 ? 0.0 : v);
    return buf;
}

// 1-2-5 step giving roughly `target` intervals over `range`.
double nice_step(double range, int target) {
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_trajectory_svg(std::span<const NamedTrajectory> trajectories, const PlotOptions& options) {
    if (trajectories.empty()) fail(ErrorCode::InvalidArgument, "nothing to plot");
    if (options.width <= 2 * kMargin || options.height <= 2 * kMargin) {
        fail(ErrorCode::InvalidArgument, "plot is too small");
    }

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double zmin = xmin, zmax = -xmin;
    for (const auto& t : trajectories) {
        if (t.trajectory == nullptr || t.trajectory->size() == 0) {
            fail(ErrorCode::InvalidArgument, "trajectory '" + t.name + "' is empty");
        }
        for (const auto& pose : t.trajectory->poses) {
            xmin = std::min(xmin, pose.translation().x());
            xmax = std::max(xmax, pose.translation().x());
            zmin = std::min(zmin, pose.translation().z());
            zmax = std::max(zmax, pose.translation().z());
        }
    }
    // Equal aspect: expand the shorter side around its center.
    double span = std::max({xmax - xmin, zmax - zmin, 1.0});
    span *= 1.05;
    const double xc = 0.5 * (xmin + xmax), zc = 0.5 * (zmin + zmax);
    xmin = xc - 0.5 * span;
    xmax = xc + 0.5 * span;
    zmin = zc - 0.5 * span;
    zmax = zc + 0.5 * span;

    const double plot_w = options.width - 2 * kMargin;
    const double plot_h = options.height - 2 * kMargin;
    const double scale = std::min(plot_w, plot_h) / span;
    auto sx = [&](double x) { return kMargin + (x - xmin) * scale; };
    auto sy = [&](double z) { return kMargin + (zmax - z) * scale; };
    const double left = kMargin, right = kMargin + span * scale;
    const double top = kMargin, bottom = kMargin + span * scale;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
           std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
           std::to_string(options.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!options.title.empty()) {
        svg += "<text x=\"" + num(0.5 * options.width) + "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" +
               escape(options.title) + "</text>\n";
    }
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
           num(bottom - top) + "\" fill=\"none\" stroke=\"#444444\"/>\n";

    const double step = nice_step(span, 6);
    svg += "<g font-size=\"11\" fill=\"#444444\" stroke=\"#444444\">\n";
    for (long k = std::lround(std::ceil(xmin / step)); k <= std::lround(std::floor(xmax / step)); ++k) {
        const double v = static_cast<double>(k) * step;
        const double px = sx(v);
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(px) + "\" y2=\"" +
               num(bottom + 6) + "\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(bottom + 20) + "\" text-anchor=\"middle\" stroke=\"none\">" +
               tick_label(v, step) + "</text>\n";
    }
    for (long k = std::lround(std::ceil(zmin / step)); k <= std::lround(std::floor(zmax / step)); ++k) {
        const double v = static_cast<double>(k) * step;
        const double py = sy(v);
        svg += "<line x1=\"" + num(left - 6) + "\" y1=\"" + num(py) + "\" x2=\"" + num(left) + "\" y2=\"" + num(py) +
               "\"/>\n";
        svg += "<text x=\"" + num(left - 9) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\" stroke=\"none\">" +
               tick_label(v, step) + "</text>\n";
    }
    svg += "</g>\n";
    svg += "<text x=\"" + num(0.5 * (left + right)) + "\" y=\"" + num(bottom + 42) +
           "\" text-anchor=\"middle\" font-size=\"13\">x [m]</text>\n";
    svg += "<text x=\"18\" y=\"" + num(0.5 * (top + bottom)) + "\" text-anchor=\"middle\" font-size=\"13\" " +
           "transform=\"rotate(-90 18 " + num(0.5 * (top + bottom)) + ")\">z [m]</text>\n";

    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        const auto& poses = trajectories[i].trajectory->poses;
        for (std::size_t k = 0; k < poses.size(); ++k) {
            if (k) svg += ' ';
            svg += num(sx(poses[k].translation().x())) + "," + num(sy(poses[k].translation().z()));
        }
        svg += "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(i);
        svg += "<line x1=\"" + num(left + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(left + 34) + "\" y2=\"" +
               num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(left + 40) + "\" y=\"" + num(ly) + "\" font-size=\"12\">" +
               escape(trajectories[i].name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace salodom
