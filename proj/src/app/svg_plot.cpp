#include "crawlsim/app/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace crawlsim::app {

namespace {

constexpr double kWidth = 800, kHeight = 450;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 < x1)) { x0 = 0.0; x1 = 1.0; }
    if (!(y0 < y1)) {
        const double mid = std::isfinite(y0) ? y0 : 0.0;
        y0 = mid - 1.0;
        y1 = mid + 1.0;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& b : plot.bands) {
        const double a = sx(std::clamp(b.t0, x0, x1)), c = sx(std::clamp(b.t1, x0, x1));
        o << "<rect x=\"" << num(a) << "\" y=\"" << num(kTop) << "\" width=\"" << num(c - a)
          << "\" height=\"" << num(ph) << "\" fill=\"" << b.colour << "\" fill-opacity=\"0.25\"/>\n";
    }
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
        o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 18)
          << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(yv) + 4)
          << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(plot.title) << "</text>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& ser = plot.series[s];
        const char* colour = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
            if (!std::isfinite(ser.y[i])) continue;
            o << num(sx(ser.x[i])) << ',' << num(sy(ser.y[i])) << ' ';
        }
        o << "\"/>\n";
        const double ly = kTop + 16.0 * (s + 1);
        o << "<line x1=\"" << num(kLeft + pw + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
          << num(kLeft + pw + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
          << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(kLeft + pw + 35) << "\" y=\"" << num(ly) << "\">"
          << escape(ser.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& plot) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render_svg(plot);
}

}  // namespace crawlsim::app
