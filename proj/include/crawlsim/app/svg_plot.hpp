#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace crawlsim::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Shaded time interval drawn behind the curves.
struct Band {
    double t0;
    double t1;
    std::string colour;
    std::string label;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t [s]";
    std::string y_label;
    std::vector<Series> series;
    std::vector<Band> bands;
};

std::string render_svg(const PlotSpec& plot);
void write_svg(const std::filesystem::path& path, const PlotSpec& plot);

}  // namespace crawlsim::app
