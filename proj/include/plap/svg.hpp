#pragma once

#include <string>
#include <utility>
#include <vector>

namespace plap {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct PlotStyle {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
    int width = 800;
    int height = 520;
};

/// Standalone SVG 1.1 line plot with axes, tick labels and a legend.
/// Output is byte-stable for identical input.
void render_plot(const std::vector<Series>& series, const PlotStyle& style,
                 const std::string& path);

}  // namespace plap
