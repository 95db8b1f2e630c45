#ifndef HYPERION_SVG_HPP
#define HYPERION_SVG_HPP

#include <string>
#include <vector>

namespace hyperion {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool points = false;  // scatter markers in addition to the polyline
    bool line = true;
};

/// Minimal deterministic line/scatter chart renderer.
struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 480;
    bool log_x = false;
    std::vector<SvgSeries> series;

    std::string render() const;
};

/// Cycled default palette.
std::string svg_palette(int i);

}  // namespace hyperion

#endif
