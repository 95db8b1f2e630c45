#include "hyperion/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hyperion {

namespace {

constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 55;

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// Round ticks: ~5 divisions at a 1/2/5 step.
std::vector<double> ticks(double lo, double hi) {
    double span = hi - lo;
    if (!(span > 0)) return {lo};
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step)
        t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

}  // namespace

std::string svg_palette(int i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

std::string SvgChart::render() const {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const SvgSeries& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("SvgChart: series length mismatch");
        for (size_t i = 0; i < s.x.size(); ++i) {
            double xv = log_x ? std::log10(s.x[i]) : s.x[i];
            xlo = std::min(xlo, xv);
            xhi = std::max(xhi, xv);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (!(xlo <= xhi)) {  // no data at all
        xlo = 0;
        xhi = 1;
        ylo = 0;
        yhi = 1;
    }
    if (xhi - xlo < 1e-12) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-12) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    double pad = 0.04 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;

    const double pw = width - kMarginLeft - kMarginRight;
    const double ph = height - kMarginTop - kMarginBottom;
    auto px = [&](double v) {
        double t = log_x ? std::log10(v) : v;
        return kMarginLeft + (t - xlo) / (xhi - xlo) * pw;
    };
    auto py = [&](double v) { return kMarginTop + (yhi - v) / (yhi - ylo) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title)
        << "</text>\n";

    // axes box
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xlo, xhi)) {
        double x = kMarginLeft + (t - xlo) / (xhi - xlo) * pw;
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << kMarginTop + ph << "\" x2=\""
            << fmt(x) << "\" y2=\"" << kMarginTop + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << kMarginTop + ph + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << (log_x ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    }
    for (double t : ticks(ylo, yhi)) {
        double y = py(t);
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(y) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(t) << "</text>\n";
    }
    out << "<text x=\"" << kMarginLeft + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kMarginTop + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << kMarginTop + ph / 2 << ")\">"
        << escape(y_label) << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const SvgSeries& s = series[si];
        if (s.line && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i)
                out << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
            out << "\"/>\n";
        }
        if (s.points || s.x.size() == 1)
            for (size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\""
                    << fmt(py(s.y[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        // legend
        double ly = kMarginTop + 14 + 16.0 * si;
        out << "<line x1=\"" << kMarginLeft + pw - 110 << "\" y1=\"" << fmt(ly - 4)
            << "\" x2=\"" << kMarginLeft + pw - 90 << "\" y2=\"" << fmt(ly - 4)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kMarginLeft + pw - 84 << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace hyperion
