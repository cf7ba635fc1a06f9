#include "plap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plap {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<double> nice_ticks(double lo, double hi, bool log_scale) {
    std::vector<double> ticks;
    if (log_scale) {
        const int e0 = static_cast<int>(std::floor(lo));
        const int e1 = static_cast<int>(std::ceil(hi));
        for (int e = e0; e <= e1; ++e) ticks.push_back(static_cast<double>(e));
        return ticks;
    }
    const double span = hi - lo;
    if (span <= 0.0) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-12 * span; t += step) ticks.push_back(t);
    return ticks;
}

}  // namespace

void render_plot(const std::vector<Series>& series, const PlotStyle& style,
                 const std::string& path) {
    if (series.empty()) throw std::invalid_argument("render_plot: no series");
    for (const Series& s : series)
        if (s.points.empty()) throw std::invalid_argument("render_plot: empty series " + s.name);

    auto tx = [&](double v) { return style.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return style.logy ? std::log10(v) : v; };

    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const Series& s : series)
        for (const auto& [x, y] : s.points) {
            if (style.logx && !(x > 0.0))
                throw std::invalid_argument("render_plot: nonpositive x on log axis");
            if (style.logy && !(y > 0.0))
                throw std::invalid_argument("render_plot: nonpositive y on log axis");
            xlo = std::min(xlo, tx(x));
            xhi = std::max(xhi, tx(x));
            ylo = std::min(ylo, ty(y));
            yhi = std::max(yhi, ty(y));
        }
    if (xhi == xlo) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi == ylo) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const double xpad = 0.04 * (xhi - xlo), ypad = 0.06 * (yhi - ylo);
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;

    const int W = style.width, H = style.height;
    const int ml = 72, mr = 24, mt = 40, mb = 52;
    auto px = [&](double v) { return ml + (tx(v) - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (ty(v) - ylo) / (yhi - ylo) * (H - mt - mb); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("render_plot: cannot open " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    // axes
    out << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n"
        << "<line x1=\"" << ml << "\" y1=\"" << (H - mb) << "\" x2=\"" << (W - mr) << "\" y2=\""
        << (H - mb) << "\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << (H - mb)
        << "\"/>\n</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double t : nice_ticks(xlo, xhi, style.logx)) {
        if (t < xlo || t > xhi) continue;
        const double X = ml + (t - xlo) / (xhi - xlo) * (W - ml - mr);
        out << "<line x1=\"" << fmt(X) << "\" y1=\"" << (H - mb) << "\" x2=\"" << fmt(X)
            << "\" y2=\"" << (H - mb + 5) << "\" stroke=\"#333333\"/>\n";
        const std::string label = style.logx ? ("1e" + fmt(t)) : fmt(t);
        out << "<text x=\"" << fmt(X) << "\" y=\"" << (H - mb + 18)
            << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    for (double t : nice_ticks(ylo, yhi, style.logy)) {
        if (t < ylo || t > yhi) continue;
        const double Y = H - mb - (t - ylo) / (yhi - ylo) * (H - mt - mb);
        out << "<line x1=\"" << (ml - 5) << "\" y1=\"" << fmt(Y) << "\" x2=\"" << ml << "\" y2=\""
            << fmt(Y) << "\" stroke=\"#333333\"/>\n";
        const std::string label = style.logy ? ("1e" + fmt(t)) : fmt(t);
        out << "<text x=\"" << (ml - 8) << "\" y=\"" << fmt(Y + 4)
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    out << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 12)
        << "\" text-anchor=\"middle\">" << xml_escape(style.xlabel) << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + (H - mt - mb) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + (H - mt - mb) / 2)
        << ")\">" << xml_escape(style.ylabel) << "</text>\n";
    out << "<text x=\"" << (W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(style.title) << "</text>\n</g>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[si].points) out << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        out << "\"/>\n";
    }

    // legend
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        const int Y = mt + 8 + static_cast<int>(si) * 16;
        out << "<line x1=\"" << (W - mr - 120) << "\" y1=\"" << Y << "\" x2=\"" << (W - mr - 96)
            << "\" y2=\"" << Y << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n"
            << "<text x=\"" << (W - mr - 90) << "\" y=\"" << (Y + 4) << "\">"
            << xml_escape(series[si].name) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

}  // namespace plap
