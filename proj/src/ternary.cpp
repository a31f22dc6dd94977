#include "compos/ternary.hpp"

#include "compos/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace compos {

namespace {
constexpr double sqrt3_2 = 0.86602540378443864676;
}

TernaryPoint ternary_coords(const Composition& p) {
    if (p.size() != 3) {
        throw Error(ErrorKind::invalid_dimension, "ternary coordinates need exactly three parts");
    }
    return {p[1] + 0.5 * p[2], sqrt3_2 * p[2]};
}

std::vector<Composition> covariate_curve(const std::function<Composition(double)>& model, double lo, double hi,
                                         int samples) {
    if (samples < 2) {
        throw Error(ErrorKind::config, "a curve needs at least two samples");
    }
    std::vector<Composition> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) / (samples - 1);
        out.push_back(model(lo + t * (hi - lo)));
    }
    return out;
}

double curve_min_part(const std::vector<Composition>& curve) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : curve) {
        m = std::min(m, c.parts().minCoeff());
    }
    return m;
}

namespace {

constexpr double width = 520.0;
constexpr double height = 500.0;
constexpr double margin = 50.0;
constexpr double side = width - 2 * margin;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::pair<double, double> to_svg(const TernaryPoint& t) {
    return {margin + side * t.x, height - margin - 40.0 - side * t.y};
}

std::string colour(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255.0 * t));
    const int b = 255 - r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x00%02x", r, b);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
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
            out += ch;
        }
    }
    return out;
}

std::string polyline(const std::vector<Composition>& curve) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto [x, y] = to_svg(ternary_coords(curve[i]));
        pts << (i ? " " : "") << num(x) << ',' << num(y);
    }
    return pts.str();
}

} // namespace

std::string render_ternary_svg(const TernaryPlot& plot) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";

    const auto v0 = to_svg({0.0, 0.0});
    const auto v1 = to_svg({1.0, 0.0});
    const auto v2 = to_svg({0.5, sqrt3_2});
    svg << "<polygon class=\"frame\" points=\"" << num(v0.first) << ',' << num(v0.second) << ' ' << num(v1.first)
        << ',' << num(v1.second) << ' ' << num(v2.first) << ',' << num(v2.second)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    std::vector<std::string> names = plot.part_names;
    names.resize(3);
    svg << "<text x=\"" << num(v0.first) << "\" y=\"" << num(v0.second + 20) << "\" text-anchor=\"middle\">"
        << escape(names[0]) << "</text>\n";
    svg << "<text x=\"" << num(v1.first) << "\" y=\"" << num(v1.second + 20) << "\" text-anchor=\"middle\">"
        << escape(names[1]) << "</text>\n";
    svg << "<text x=\"" << num(v2.first) << "\" y=\"" << num(v2.second - 10) << "\" text-anchor=\"middle\">"
        << escape(names[2]) << "</text>\n";

    double lo = 0.0;
    double hi = 0.0;
    const bool coloured = !plot.point_covariate.empty();
    if (coloured) {
        if (plot.point_covariate.size() != plot.points.size()) {
            throw Error(ErrorKind::invalid_dimension, "one covariate value per point is required");
        }
        const auto [mn, mx] = std::minmax_element(plot.point_covariate.begin(), plot.point_covariate.end());
        lo = *mn;
        hi = *mx;
    }
    for (std::size_t i = 0; i < plot.points.size(); ++i) {
        const auto [x, y] = to_svg(ternary_coords(plot.points[i]));
        const double t = (coloured && hi > lo) ? (plot.point_covariate[i] - lo) / (hi - lo) : 0.0;
        svg << "<circle class=\"point\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3.5\" fill=\""
            << (coloured ? colour(t) : std::string("#000000")) << "\"/>\n";
    }

    if (!plot.ql_curve.empty()) {
        svg << "<polyline class=\"ql-curve\" points=\"" << polyline(plot.ql_curve)
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    if (!plot.logratio_curve.empty()) {
        svg << "<polyline class=\"logratio-curve\" points=\"" << polyline(plot.logratio_curve)
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"8,5\"/>\n";
    }

    // legend
    double ly = height - 40.0;
    const double lx = margin;
    if (!plot.ql_curve.empty()) {
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 30) << "\" y2=\"" << num(ly)
            << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(lx + 36) << "\" y=\"" << num(ly + 4) << "\">compositional logit (quasi-likelihood)</text>\n";
        ly += 16.0;
    }
    if (!plot.logratio_curve.empty()) {
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 30) << "\" y2=\"" << num(ly)
            << "\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"8,5\"/>\n";
        svg << "<text x=\"" << num(lx + 36) << "\" y=\"" << num(ly + 4) << "\">log-ratio linear model</text>\n";
        ly += 16.0;
    }
    if (coloured) {
        svg << "<text x=\"" << num(width - margin) << "\" y=\"" << num(height - 36.0) << "\" text-anchor=\"end\">"
            << "<tspan fill=\"#0000ff\">low</tspan> to <tspan fill=\"#ff0000\">high</tspan> "
            << escape(plot.covariate_label) << "</text>\n";
    }
    if (!plot.note.empty()) {
        svg << "<text class=\"note\" x=\"" << num(lx) << "\" y=\"" << num(ly + 4) << "\">" << escape(plot.note)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace compos
