#ifndef COMPOS_TERNARY_HPP
#define COMPOS_TERNARY_HPP

#include "compos/logratio.hpp"
#include "compos/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace compos {

/// Plane coordinates in the triangle (0,0), (1,0), (1/2, sqrt(3)/2).
struct TernaryPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Vertex k carries part k: x = p2 + p3/2, y = (sqrt(3)/2) p3.
/// Throws `invalid_dimension` unless D = 3.
TernaryPoint ternary_coords(const Composition& p);

/// Samples `model` at `samples` equally spaced covariate values over [lo, hi].
std::vector<Composition> covariate_curve(const std::function<Composition(double)>& model, double lo, double hi,
                                         int samples);

/// Minimum over the curve of the smallest part.
double curve_min_part(const std::vector<Composition>& curve);

struct TernaryPlot {
    std::vector<Composition> points;
    std::vector<double> point_covariate;     ///< colors points blue (min) to red (max); may be empty
    std::vector<std::string> part_names;     ///< three vertex labels
    std::string covariate_label;
    std::vector<Composition> ql_curve;       ///< solid; empty to omit
    std::vector<Composition> logratio_curve; ///< dashed; empty to omit
    std::string note;                        ///< extra legend line, e.g. why a curve is missing
};

/// Deterministic SVG document.
std::string render_ternary_svg(const TernaryPlot& plot);

} // namespace compos

#endif
