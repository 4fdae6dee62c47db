#pragma once

#include <array>
#include <optional>
#include <vector>

#include "blochlab/graph_model.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

using TorusPoint = std::array<double, 2>;
using Polyline = std::vector<TorusPoint>;

struct FermiOptions {
    std::vector<int> resolution{256, 256};
    bool extract_curves = true;
};

struct FermiSection {
    Complex lambda0;
    std::optional<GaussianRational> lambda0_exact;
    std::optional<LaurentPoly> polynomial;  // exact D(z, lambda0) when lambda0 is rational
    NumericPoly numeric_polynomial;         // always set

    // Real section on the torus (d = 2 only). Coordinates lie in [0, 2*pi];
    // polylines are split where they cross the k = 0 / 2*pi seam.
    std::vector<Polyline> curves;
    std::vector<TorusPoint> points;  // isolated zeros (point-like components)
    std::vector<int> resolution;
    double vertex_bound = 0.0;       // per-cell interpolation bound on |D| at curve vertices
    bool low_confidence = false;     // complex lambda0: contour of |D|^2 instead of D
};

class FermiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

FermiSection fermi_section(const OperatorSpec& spec, const GaussianRational& lambda0, const FermiOptions& opts = {});
FermiSection fermi_section(const OperatorSpec& spec, Complex lambda0, const FermiOptions& opts = {});

// max_p (h_p^2 / 8) * sum_terms |c| |n_p|^2: bound on the linear-interpolation
// error of k -> f(exp(ik)) along a grid edge.
double interpolation_bound(const NumericPoly& f, const std::vector<int>& resolution);

// Marching squares on a periodic G0 x G1 sample of a real function, values
// row-major (index i0 * G1 + i1). Exposed for testing.
std::vector<Polyline> periodic_contours(const std::vector<double>& values, int g0, int g1);

// Shift from the internal [0, 2*pi) window to the display window [-pi/2, 3*pi/2).
TorusPoint to_display_window(TorusPoint k);

}  // namespace blochlab
