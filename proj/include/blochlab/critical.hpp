#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blochlab/floquet.hpp"
#include "blochlab/spectrum.hpp"

namespace blochlab {

// [D, z_1 dD/dz_1, ..., z_d dD/dz_d].
std::vector<LaurentPoly> cpe_system(const LaurentPoly& d);
// One "name = polynomial" line per equation, plus a header naming the variables.
std::string cpe_text(const LaurentPoly& d);

enum class CriticalKind { Minimum, Maximum, Saddle, DegenerateHessian, BandCrossing };
std::string to_string(CriticalKind k);

struct CriticalPoint {
    std::vector<double> k;  // in [0, 2*pi)^d
    std::size_t band = 0;   // lowest band index involved
    double energy = 0.0;
    double gradient_norm = 0.0;
    Eigen::MatrixXd hessian;
    CriticalKind kind = CriticalKind::Minimum;
    bool isolated = true;
    int multiplicity = 1;  // bands meeting at a crossing (kernel dimension); 1 otherwise
    double gap = 0.0;      // distance to the nearest other eigenvalue
};

struct CriticalOptions {
    double refine_tol = 1e-10;   // on |grad lambda_j|
    double cluster_tol = 1e-6;   // torus distance for merging
    double gap_tol = 1e-6;       // relative to the spectral width
    double hess_tol = 1e-6;      // relative to the spectral width, on min |Hessian eigenvalue|
    double match_tol = 1e-8;     // relative to the spectral width, for edge matching
    std::size_t chain_length = 8;
    int max_iterations = 100;
};

struct SeedFailure {
    std::vector<double> seed;
    std::size_t band = 0;
    std::string reason;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    std::vector<SeedFailure> failures;
    std::size_t seeds = 0;
    double spectral_width = 0.0;
    CriticalOptions options;

    std::size_t isolated_count() const;  // isolated points, crossings excluded
    std::size_t crossing_count() const;
};

// Band value, perturbation gradient and Hessian of lambda_j at k (simple eigenvalue assumed).
struct BandJet {
    double energy = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
    double gap = 0.0;
};
BandJet band_jet(const BlochSymbol& sym, std::span<const double> k, std::size_t band);

class CriticalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CriticalSearch find_critical_points(const OperatorSpec& spec, const BandGrid& grid, const CriticalOptions& opts = {});

// Band endpoints widened to include the critical energies found.
SpectralReport refine_report(SpectralReport report, const CriticalSearch& search);

enum class EdgeVerdict { NondegenerateUnique, NondegenerateMultiple, Degenerate, Unresolved };
std::string to_string(EdgeVerdict v);

struct EdgeAttainment {
    std::size_t point = 0;  // index into CriticalSearch::points
    bool nondegenerate = false;
};

struct EdgeAudit {
    std::size_t band = 0;
    bool upper = false;  // band maximum (true) or minimum (false)
    double energy = 0.0;
    std::vector<EdgeAttainment> attained;
    int multiplicity = 0;
    EdgeVerdict verdict = EdgeVerdict::Unresolved;
};

std::vector<EdgeAudit> spectral_edge_report(const CriticalSearch& search, const SpectralReport& report);

}  // namespace blochlab
