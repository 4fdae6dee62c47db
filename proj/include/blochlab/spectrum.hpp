#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blochlab/floquet.hpp"
#include "blochlab/graph_model.hpp"
#include "blochlab/univariate.hpp"

namespace blochlab {

class SpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigenvalues of A(exp(ik)) on the uniform grid k = 2*pi*m/G, m_i in [0, G_i).
// Points are ordered row-major (last axis fastest); band index is the
// position in the ascending eigenvalue list.
struct BandGrid {
    std::vector<int> resolution;
    std::size_t bands = 0;
    std::vector<double> energies;  // energies[point * bands + j]
    std::vector<double> gaps;      // min adjacent separation per point (+inf when bands == 1)

    int dimension() const { return static_cast<int>(resolution.size()); }
    std::size_t point_count() const { return gaps.size(); }
    double energy(std::size_t point, std::size_t band) const { return energies[point * bands + band]; }
    std::vector<int> index_of(std::size_t point) const;
    // Periodic wrap applied to each index component.
    std::size_t point_at(std::span<const int> index) const;
    std::vector<double> k_of(std::size_t point) const;
    double min_energy() const;
    double max_energy() const;
};

BandGrid band_grid(const OperatorSpec& spec, std::vector<int> resolution);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

// Sorted, disjoint, merged.
std::vector<Interval> merge_intervals(std::vector<Interval> intervals);

struct FlatBand {
    Complex energy;
    std::optional<GaussianRational> exact;  // rational root verified by substitution
    int multiplicity = 1;                    // power of (lambda - energy) in F(lambda)
    std::vector<std::size_t> grid_bands;     // band indices constant at energy to 1e-12
    bool exact_flag() const { return exact.has_value(); }
};

struct SpectralReport {
    std::vector<int> resolution;
    std::vector<Interval> bands;
    std::vector<Interval> spectrum;  // union of the band intervals
    std::vector<FlatBand> flat_bands;
    bool refined = false;            // endpoints updated from critical points
};

SpectralReport spectral_report(const BandGrid& grid, const OperatorSpec& spec);

struct EigenvalueCertificate {
    bool is_eigenvalue = false;
    LaurentPoly residual;  // D(z, lambda0); zero exactly when is_eigenvalue
    int multiplicity = 0;  // power of (lambda - lambda0) dividing F(lambda)
};

EigenvalueCertificate eigenvalue_test(const OperatorSpec& spec, const GaussianRational& lambda0);

// Multiplicity of (t - root) in p.
int root_multiplicity(const UniPoly& p, const GaussianRational& root);

enum class DosMethod {
    Linear,     // band energies interpolated linearly on grid simplices (d <= 2)
    Histogram,  // raw point histogram, each eigenvalue weighted 1/(|W| prod G)
};

struct DensityOfStates {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> mass;  // per bin, total 1
    DosMethod method = DosMethod::Linear;

    std::size_t bins() const { return mass.size(); }
    double bin_width() const { return (hi - lo) / static_cast<double>(mass.size()); }
    double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
    double density(std::size_t i) const { return mass[i] / bin_width(); }
    double total() const;
};

DensityOfStates density_of_states(const BandGrid& grid, std::size_t bins,
                                  std::optional<Interval> range = std::nullopt,
                                  DosMethod method = DosMethod::Linear);

struct ResolventResult {
    RealSpaceWindow u;
    std::vector<int> resolution;
    double min_abs_dispersion = 0.0;        // min over the grid of |D(exp(ik), lambda)|
    double min_singular_value = 0.0;        // min over the grid of sigma_min(A - lambda)
    double quadrature_error_estimate = 0.0;  // max |u_G - u_{G/2}| on the output box
};

// Solves (A - lambda) u = f through the grid Floquet transform,
// u(n) = G^-d sum_k exp(i k.n) (A(exp(ik)) - lambda)^-1 f^(k), f^(k) = sum_n f(n) exp(-i k.n).
// Throws SpectrumError when lambda is too close to the spectrum: the grid
// minimum of |D| must exceed 10x the quadrature error estimate.
ResolventResult resolvent_apply(const OperatorSpec& spec, const RealSpaceWindow& f, Complex lambda,
                                std::vector<int> resolution, std::vector<int> out_lo, std::vector<int> out_hi);

}  // namespace blochlab
