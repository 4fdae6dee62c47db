#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blochlab/graph_model.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

// Entry (v,w) = sum of weight * z^offset over edges v <- w+offset, plus V(v)
// on the diagonal. Direct matrices pass through.
LaurentMatrix floquet_matrix(const OperatorSpec& spec);

// D(z, lambda) = det(A(z) - lambda I).
LaurentPoly dispersion(const OperatorSpec& spec);

// Numeric form A(z) = sum_o A_o z^o, used for torus sweeps and derivatives in k
// where z = exp(i k).
class BlochSymbol {
public:
    struct Term {
        std::vector<int> offset;
        Eigen::MatrixXcd coeff;
    };

    explicit BlochSymbol(const LaurentMatrix& m);
    explicit BlochSymbol(const OperatorSpec& spec) : BlochSymbol(floquet_matrix(spec)) {}

    int dimension() const { return dim_; }
    int size() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }

    Eigen::MatrixXcd at(std::span<const Complex> z) const;
    Eigen::MatrixXcd at_k(std::span<const double> k) const;
    // d/dk_p and d^2/dk_p dk_q of A(exp(ik)).
    Eigen::MatrixXcd dk(std::span<const double> k, int p) const;
    Eigen::MatrixXcd dk2(std::span<const double> k, int p, int q) const;

    // sum_o ||A_o||_2 bounds ||A(exp(ik))||_2 for all k.
    double norm_bound() const;
    // sum_o ||A_o||_2 |o|_2 bounds the k-Lipschitz constant of A(exp(ik)).
    double lipschitz_bound() const;

private:
    int dim_ = 0;
    int n_ = 0;
    std::vector<Term> terms_;
};

// Values f(n, w) on a box of cells lo..hi (inclusive per axis), cells in
// row-major order (last axis fastest), W values per cell.
struct RealSpaceWindow {
    std::vector<int> lo;
    std::vector<int> hi;
    std::size_t cell_size = 0;
    std::vector<Complex> values;

    static RealSpaceWindow zeros(std::vector<int> lo, std::vector<int> hi, std::size_t cell_size);

    int dimension() const { return static_cast<int>(lo.size()); }
    std::size_t cell_count() const;
    bool contains(std::span<const int> cell) const;
    std::size_t cell_index(std::span<const int> cell) const;
    std::vector<int> cell_at(std::size_t index) const;
    Complex& at(std::span<const int> cell, std::size_t w) { return values[cell_index(cell) * cell_size + w]; }
    Complex at(std::span<const int> cell, std::size_t w) const { return values[cell_index(cell) * cell_size + w]; }
};

class WindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-axis operator range: max |offset_i| over edges (or matrix terms).
std::vector<int> operator_range(const OperatorSpec& spec);

// Af on the box shrunk by the operator range. Graphs are applied edge by
// edge; direct matrices through their Laurent terms.
RealSpaceWindow apply_operator(const OperatorSpec& spec, const RealSpaceWindow& f);

// Q(g, zeta)(w + n) = g(w) zeta^n.
struct QuasiPeriodicMode {
    std::vector<Complex> weight;
    Eigen::VectorXcd amplitude;

    RealSpaceWindow sample(std::vector<int> lo, std::vector<int> hi) const;
};

struct ModeResult {
    std::optional<QuasiPeriodicMode> mode;
    int kernel_dimension = 0;
    std::vector<double> singular_values;  // descending
    double tolerance = 0.0;
    double abs_dispersion = 0.0;          // |D(zeta, lambda)|
};

// Smallest singular pair of A(zeta) - lambda I; a mode is returned when the
// smallest singular value is <= tol (default 1e-8 * sum_o ||A_o||_2 |zeta^o|).
ModeResult floquet_mode(const OperatorSpec& spec, std::span<const Complex> zeta, Complex lambda,
                        std::optional<double> tol = std::nullopt);

}  // namespace blochlab
