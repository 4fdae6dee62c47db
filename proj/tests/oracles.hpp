#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library routine it is meant to check.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blochlab/graph_model.hpp"
#include "blochlab/laurent.hpp"

namespace oracle {

using blochlab::Complex;
using blochlab::GaussianRational;
using blochlab::LaurentMatrix;
using blochlab::LaurentPoly;

// Leibniz formula: sum over permutations of sign * prod entries.
LaurentPoly permutation_determinant(const LaurentMatrix& m);

// Every n x n matrix over the alphabet (|alphabet|^(n*n) matrices).
std::vector<LaurentMatrix> matrix_corpus(const std::vector<LaurentPoly>& alphabet, std::size_t n);
// 2x2 over six entries and 3x3 over three entries, all with at most three terms.
std::vector<LaurentMatrix> small_corpus();

// Gaussian elimination with partial pivoting.
Complex numeric_determinant(Eigen::MatrixXcd m);

// Hand-written hexagonal Floquet matrix [[Vv, a + b/x + c/y], [a + b x + c y, Vw]]
// for real labels.
LaurentMatrix hexagonal_matrix(const GaussianRational& a, const GaussianRational& b, const GaussianRational& c,
                               const GaussianRational& vv, const GaussianRational& vw);

// Sorted eigenvalues of the Hermitian matrix A(exp(ik)) built by direct evaluation.
Eigen::VectorXd band_energies(const LaurentMatrix& a, const std::vector<double>& k);
// Central differences of the band energy.
Eigen::VectorXd fd_gradient(const LaurentMatrix& a, const std::vector<double>& k, std::size_t band, double h);
Eigen::MatrixXd fd_hessian(const LaurentMatrix& a, const std::vector<double>& k, std::size_t band, double h);

// Monic gcd of the lambda-coefficients of p, written out with its own Euclid
// loop; ascending coefficients.
std::vector<GaussianRational> flat_band_polynomial(const LaurentPoly& p);

// Line graph density of states 1/(pi sqrt(4 - t^2)) integrated over [lo, hi].
double line_dos_mass(double lo, double hi);

// Green's function of (A - lambda) for the free line graph, |lambda| > 2 real:
// u(n) = -r^|n| / sqrt(lambda^2 - 4) with r the root of r + 1/r = -lambda inside the unit disk.
double line_green(int n, double lambda);

// Random nonzero real rational p/q with |p| <= 6, 1 <= q <= 4.
GaussianRational random_rational(std::mt19937_64& rng);
// Random parameters for a builtin.
blochlab::Params random_params(const std::string& builtin, std::mt19937_64& rng);
// A point of (C^x)^d with log-uniform moduli in [0.5, 2].
std::vector<Complex> random_torus_neighbour(int d, std::mt19937_64& rng);

// Dirac points of graphene with a = b = c.
std::vector<std::vector<double>> dirac_points();

// max_{a,b} |a - b| / max(1, max |b|) style comparison helper.
double relative_gap(const std::vector<Complex>& got, const std::vector<Complex>& want);

}  // namespace oracle
