#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blochlab/gaussian_rational.hpp"

namespace blochlab {

using Complex = std::complex<double>;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exponent key of a term z^n lambda^m. Ordered by (lambda power, n lexicographic).
struct Exponent {
    std::vector<int> z;
    int lambda = 0;

    auto operator<=>(const Exponent& o) const {
        if (auto c = lambda <=> o.lambda; c != 0) return c;
        return z <=> o.z;
    }
    bool operator==(const Exponent&) const = default;
};

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<GaussianRational> {
    static bool is_zero(const GaussianRational& c) { return c.is_zero(); }
    static GaussianRational conj(const GaussianRational& c) { return c.conj(); }
    static Complex to_complex(const GaussianRational& c) { return c.to_complex(); }
    static std::string to_string(const GaussianRational& c) { return c.to_string(); }
};

template <>
struct CoeffTraits<Complex> {
    static bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
    static Complex conj(const Complex& c) { return std::conj(c); }
    static Complex to_complex(const Complex& c) { return c; }
    static std::string to_string(const Complex& c);
};

// Sparse Laurent polynomial in z_1..z_d (any integer exponent) and lambda
// (non-negative exponent). Zero coefficients are never stored, so two equal
// polynomials always have identical term maps.
template <class C>
class BasicLaurentPoly {
public:
    using Coeff = C;
    using TermMap = std::map<Exponent, C>;

    BasicLaurentPoly() = default;
    explicit BasicLaurentPoly(int dimension) : dim_(dimension) {
        if (dimension < 0) throw std::invalid_argument("negative dimension");
    }

    static BasicLaurentPoly constant(int dimension, const C& c);
    static BasicLaurentPoly monomial(int dimension, std::vector<int> z, int lambda_power, const C& c);
    static BasicLaurentPoly variable(int dimension, int axis);  // z_axis, axis is 0-based
    static BasicLaurentPoly lambda(int dimension);

    int dimension() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_lambda_free() const;
    int lambda_degree() const;  // -1 for the zero polynomial
    C coefficient(const Exponent& e) const;

    // Adds c * z^e.z * lambda^e.lambda, merging with an existing term.
    void add_term(const Exponent& e, const C& c);

    BasicLaurentPoly& operator+=(const BasicLaurentPoly& o);
    BasicLaurentPoly& operator-=(const BasicLaurentPoly& o);
    BasicLaurentPoly& operator*=(const BasicLaurentPoly& o);
    BasicLaurentPoly& operator*=(const C& c);
    BasicLaurentPoly operator-() const;

    friend BasicLaurentPoly operator+(BasicLaurentPoly a, const BasicLaurentPoly& b) { return a += b; }
    friend BasicLaurentPoly operator-(BasicLaurentPoly a, const BasicLaurentPoly& b) { return a -= b; }
    friend BasicLaurentPoly operator*(const BasicLaurentPoly& a, const BasicLaurentPoly& b) {
        BasicLaurentPoly r = a;
        r *= b;
        return r;
    }
    friend BasicLaurentPoly operator*(BasicLaurentPoly a, const C& c) { return a *= c; }
    friend BasicLaurentPoly operator*(const C& c, BasicLaurentPoly a) { return a *= c; }
    bool operator==(const BasicLaurentPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    BasicLaurentPoly pow(int exponent) const;

    // Floating evaluation; throws std::domain_error on a zero coordinate.
    Complex evaluate(std::span<const Complex> z, Complex lambda = 0.0) const;

    // z_i d/dz_i: every coefficient times its i-th exponent (axis 0-based).
    BasicLaurentPoly euler_derivative(int axis) const;
    // d/dlambda.
    BasicLaurentPoly lambda_derivative() const;
    BasicLaurentPoly substitute_lambda(const C& lambda0) const;
    // p(z, lambda - shift).
    BasicLaurentPoly shift_lambda(const C& shift) const;
    // conj(p(conj(z)^-1, conj(lambda))): negate z-exponents, conjugate coefficients.
    BasicLaurentPoly reflect_conjugate() const;
    // Multiply by z^shift.
    BasicLaurentPoly shift_z(std::span<const int> shift) const;

    // Regroups as sum_n p_n(lambda) z^n; result keys are z-exponents.
    std::map<std::vector<int>, std::vector<C>> lambda_coefficients() const;

    // Per-axis minimum and maximum z-exponents (empty for the zero polynomial).
    std::vector<int> min_exponents() const;
    std::vector<int> max_exponents() const;
    // Max over axes of (max exponent - min exponent).
    int span() const;

    BasicLaurentPoly<Complex> to_numeric() const;

    // Deterministic printer; terms in descending (lambda power, exponents) order.
    std::string to_string() const;

private:
    void check_dim(const BasicLaurentPoly& o) const;

    int dim_ = 0;
    TermMap terms_;
};

using LaurentPoly = BasicLaurentPoly<GaussianRational>;
using NumericPoly = BasicLaurentPoly<Complex>;

// Square matrix of Laurent polynomials sharing one dimension.
template <class C>
class BasicLaurentMatrix {
public:
    using Poly = BasicLaurentPoly<C>;

    BasicLaurentMatrix() = default;
    BasicLaurentMatrix(int dimension, std::size_t size)
        : dim_(dimension), size_(size), entries_(size * size, Poly(dimension)) {}

    int dimension() const { return dim_; }
    std::size_t size() const { return size_; }
    Poly& operator()(std::size_t r, std::size_t c) { return entries_.at(r * size_ + c); }
    const Poly& operator()(std::size_t r, std::size_t c) const { return entries_.at(r * size_ + c); }
    bool operator==(const BasicLaurentMatrix&) const = default;

    // this - lambda * I
    BasicLaurentMatrix minus_lambda() const;
    Eigen::MatrixXcd evaluate(std::span<const Complex> z, Complex lambda = 0.0) const;
    BasicLaurentMatrix<Complex> to_numeric() const;

private:
    int dim_ = 0;
    std::size_t size_ = 0;
    std::vector<Poly> entries_;
};

using LaurentMatrix = BasicLaurentMatrix<GaussianRational>;
using NumericMatrix = BasicLaurentMatrix<Complex>;

// Cofactor expansion memoized over column subsets (row-by-row DP on bitmasks).
template <class C>
BasicLaurentPoly<C> determinant(const BasicLaurentMatrix<C>& m);

// gcd over the Gaussian rationals of the lambda-coefficient polynomials
// p_n(lambda); its roots are the energies where p(z, lambda0) vanishes identically.
class UniPoly;
UniPoly lambda_coefficient_gcd(const LaurentPoly& p);

// Exact coefficients c_0..c_M with sum_m c_m g^m == p, or nullopt. p and g must
// be lambda-free; M = ceil(span(p)/span(g)) + 2.
std::optional<std::vector<GaussianRational>> composite_rewrite(const LaurentPoly& p, const LaurentPoly& g);

// Sum c_m g^m.
LaurentPoly compose(std::span<const GaussianRational> coeffs, const LaurentPoly& g);

// Exact coefficients mapped to the nearest double.
inline NumericPoly to_numeric(const LaurentPoly& p) { return p.to_numeric(); }

// Variable names used by the printer: z for d=1, x,y for d=2, z1..zd otherwise.
std::string variable_name(int dimension, int axis);

}  // namespace blochlab
