#pragma once

#include <utility>
#include <vector>

#include "blochlab/gaussian_rational.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

// Dense univariate polynomial over the Gaussian rationals, ascending coefficients.
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<GaussianRational> coeffs);

    static UniPoly linear_root(const GaussianRational& root);  // (t - root)

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<GaussianRational>& coeffs() const { return c_; }
    const GaussianRational& leading() const { return c_.back(); }

    UniPoly monic() const;
    GaussianRational evaluate(const GaussianRational& t) const;
    Complex evaluate(Complex t) const;

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
    bool operator==(const UniPoly&) const = default;

    // Quotient and remainder; throws on a zero divisor.
    std::pair<UniPoly, UniPoly> divmod(const UniPoly& divisor) const;

    // Numeric roots from companion-matrix eigenvalues.
    std::vector<Complex> numeric_roots() const;

    std::string to_string(const std::string& var = "t") const;

private:
    void trim();
    std::vector<GaussianRational> c_;
};

// Monic gcd via the Euclidean algorithm (field coefficients). gcd(0,0) = 0.
UniPoly gcd(const UniPoly& a, const UniPoly& b);

struct PolyRoot {
    Complex value;
    std::optional<GaussianRational> exact;  // set when verified by exact substitution
    int multiplicity = 1;
};

// Roots with multiplicities. Rational candidates obtained by rationalizing
// the numeric roots are verified exactly and deflated; whatever remains is
// reported numerically with exact unset.
std::vector<PolyRoot> roots_with_multiplicity(const UniPoly& p);

// Univariate view of a polynomial with dimension 0 (lambda only) or of a
// lambda-free d=0 polynomial.
UniPoly to_unipoly_in_lambda(const LaurentPoly& p);

}  // namespace blochlab
