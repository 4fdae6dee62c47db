#pragma once

#include <string>

#include <json.hpp>

#include "blochlab/gaussian_rational.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

using json = nlohmann::json;

// Rational fields are either a rational-string or {"re": str, "im": str}.
GaussianRational rational_from_json(const json& j);
json rational_to_json(const GaussianRational& q);

// Canonical serialization: list of {exponents, lambda_power, coeff_re, coeff_im}
// in ascending (lambda_power, exponents) order.
json laurent_to_json(const LaurentPoly& p);
LaurentPoly laurent_from_json(const json& j, int dimension);

// Floating coefficients as [re, im] pairs.
json numeric_poly_to_json(const NumericPoly& p);

json complex_to_json(Complex c);
Complex complex_from_json(const json& j);

// Writes text to path, throwing IoError on failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace blochlab

namespace blochlab {

// Expression parser for Laurent polynomials: sums and products of rational
// numbers, i, variables (z for d=1, x and y for d=2, z1..zd otherwise) and
// lambda (also written λ), with integer powers and parentheses. Accepts the
// printer output.
LaurentPoly parse_laurent(const std::string& text, int dimension);

}  // namespace blochlab
