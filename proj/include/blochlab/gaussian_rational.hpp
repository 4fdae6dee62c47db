#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace blochlab {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact complex number re + im*i with arbitrary-precision rational parts.
// mpq_class keeps both parts canonical (reduced, positive denominator).
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT(implicit)
    GaussianRational(mpq_class re, mpq_class im = 0);

    static GaussianRational i() { return {0, 1}; }

    // Grammar: [sign] int [/int] [(+|-) [int[/int]] i], or a pure imaginary
    // [sign] [int[/int]] i. Decimal points and exponents are rejected.
    static GaussianRational parse(std::string_view text);

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    GaussianRational conj() const { return {re_, -im_}; }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    // Inverse of parse: "p/q", "p/q+r/si", "r/si".
    std::string to_string() const;

    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

// Best rational approximation with denominator <= max_den, accepted only when
// it lies within tol of x.
std::optional<mpq_class> rationalize(double x, long max_den = 1000000, double tol = 1e-9);
std::optional<GaussianRational> rationalize(std::complex<double> x, long max_den = 1000000,
                                            double tol = 1e-9);

std::string rational_to_string(const mpq_class& q);

}  // namespace blochlab
