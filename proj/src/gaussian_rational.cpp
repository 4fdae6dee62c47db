#include "blochlab/gaussian_rational.hpp"

#include <cctype>
#include <cmath>
#include <regex>

namespace blochlab {

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    mpq_class n = o.norm();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
}

std::string rational_to_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string GaussianRational::to_string() const {
    if (sgn(im_) == 0) return rational_to_string(re_);
    std::string imag = rational_to_string(abs(im_)) + "i";
    if (sgn(re_) == 0) return (sgn(im_) < 0 ? "-" : "") + imag;
    return rational_to_string(re_) + (sgn(im_) < 0 ? "-" : "+") + imag;
}

namespace {

mpq_class parse_rational(const std::string& num, const std::string& den) {
    mpq_class q;
    if (den.empty()) {
        q = mpq_class(mpz_class(num));
    } else {
        mpz_class d(den);
        if (d == 0) throw ParseError("zero denominator in rational literal");
        q = mpq_class(mpz_class(num), d);
        q.canonicalize();
    }
    return q;
}

}  // namespace

GaussianRational GaussianRational::parse(std::string_view text) {
    // Whitespace is insignificant.
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty rational literal");

    static const std::regex full(R"(^([+-]?)(\d+)(?:/(\d+))?(?:([+-])(\d+)?(?:/(\d+))?i)?$)");
    static const std::regex imag_only(R"(^([+-]?)(\d+)?(?:/(\d+))?i$)");
    std::smatch m;
    if (std::regex_match(s, m, full)) {
        mpq_class re = parse_rational(m[2].str(), m[3].str());
        if (m[1] == "-") re = -re;
        mpq_class im = 0;
        if (m[4].matched) {
            if (!m[5].matched && m[6].matched) throw ParseError("malformed imaginary part in '" + s + "'");
            im = m[5].matched ? parse_rational(m[5].str(), m[6].str()) : mpq_class(1);
            if (m[4] == "-") im = -im;
        }
        return {re, im};
    }
    if (std::regex_match(s, m, imag_only)) {
        if (!m[2].matched && m[3].matched) throw ParseError("malformed imaginary literal '" + s + "'");
        mpq_class im = m[2].matched ? parse_rational(m[2].str(), m[3].str()) : mpq_class(1);
        if (m[1] == "-") im = -im;
        return {0, im};
    }
    throw ParseError("not a rational literal: '" + s + "'");
}

std::optional<mpq_class> rationalize(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    // Continued-fraction convergents of x.
    long double r = x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        long double a = std::floor(r);
        if (std::fabs(a) > 1e18L) break;
        mpz_class ai(static_cast<double>(a));
        mpz_class p2 = ai * p1 + p0;
        mpz_class q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpq_class cand(p1, q1);
        cand.canonicalize();
        if (std::fabs(cand.get_d() - x) <= tol) return cand;
        long double frac = r - a;
        if (frac < 1e-18L) break;
        r = 1.0L / frac;
    }
    return std::nullopt;
}

std::optional<GaussianRational> rationalize(std::complex<double> x, long max_den, double tol) {
    auto re = rationalize(x.real(), max_den, tol);
    auto im = rationalize(x.imag(), max_den, tol);
    if (!re || !im) return std::nullopt;
    return GaussianRational(*re, *im);
}

}  // namespace blochlab
