#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blochlab/fermi.hpp"
#include "blochlab/floquet.hpp"
#include "blochlab/io.hpp"
#include "oracles.hpp"

using namespace blochlab;

namespace {

constexpr double kPi = std::numbers::pi;

OperatorSpec graphene() { return builtin("hexagonal", {{"a", -1}, {"b", -1}, {"c", -1}, {"Vv", 0}, {"Vw", 0}}); }

Complex value_at(const FermiSection& s, const TorusPoint& k) {
    const std::vector<Complex> z{std::polar(1.0, k[0]), std::polar(1.0, k[1])};
    return s.numeric_polynomial.evaluate(z);
}

double torus_distance(const TorusPoint& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        double d = std::fmod(std::abs(a[i] - b[i]), 2 * kPi);
        worst = std::max(worst, std::min(d, 2 * kPi - d));
    }
    return worst;
}

}  // namespace

TEST_CASE("graphene at zero energy: polynomial and Dirac points") {
    const auto s = fermi_section(graphene(), GaussianRational(0), {{64, 64}, true});
    REQUIRE(s.polynomial.has_value());
    CHECK(*s.polynomial == -parse_laurent("(1+x+y)*(1+x^-1+y^-1)", 2));
    CHECK(s.lambda0_exact == GaussianRational(0));
    CHECK_FALSE(s.low_confidence);
    REQUIRE(s.points.size() == 2);
    for (const auto& p : s.points) {
        double best = 1e9;
        for (const auto& d : oracle::dirac_points()) best = std::min(best, torus_distance(p, d));
        CHECK(best < 1e-6);
        CHECK(std::abs(value_at(s, p)) < 1e-9);
    }
}

TEST_CASE("line section has no curves and d != 2 refuses curve extraction") {
    const auto line = builtin("line", {{"V", 0}});
    const auto s = fermi_section(line, GaussianRational(5), {{64}, false});
    REQUIRE(s.polynomial.has_value());
    CHECK(*s.polynomial == parse_laurent("-5 - z - z^-1", 1));
    CHECK(s.curves.empty());
    CHECK_THROWS_AS(fermi_section(line, GaussianRational(5), {{64}, true}), FermiError);
    CHECK_THROWS_AS(fermi_section(graphene(), GaussianRational(0), {{2, 64}, true}), FermiError);
}

TEST_CASE("curve vertices lie within the interpolation bound") {
    const auto spec = builtin("hexagonal", {{"a", -1}, {"b", -1}, {"c", -1}, {"Vv", 0}, {"Vw", 1}});
    const auto s = fermi_section(spec, GaussianRational(mpq_class(3, 2)), {{96, 96}, true});
    REQUIRE_FALSE(s.curves.empty());
    CHECK(s.vertex_bound > 0.0);
    std::size_t n = 0;
    for (const auto& c : s.curves)
        for (const auto& v : c) {
            CHECK(v[0] >= 0.0);
            CHECK(v[0] <= 2 * kPi);
            CHECK(v[1] >= 0.0);
            CHECK(v[1] <= 2 * kPi);
            CHECK(std::abs(value_at(s, v)) <= s.vertex_bound);
            ++n;
        }
    CHECK(n > 10);
}

TEST_CASE("complex energy is low confidence") {
    const auto s = fermi_section(graphene(), Complex(0.5, 0.1), {{32, 32}, true});
    CHECK(s.low_confidence);
    CHECK_FALSE(s.polynomial.has_value());
    const auto r = fermi_section(graphene(), GaussianRational(1, 1), {{32, 32}, true});
    CHECK(r.low_confidence);
    CHECK(r.polynomial.has_value());
}

TEST_CASE("interpolation bound") {
    // f = z: (h^2 / 8) * 1 with h = 2*pi/8.
    const auto f = to_numeric(parse_laurent("z", 1));
    const double h = 2 * kPi / 8;
    CHECK(interpolation_bound(f, {8}) == doctest::Approx(h * h / 8));
    // Doubling the exponent quadruples the bound.
    CHECK(interpolation_bound(to_numeric(parse_laurent("2 z^2", 1)), {8}) == doctest::Approx(8 * h * h / 8));
}

TEST_CASE("periodic contours of cos k1") {
    const int g = 10;
    std::vector<double> values(g * g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) values[i * g + j] = std::cos(2 * kPi * i / g);
    const auto curves = periodic_contours(values, g, g);
    CHECK(curves.size() >= 2);
    for (const auto& c : curves)
        for (const auto& v : c) CHECK(std::abs(std::cos(v[0])) < 0.1);

    std::vector<double> positive(g * g, 1.0);
    CHECK(periodic_contours(positive, g, g).empty());
}

TEST_CASE("display window") {
    const auto a = to_display_window({0.1, 5.0});
    CHECK(a[0] == doctest::Approx(0.1));
    CHECK(a[1] == doctest::Approx(5.0 - 2 * kPi));
    const auto b = to_display_window({3 * kPi / 2 + 0.01, kPi});
    CHECK(b[0] == doctest::Approx(-kPi / 2 + 0.01));
    CHECK(b[1] == doctest::Approx(kPi));
}
