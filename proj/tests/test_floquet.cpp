#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blochlab/floquet.hpp"
#include "blochlab/io.hpp"
#include "oracles.hpp"

using namespace blochlab;

namespace {

OperatorSpec graphene() { return builtin("hexagonal", {{"a", -1}, {"b", -1}, {"c", -1}, {"Vv", 0}, {"Vw", 0}}); }

RealSpaceWindow sample_q(const Eigen::VectorXcd& g, const std::vector<Complex>& zeta, std::vector<int> lo, std::vector<int> hi) {
    auto f = RealSpaceWindow::zeros(lo, hi, g.size());
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
        const auto n = f.cell_at(c);
        Complex s = 1.0;
        for (std::size_t i = 0; i < n.size(); ++i) s *= std::pow(zeta[i], n[i]);
        for (Eigen::Index w = 0; w < g.size(); ++w) f.at(n, w) = g(w) * s;
    }
    return f;
}

}  // namespace

TEST_CASE("floquet matrix examples") {
    const GaussianRational a(mpq_class(2, 3)), b(-5), c(mpq_class(1, 2)), vv(1), vw(mpq_class(-7, 4));
    CHECK(floquet_matrix(builtin("hexagonal", {{"a", a}, {"b", b}, {"c", c}, {"Vv", vv}, {"Vw", vw}})) ==
          oracle::hexagonal_matrix(a, b, c, vv, vw));
    CHECK(floquet_matrix(builtin("line", {{"V", 3}}))(0, 0) == parse_laurent("3 - z - z^-1", 1));
    CHECK(floquet_matrix(parse_spec(R"({"dimension": 1, "vertices": [{"name": "p", "potential": "5"}]})"))(0, 0) ==
          LaurentPoly::constant(1, 5));
}

TEST_CASE("dispersion examples") {
    CHECK(dispersion(builtin("line", {{"V", 0}})) == parse_laurent("-lambda - z - z^-1", 1));
    CHECK(dispersion(graphene()) == parse_laurent("lambda^2 - (1+x+y)*(1+x^-1+y^-1)", 2));
    std::mt19937_64 rng(31);
    for (const auto& name : builtin_names()) {
        const auto spec = builtin(name, oracle::random_params(name, rng));
        const auto d = dispersion(spec);
        const int n = static_cast<int>(spec.cell_size());
        CHECK(d.lambda_degree() == n);
        Exponent top{std::vector<int>(spec.dimension(), 0), n};
        CHECK(d.coefficient(top) == GaussianRational(n % 2 ? -1 : 1));
        // Against the numeric determinant.
        const auto fm = floquet_matrix(spec);
        std::uniform_real_distribution<double> u(-3, 3);
        for (int i = 0; i < 20; ++i) {
            const auto z = oracle::random_torus_neighbour(spec.dimension(), rng);
            const Complex l(u(rng), u(rng));
            const Complex want = oracle::numeric_determinant(fm.minus_lambda().evaluate(z, l));
            CHECK(std::abs(d.evaluate(z, l) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("Hermitian on the torus with real roots") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> k(0, 2 * std::numbers::pi);
    for (const auto& name : builtin_names()) {
        const auto spec = builtin(name, oracle::random_params(name, rng));
        const BlochSymbol sym(spec);
        for (int i = 0; i < 20; ++i) {
            std::vector<double> kk(spec.dimension());
            for (auto& x : kk) x = k(rng);
            const auto a = sym.at_k(kk);
            CHECK((a - a.adjoint()).norm() <= 1e-13 * (1 + a.norm()));
            const Eigen::VectorXcd ev = a.eigenvalues();
            for (Eigen::Index j = 0; j < ev.size(); ++j) CHECK(std::abs(ev(j).imag()) < 1e-10);
        }
    }
}

TEST_CASE("bloch symbol derivatives") {
    const BlochSymbol sym(graphene());
    const std::vector<double> k{0.3, -1.1};
    const double h = 1e-6;
    for (int p = 0; p < 2; ++p) {
        auto kp = k, km = k;
        kp[p] += h;
        km[p] -= h;
        CHECK(((sym.at_k(kp) - sym.at_k(km)) / (2 * h) - sym.dk(k, p)).norm() < 1e-8);
        for (int q = 0; q < 2; ++q) CHECK(((sym.dk(kp, q) - sym.dk(km, q)) / (2 * h) - sym.dk2(k, p, q)).norm() < 1e-8);
    }
    CHECK(sym.norm_bound() >= sym.at_k(k).norm() / std::sqrt(2.0));
}

TEST_CASE("apply operator examples") {
    const auto line = builtin("line", {{"V", 0}});
    auto f = RealSpaceWindow::zeros({-3}, {3}, 1);
    f.at(std::vector<int>{0}, 0) = 1.0;
    const auto out = apply_operator(line, f);
    CHECK(out.lo == std::vector<int>{-2});
    CHECK(out.hi == std::vector<int>{2});
    CHECK(out.at(std::vector<int>{0}, 0) == Complex(0.0));
    CHECK(out.at(std::vector<int>{1}, 0) == Complex(-1.0));
    CHECK(out.at(std::vector<int>{-1}, 0) == Complex(-1.0));
    CHECK(out.at(std::vector<int>{2}, 0) == Complex(0.0));

    const auto zero = apply_operator(graphene(), RealSpaceWindow::zeros({-2, -2}, {2, 2}, 2));
    for (auto v : zero.values) CHECK(v == Complex(0.0));

    CHECK_THROWS_AS(apply_operator(line, RealSpaceWindow::zeros({0}, {1}, 1)), WindowError);
    CHECK_THROWS_AS(apply_operator(line, RealSpaceWindow::zeros({0, 0}, {3, 3}, 1)), WindowError);
}

TEST_CASE("quasi-periodic covariance on graphene") {
    const auto spec = graphene();
    const auto fm = floquet_matrix(spec);
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n;
    for (int t = 0; t < 50; ++t) {
        const auto zeta = oracle::random_torus_neighbour(2, rng);
        Eigen::VectorXcd g(2);
        g << Complex(n(rng), n(rng)), Complex(n(rng), n(rng));
        const auto out = apply_operator(spec, sample_q(g, zeta, {-3, -3}, {3, 3}));
        const auto want = sample_q(fm.evaluate(zeta) * g, zeta, out.lo, out.hi);
        CHECK(oracle::relative_gap(out.values, want.values) < 1e-10);
    }
}

TEST_CASE("operator range: a larger window does not change the output") {
    const auto spec = builtin("fik", {{"a", 1}, {"b", 2}, {"c", -1}, {"d", 3}, {"e", GaussianRational(mpq_class(1, 2))},
                                      {"Vu", 0}, {"Vv", 1}});
    CHECK(operator_range(spec) == std::vector<int>{1, 1});
    std::mt19937_64 rng(34);
    std::normal_distribution<double> n;
    auto big = RealSpaceWindow::zeros({-4, -4}, {4, 4}, 2);
    for (auto& v : big.values) v = Complex(n(rng), n(rng));
    auto small = RealSpaceWindow::zeros({-2, -2}, {2, 2}, 2);
    for (std::size_t c = 0; c < small.cell_count(); ++c) {
        const auto cell = small.cell_at(c);
        for (std::size_t w = 0; w < 2; ++w) small.at(cell, w) = big.at(cell, w);
    }
    const auto a = apply_operator(spec, small), b = apply_operator(spec, big);
    for (std::size_t c = 0; c < a.cell_count(); ++c) {
        const auto cell = a.cell_at(c);
        for (std::size_t w = 0; w < 2; ++w) CHECK(a.at(cell, w) == b.at(cell, w));
    }
}

TEST_CASE("floquet mode examples") {
    const auto line = builtin("line", {{"V", 0}});
    const std::vector<Complex> one{1.0};
    const auto m = floquet_mode(line, one, -2.0);
    REQUIRE(m.mode.has_value());
    CHECK(m.kernel_dimension == 1);
    CHECK(m.abs_dispersion < 1e-14);
    const auto f = m.mode->sample({-3}, {3});
    const auto af = apply_operator(line, f);
    for (std::size_t c = 0; c < af.cell_count(); ++c) {
        const auto cell = af.cell_at(c);
        CHECK(std::abs(af.at(cell, 0) + 2.0 * f.at(cell, 0)) < 1e-14);
    }

    const double t = 2 * std::numbers::pi / 3;
    const std::vector<Complex> dirac{std::polar(1.0, t), std::polar(1.0, 2 * t)};
    const auto d = floquet_mode(graphene(), dirac, 0.0);
    CHECK(d.kernel_dimension == 2);
    REQUIRE(d.mode.has_value());
    CHECK(std::abs(d.mode->amplitude.norm() - 1.0) < 1e-12);

    // Beyond the norm bound there is no mode.
    const BlochSymbol sym(graphene());
    const std::vector<Complex> k0{1.0, 1.0};
    CHECK_FALSE(floquet_mode(graphene(), k0, sym.norm_bound() + 1.0).mode.has_value());
}
