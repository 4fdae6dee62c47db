// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "blochlab/certificates.hpp"
#include "blochlab/critical.hpp"
#include "blochlab/floquet.hpp"
#include "blochlab/io.hpp"
#include "blochlab/polytope.hpp"
#include "blochlab/spectrum.hpp"
#include "oracles.hpp"

using namespace blochlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double torus_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = std::fmod(std::abs(a[i] - b[i]), 2 * std::numbers::pi);
        t = std::min(t, 2 * std::numbers::pi - t);
        s += t * t;
    }
    return std::sqrt(s);
}

Params params(std::initializer_list<std::pair<const char*, const char*>> kv) {
    Params p;
    for (const auto& [k, v] : kv) p[k] = GaussianRational::parse(v);
    return p;
}

const OperatorSpec& graphene() {
    static const OperatorSpec s = builtin("hexagonal", params({{"a", "-1"}, {"b", "-1"}, {"c", "-1"}, {"Vv", "0"}, {"Vw", "0"}}));
    return s;
}

// 1. Hexagonal Floquet matrix against the hand-written matrix.
Outcome hexagonal_matrix() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_rational(rng), b = oracle::random_rational(rng), c = oracle::random_rational(rng);
        const auto vv = oracle::random_rational(rng), vw = oracle::random_rational(rng);
        const auto spec = builtin("hexagonal", {{"a", a}, {"b", b}, {"c", c}, {"Vv", vv}, {"Vw", vw}});
        if (!(floquet_matrix(spec) == oracle::hexagonal_matrix(a, b, c, vv, vw)))
            return {false, "mismatch at trial " + std::to_string(trial)};
        ++checked;
    }
    const auto ones = builtin("hexagonal", params({{"a", "-1"}, {"b", "-1"}, {"c", "-1"}, {"Vv", "0"}, {"Vw", "0"}}));
    if (!(floquet_matrix(ones) == oracle::hexagonal_matrix(-1, -1, -1, 0, 0))) return {false, "graphene mismatch"};
    const double dt = seconds_since(t0);
    return {dt < 1.0, std::to_string(checked + 1) + " label sets exact, " + fmt("%.3f s (limit 1 s)", dt)};
}

// 2. Upper-band saddles of Vv=0, Vw=1, a=b=c=-1 at (1+sqrt5)/2.
Outcome graphene_saddle() {
    const auto t0 = Clock::now();
    const auto spec = builtin("hexagonal", params({{"a", "-1"}, {"b", "-1"}, {"c", "-1"}, {"Vv", "0"}, {"Vw", "1"}}));
    const auto search = find_critical_points(spec, band_grid(spec, {128, 128}));
    const double target = (1 + std::sqrt(5.0)) / 2;
    std::vector<const CriticalPoint*> hits;
    double worst = 0.0;
    for (const auto& p : search.points)
        if (p.kind == CriticalKind::Saddle && p.band == 1 && std::abs(p.energy - target) < 1e-3) {
            hits.push_back(&p);
            worst = std::max(worst, std::abs(p.energy - target));
        }
    bool distinct = true;
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = i + 1; j < hits.size(); ++j)
            if (torus_distance(hits[i]->k, hits[j]->k) < 1e-3) distinct = false;
    const double dt = seconds_since(t0);
    const bool ok = hits.size() == 3 && worst < 1e-6 && distinct && dt < 30.0;
    return {ok, std::to_string(hits.size()) + " saddles, max |E - (1+sqrt5)/2| = " + fmt("%.2e", worst) +
                    fmt(", %.2f s", dt)};
}

// 3. Dirac points and the spectrum of graphene.
Outcome dirac_points() {
    const auto& spec = graphene();
    const auto grid = band_grid(spec, {128, 128});
    const auto search = find_critical_points(spec, grid);
    std::vector<const CriticalPoint*> crossings;
    for (const auto& p : search.points)
        if (p.kind == CriticalKind::BandCrossing) crossings.push_back(&p);
    bool ok = crossings.size() == 2;
    std::ostringstream s;
    s << crossings.size() << " crossings";
    for (const auto& want : oracle::dirac_points()) {
        const CriticalPoint* match = nullptr;
        for (const auto* c : crossings)
            if (torus_distance(c->k, want) < 1e-6) match = c;
        if (!match || std::abs(match->energy) > 1e-8 || match->multiplicity != 2) ok = false;
        // Kernel dimension at the exact Dirac multiplier.
        const std::vector<Complex> zeta{std::polar(1.0, want[0]), std::polar(1.0, want[1])};
        const auto mode = floquet_mode(spec, zeta, 0.0);
        if (mode.kernel_dimension != 2) ok = false;
        s << ", kernel " << mode.kernel_dimension;
    }
    const auto raw = spectral_report(grid, spec);
    const auto report = refine_report(raw, search);
    s << ", raw grid intervals " << raw.spectrum.size();
    const bool one = report.spectrum.size() == 1;
    const double err = one ? std::max(std::abs(report.spectrum[0].lo + 3), std::abs(report.spectrum[0].hi - 3)) : 1.0;
    s << ", spectrum endpoint error " << fmt("%.2e", err);
    return {ok && one && err < 1e-3, s.str()};
}

// 4. AA stack: exact two-factor certificate.
Outcome aa_stack() {
    const auto t0 = Clock::now();
    const GaussianRational half(mpq_class(1, 2));
    const RationalMatrix k{{0, half}, {half, 0}};
    const auto cert = multilayer_factorize(graphene(), k);
    const LaurentPoly d0 = dispersion(graphene());
    const LaurentPoly want_a = d0.shift_lambda(half), want_b = d0.shift_lambda(-half);
    const LaurentPoly d_aa = dispersion(build_multilayer(graphene(), k));

    std::vector<LaurentPoly> got;
    for (const auto& f : cert.factors)
        if (!f.unit && f.exact)
            for (int m = 0; m < f.multiplicity; ++m) got.push_back(*f.exact);
    const bool factors = got.size() == 2 && ((got[0] == want_a && got[1] == want_b) || (got[0] == want_b && got[1] == want_a));
    const bool identity = want_a * want_b == d_aa && cert.target == d_aa;
    const double dt = seconds_since(t0);
    const bool ok = cert.kind == CertificateKind::Exact && factors && identity && dt < 5.0;
    return {ok, "kind " + to_string(cert.kind) + ", factors " + (factors ? "match" : "differ") +
                    ", product " + (identity ? "equals" : "differs from") + " D" + fmt(", %.3f s", dt)};
}

// 5. AB stack reduces to a polynomial in xi = zeta zeta'.
Outcome ab_composite() {
    const auto spec = builtin("ab_bilayer", params({{"Delta", "1"}, {"gamma1", "2/3"}, {"gamma4", "0"}}));
    const LaurentPoly g = parse_laurent("(1+x+y)*(1+x^-1+y^-1)", 2);
    const LaurentPoly d = dispersion(spec);
    std::mt19937_64 rng(20260501);
    double worst = 0.0;
    std::ostringstream s;
    bool ok = true;
    for (const char* l0 : {"1/3", "-2", "5/2"}) {
        const auto lambda0 = GaussianRational::parse(l0);
        const auto r = composite_factorize(spec, lambda0, g);
        if (!r.success()) return {false, std::string("failed at ") + l0 + ": " + r.failure};
        const LaurentPoly section = d.substitute_lambda(lambda0);
        // Exact identity of the rewrite.
        if (!(compose(r.composite_coefficients, g) == section.shift_z(r.monomial_shift))) ok = false;
        const std::size_t degree = r.composite_coefficients.size() - 1;
        if (r.certificate->factor_count() != degree) ok = false;
        // Fresh points, scale = sum of term magnitudes of the section.
        for (int i = 0; i < 100; ++i) {
            const auto z = oracle::random_torus_neighbour(2, rng);
            Complex prod = 1.0;
            for (const auto& f : r.certificate->factors) prod *= std::pow(f.numeric.evaluate(z), f.multiplicity);
            double scale = 0.0;
            for (const auto& [e, c] : section.terms())
                scale += std::abs(c.to_complex()) * std::pow(std::abs(z[0]), e.z[0]) * std::pow(std::abs(z[1]), e.z[1]);
            worst = std::max(worst, std::abs(prod - section.evaluate(z)) / scale);
        }
        s << l0 << ": deg " << degree << "; ";
    }
    s << "max residual " << fmt("%.2e", worst);
    return {ok && worst < 1e-8, s.str()};
}

// 6. Lieb flat band.
Outcome lieb_flat_band() {
    const auto equal = builtin("lieb", params({{"Vu", "0"}, {"Vv", "1"}, {"Vw", "1"}}));
    const auto gcd = oracle::flat_band_polynomial(dispersion(equal));
    if (gcd.size() != 2) return {false, "oracle gcd has degree " + std::to_string(gcd.size() - 1)};
    const GaussianRational lambda0 = -gcd[0];
    const auto cert = eigenvalue_test(equal, lambda0);
    const auto grid = band_grid(equal, {64, 64});
    bool constant_band = false;
    for (std::size_t j = 0; j < grid.bands; ++j) {
        bool flat = true;
        for (std::size_t p = 0; p < grid.point_count(); ++p)
            flat = flat && std::abs(grid.energy(p, j) - lambda0.to_complex().real()) <= 1e-12;
        constant_band = constant_band || flat;
    }

    const auto unequal = builtin("lieb", params({{"Vu", "0"}, {"Vv", "1"}, {"Vw", "2"}}));
    std::vector<GaussianRational> probes{0, 1, 2, GaussianRational(mpq_class(3, 2))};
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> num(-40, 40), den(1, 12);
    while (probes.size() < 20) probes.push_back(GaussianRational(mpq_class(num(rng), den(rng))));
    int false_count = 0;
    for (const auto& q : probes)
        if (!eigenvalue_test(unequal, q).is_eigenvalue) ++false_count;
    const bool ok = cert.is_eigenvalue && constant_band && false_count == 20;
    return {ok, "lambda0 = " + lambda0.to_string() + ", eigenvalue " + (cert.is_eigenvalue ? "true" : "false") +
                    ", grid band constant " + (constant_band ? "yes" : "no") + ", unequal potentials false at " +
                    std::to_string(false_count) + "/20"};
}

// 7. Kushnirenko bound attained on the square lattice.
Outcome square_kushnirenko() {
    const auto spec = builtin("square_lattice", params({{"V", "0"}}));
    const auto poly = newton_polytope(dispersion(spec));
    const auto search = find_critical_points(spec, band_grid(spec, {64, 64}));
    std::vector<double> energies;
    bool nondegenerate = true;
    for (const auto& p : search.points) {
        if (!p.isolated) nondegenerate = false;
        if (p.kind == CriticalKind::DegenerateHessian || p.kind == CriticalKind::BandCrossing) nondegenerate = false;
        energies.push_back(p.energy);
    }
    std::sort(energies.begin(), energies.end());
    const std::vector<double> want{-4, 0, 0, 4};
    double err = energies.size() == 4 ? 0.0 : 1.0;
    if (energies.size() == 4)
        for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(energies[i] - want[i]));
    const bool ok = poly.normalized_volume == 4 && energies.size() == 4 && nondegenerate && err < 1e-8;
    return {ok, "volume " + std::to_string(poly.normalized_volume) + ", " + std::to_string(energies.size()) +
                    " points, energy error " + fmt("%.2e", err)};
}

// 8. Reflection identity.
Outcome reflection_identity() {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (const auto& name : builtin_names())
        for (int trial = 0; trial < 5; ++trial) {
            const auto spec = builtin(name, oracle::random_params(name, rng));
            if (!spec.is_self_adjoint()) return {false, name + " not flagged self-adjoint"};
            const auto d = dispersion(spec);
            if (!(d.reflect_conjugate() == d)) return {false, name + " fails"};
            ++checked;
        }
    return {true, std::to_string(checked) + " builtin instances exact"};
}

// 9. Quasi-periodic covariance.
Outcome covariance() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    int checked = 0;
    for (const auto& name : builtin_names()) {
        const auto spec = builtin(name, oracle::random_params(name, rng));
        const auto fm = floquet_matrix(spec);
        const int d = spec.dimension();
        const std::size_t w = spec.cell_size();
        for (int trial = 0; trial < 50; ++trial) {
            const auto zeta = oracle::random_torus_neighbour(d, rng);
            Eigen::VectorXcd g(w);
            for (std::size_t i = 0; i < w; ++i) g(i) = Complex(gauss(rng), gauss(rng));
            const Eigen::VectorXcd ag = fm.evaluate(zeta) * g;
            const std::vector<int> lo(d, -3), hi(d, 3);
            auto f = RealSpaceWindow::zeros(lo, hi, w);
            auto zeta_pow = [&](const std::vector<int>& n) {
                Complex s = 1.0;
                for (int i = 0; i < d; ++i) s *= std::pow(zeta[i], n[i]);
                return s;
            };
            for (std::size_t c = 0; c < f.cell_count(); ++c) {
                const auto n = f.cell_at(c);
                for (std::size_t v = 0; v < w; ++v) f.at(n, v) = g(v) * zeta_pow(n);
            }
            const auto out = apply_operator(spec, f);
            std::vector<Complex> got, want;
            for (std::size_t c = 0; c < out.cell_count(); ++c) {
                const auto n = out.cell_at(c);
                for (std::size_t v = 0; v < w; ++v) {
                    got.push_back(out.at(n, v));
                    want.push_back(ag(v) * zeta_pow(n));
                }
            }
            worst = std::max(worst, oracle::relative_gap(got, want));
            ++checked;
        }
    }
    return {worst < 1e-10, std::to_string(checked) + " samples, max relative error " + fmt("%.2e", worst)};
}

// 10. Line graph density of states.
Outcome line_dos() {
    const auto spec = builtin("line", params({{"V", "0"}}));
    const auto dos = density_of_states(band_grid(spec, {512}), 64);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < dos.bins(); ++i) {
        const double lo = dos.lo + i * dos.bin_width();
        const double want = oracle::line_dos_mass(lo, lo + dos.bin_width());
        worst = std::max(worst, std::abs(dos.mass[i] - want) / want);
    }
    const double mass_err = std::abs(dos.total() - 1.0);
    return {worst < 0.05 && mass_err < 1e-12,
            "interior max relative error " + fmt("%.2e", worst) + ", mass error " + fmt("%.1e", mass_err)};
}

// 11. Resolvent residual for the line graph at lambda = 5.
Outcome resolvent() {
    const auto spec = builtin("line", params({{"V", "0"}}));
    auto f = RealSpaceWindow::zeros({0}, {0}, 1);
    f.values[0] = 1.0;
    const double lambda = 5.0;
    auto residual = [&](int g, double& green_err) {
        const auto r = resolvent_apply(spec, f, lambda, {g}, {-40}, {40});
        double worst = 0.0;
        green_err = 0.0;
        for (int n = -39; n <= 39; ++n) {
            const std::vector<int> c{n}, cm{n - 1}, cp{n + 1};
            const Complex au = -r.u.at(cm, 0) - r.u.at(cp, 0) - lambda * r.u.at(c, 0);
            worst = std::max(worst, std::abs(au - (n == 0 ? 1.0 : 0.0)));
            green_err = std::max(green_err, std::abs(r.u.at(c, 0) - oracle::line_green(n, lambda)));
        }
        return worst;
    };
    double e1 = 0.0, e2 = 0.0;
    const double r1 = residual(1024, e1), r2 = residual(2048, e2);
    // The grid solution solves the G-periodized problem exactly, so its residual is rounding
    // at every G; its distance to the lattice Green's function is what shrinks (lambda = 2.1).
    const auto green_error = [&](int g) {
        const auto r = resolvent_apply(spec, f, 2.1, {g}, {-10}, {10});
        double worst = 0.0;
        for (int n = -10; n <= 10; ++n) {
            const std::vector<int> c{n};
            worst = std::max(worst, std::abs(r.u.at(c, 0) - oracle::line_green(n, 2.1)));
        }
        return worst;
    };
    const bool ok = r1 < 1e-6 && r2 < r1;
    return {ok, "residual G=1024 " + fmt("%.2e", r1) + ", G=2048 " + fmt("%.2e", r2) + " (Green's function error " +
                    fmt("%.1e", e1) + ", " + fmt("%.1e)", e2) + "; lambda=2.1 Green's function error G=64 " +
                    fmt("%.1e", green_error(64)) + ", G=128 " + fmt("%.1e", green_error(128))};
}

// 12. Oracle suites.
Outcome oracle_suites() {
    std::ostringstream s;
    // Determinants over the exhaustive corpus.
    const auto corpus = oracle::small_corpus();
    std::size_t det_bad = 0;
    for (const auto& m : corpus)
        if (!(determinant(m) == oracle::permutation_determinant(m))) ++det_bad;
    s << "det " << corpus.size() - det_bad << "/" << corpus.size();

    // Evaluation is a ring homomorphism.
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> ex(-3, 3), lp(0, 2), nterms(1, 6);
    auto random_poly = [&] {
        LaurentPoly p(2);
        for (int t = nterms(rng); t > 0; --t)
            p.add_term({{ex(rng), ex(rng)}, lp(rng)}, GaussianRational(oracle::random_rational(rng).re(),
                                                                      oracle::random_rational(rng).re()));
        return p;
    };
    double hom = 0.0;
    std::uniform_real_distribution<double> lam(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_poly(), q = random_poly();
        const auto z = oracle::random_torus_neighbour(2, rng);
        const Complex l(lam(rng), lam(rng));
        const Complex lhs = (p * q).evaluate(z, l), rhs = p.evaluate(z, l) * q.evaluate(z, l);
        const Complex sum = (p + q).evaluate(z, l), sum_rhs = p.evaluate(z, l) + q.evaluate(z, l);
        hom = std::max(hom, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
        hom = std::max(hom, std::abs(sum - sum_rhs) / std::max(std::abs(sum_rhs), 1e-300));
    }
    s << ", homomorphism " << fmt("%.1e", hom);

    // Perturbation derivatives against finite differences.
    double grad_err = 0.0, hess_err = 0.0;
    std::uniform_real_distribution<double> kd(0, 2 * std::numbers::pi);
    for (const auto& name : builtin_names()) {
        const auto spec = builtin(name, oracle::random_params(name, rng));
        const auto fm = floquet_matrix(spec);
        const BlochSymbol sym(fm);
        const int d = spec.dimension();
        int done = 0;
        while (done < 100) {
            std::vector<double> k(d);
            for (auto& x : k) x = kd(rng);
            const auto e = oracle::band_energies(fm, k);
            const std::size_t band = rng() % e.size();
            double gap = INFINITY;
            if (band > 0) gap = std::min(gap, e(band) - e(band - 1));
            if (band + 1 < static_cast<std::size_t>(e.size())) gap = std::min(gap, e(band + 1) - e(band));
            if (gap < 1e-3) continue;
            const auto jet = band_jet(sym, k, band);
            grad_err = std::max(grad_err, (jet.gradient - oracle::fd_gradient(fm, k, band, 1e-5)).cwiseAbs().maxCoeff());
            ++done;
        }
    }
    for (const char* which : {"square", "hexagonal"}) {
        const auto spec = std::string(which) == "square"
                              ? builtin("square_lattice", params({{"V", "0"}}))
                              : builtin("hexagonal", params({{"a", "-1"}, {"b", "-2"}, {"c", "-3"}, {"Vv", "0"}, {"Vw", "1"}}));
        const auto fm = floquet_matrix(spec);
        const auto search = find_critical_points(spec, band_grid(spec, {64, 64}));
        for (const auto& p : search.points) {
            if (p.kind == CriticalKind::BandCrossing || p.gap <= 1e-3) continue;
            hess_err = std::max(hess_err, (p.hessian - oracle::fd_hessian(fm, p.k, p.band, 1e-4)).cwiseAbs().maxCoeff());
        }
    }
    s << ", gradient " << fmt("%.1e", grad_err) << ", Hessian " << fmt("%.1e", hess_err);
    const bool ok = det_bad == 0 && hom < 1e-9 && grad_err < 1e-6 && hess_err < 1e-4;
    return {ok, s.str()};
}

}  // namespace

// --expect-fail N marks criterion N as a known failure: it still prints FAIL,
// and an unexpected PASS is reported as an error.
int main(int argc, char** argv) {
    std::vector<int> expected;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--expect-fail") expected.push_back(std::stoi(argv[++i]));
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"hexagonal Floquet matrix", hexagonal_matrix},
        {"upper-band saddles at golden ratio", graphene_saddle},
        {"Dirac points and spectrum [-3,3]", dirac_points},
        {"AA stack exact factorization", aa_stack},
        {"AB stack composite reduction", ab_composite},
        {"Lieb flat band", lieb_flat_band},
        {"square lattice Kushnirenko bound", square_kushnirenko},
        {"reflection identity", reflection_identity},
        {"quasi-periodic covariance", covariance},
        {"line graph density of states", line_dos},
        {"resolvent residual", resolvent},
        {"oracle suites", oracle_suites},
    };
    int failed = 0, unexpected = 0;
    int index = 1;
    for (const auto& [name, fn] : criteria) {
        const bool known = std::find(expected.begin(), expected.end(), index) != expected.end();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s [%d] %s: %s%s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str(),
                    known ? (o.pass ? " (unexpected pass)" : " (expected failure)") : "");
        std::fflush(stdout);
        if (!o.pass) ++failed;
        if (o.pass == known) ++unexpected;
    }
    std::printf("%d/%zu criteria passed, %zu expected failure(s)\n", static_cast<int>(criteria.size()) - failed,
                criteria.size(), expected.size());
    return unexpected == 0 ? 0 : 1;
}
