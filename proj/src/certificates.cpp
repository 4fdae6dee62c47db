#include "blochlab/certificates.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "blochlab/floquet.hpp"
#include "blochlab/univariate.hpp"

namespace blochlab {

std::string to_string(CertificateKind k) { return k == CertificateKind::Exact ? "exact" : "numeric"; }

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Symmetry: return "symmetry";
        case Provenance::Multilayer: return "multilayer";
        case Provenance::Composite: return "composite";
        case Provenance::Flatband: return "flatband";
    }
    return "unknown";
}

std::size_t FactorizationCertificate::factor_count() const {
    std::size_t n = 0;
    for (const auto& f : factors)
        if (!f.unit) n += static_cast<std::size_t>(f.multiplicity);
    return n;
}

NumericPoly FactorizationCertificate::numeric_product() const {
    NumericPoly prod = NumericPoly::constant(target.dimension(), 1.0);
    for (const auto& f : factors) prod *= f.numeric.pow(f.multiplicity);
    return prod;
}

std::optional<LaurentPoly> FactorizationCertificate::exact_product() const {
    LaurentPoly prod = LaurentPoly::constant(target.dimension(), 1);
    for (const auto& f : factors) {
        if (!f.exact) return std::nullopt;
        prod *= f.exact->pow(f.multiplicity);
    }
    return prod;
}

namespace {

Factor exact_factor(LaurentPoly p, int multiplicity = 1, bool unit = false) {
    Factor f;
    f.numeric = p.to_numeric();
    f.exact = std::move(p);
    f.multiplicity = multiplicity;
    f.unit = unit;
    return f;
}

Factor numeric_factor(NumericPoly p, int multiplicity = 1, bool unit = false) {
    Factor f;
    f.numeric = std::move(p);
    f.multiplicity = multiplicity;
    f.unit = unit;
    return f;
}

// Deterministic per-purpose stream so construction and validation points differ.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose) {
    std::seed_seq seq{seed, purpose, std::uint64_t{0x626c6f63}};
    return std::mt19937_64(seq);
}

std::vector<Complex> random_torus_point(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<Complex> z(d);
    for (auto& v : z) v = std::polar(1.0, angle(rng));
    return z;
}

void check_exact(const FactorizationCertificate& cert) {
    auto prod = cert.exact_product();
    if (!prod || !(*prod == cert.target)) throw CertificateError("exact certificate does not re-expand to the target");
}

// Finalizes a certificate: exact ones are re-expanded, numeric ones validated.
FactorizationCertificate finish(FactorizationCertificate cert, const CertificateOptions& opts) {
    cert.residual = validate_factors(cert.target, cert.factors, opts);
    if (cert.kind == CertificateKind::Exact) {
        check_exact(cert);
    } else if (!(cert.residual.max_relative < opts.tolerance)) {
        std::ostringstream msg;
        msg << "numeric certificate residual " << cert.residual.max_relative << " exceeds " << opts.tolerance;
        throw CertificateError(msg.str());
    }
    return cert;
}

// Rounds numeric coefficients to nearby rationals; nullopt if any fails.
std::optional<LaurentPoly> rationalize_poly(const NumericPoly& p) {
    LaurentPoly out(p.dimension());
    for (const auto& [e, c] : p.terms()) {
        auto q = rationalize(c, 1000000, 1e-9 * std::max(1.0, std::abs(c)));
        if (!q) return std::nullopt;
        out.add_term(e, *q);
    }
    return out;
}

NumericPoly prune(const NumericPoly& p, double rel) {
    double scale = 0.0;
    for (const auto& [e, c] : p.terms()) scale = std::max(scale, std::abs(c));
    NumericPoly out(p.dimension());
    for (const auto& [e, c] : p.terms()) {
        Complex v = c;
        if (std::abs(v.real()) <= rel * scale) v.real(0.0);
        if (std::abs(v.imag()) <= rel * scale) v.imag(0.0);
        if (v != Complex(0.0, 0.0)) out.add_term(e, v);
    }
    return out;
}

Eigen::MatrixXcd to_eigen(const RationalMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (static_cast<Eigen::Index>(m[r].size()) != n) throw CertificateError("matrix is not square");
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m[r][c].to_complex();
    }
    return out;
}

}  // namespace

ResidualStats validate_factors(const LaurentPoly& target, const std::vector<Factor>& factors,
                               const CertificateOptions& opts) {
    const int d = target.dimension();
    auto rng = stream(opts.seed, 2);
    std::uniform_real_distribution<double> log_radius(std::log(0.5), std::log(2.0));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const NumericPoly t = target.to_numeric();

    ResidualStats stats;
    stats.samples = opts.samples;
    stats.tolerance = opts.tolerance;
    stats.seed = opts.seed;
    double sum = 0.0;
    std::vector<Complex> z(d);
    for (std::size_t s = 0; s < opts.samples; ++s) {
        for (auto& v : z) v = std::polar(std::exp(log_radius(rng)), angle(rng));
        const Complex lambda = std::polar(2.0 * unit(rng), angle(rng));
        double scale = 0.0;
        for (const auto& [e, c] : t.terms()) {
            double m = std::abs(c) * std::pow(std::abs(lambda), e.lambda);
            for (int i = 0; i < d; ++i) m *= std::pow(std::abs(z[i]), e.z[i]);
            scale += m;
        }
        Complex prod = 1.0;
        for (const auto& f : factors) prod *= std::pow(f.numeric.evaluate(z, lambda), f.multiplicity);
        const Complex diff = t.evaluate(z, lambda) - prod;
        const double rel = scale > 0.0 ? std::abs(diff) / scale : std::abs(diff);
        stats.max_relative = std::max(stats.max_relative, rel);
        sum += rel;
    }
    stats.mean_relative = opts.samples ? sum / static_cast<double>(opts.samples) : 0.0;
    return stats;
}

FactorizationCertificate symmetry_factorize(const OperatorSpec& spec, const Eigen::MatrixXcd& u,
                                            const CertificateOptions& opts) {
    const auto n = static_cast<Eigen::Index>(spec.cell_size());
    const int d = spec.dimension();
    if (u.rows() != n || u.cols() != n) throw CertificateError("U must be |W| x |W|");
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm() > opts.commute_tol)
        throw CertificateError("U is not unitary");

    const LaurentMatrix fm = floquet_matrix(spec);
    const BlochSymbol sym(fm);
    auto rng = stream(opts.seed, 1);
    for (int s = 0; s < 20; ++s) {
        const auto z = random_torus_point(rng, d);
        const Eigen::MatrixXcd a = sym.at(z);
        const double err = (u * a - a * u).norm();
        if (err > opts.commute_tol * std::max(1.0, a.norm())) {
            std::ostringstream msg;
            msg << "U does not commute with A(zeta) at zeta = (";
            for (int i = 0; i < d; ++i) msg << (i ? ", " : "") << z[i].real() << (z[i].imag() < 0 ? "" : "+") << z[i].imag() << "i";
            msg << "); ||UA - AU|| = " << err;
            throw CertificateError(msg.str());
        }
    }

    // U is normal, so its Schur form is diagonal and the Schur vectors are an
    // orthonormal eigenbasis; group them by eigenvalue.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
    const Eigen::MatrixXcd q = schur.matrixU();
    const Eigen::VectorXcd ev = schur.matrixT().diagonal();
    std::vector<std::vector<Eigen::Index>> groups;
    std::vector<Complex> group_value;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t g = 0;
        while (g < groups.size() && std::abs(group_value[g] - ev(i)) > 1e-8) ++g;
        if (g == groups.size()) {
            groups.emplace_back();
            group_value.push_back(ev(i));
        }
        groups[g].push_back(i);
    }

    FactorizationCertificate cert;
    cert.provenance = Provenance::Symmetry;
    cert.target = dispersion(spec);
    for (const auto& g : groups) {
        Eigen::MatrixXcd basis(n, static_cast<Eigen::Index>(g.size()));
        for (std::size_t c = 0; c < g.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = q.col(g[c]);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
        const Eigen::MatrixXcd b = qr.householderQ() * Eigen::MatrixXcd::Identity(n, basis.cols());

        // Block Q* A(z) Q as a Laurent matrix.
        const auto k = static_cast<std::size_t>(b.cols());
        NumericMatrix block(d, k);
        for (const auto& t : sym.terms()) {
            const Eigen::MatrixXcd bt = b.adjoint() * t.coeff * b;
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    if (std::abs(bt(r, c)) > 1e-14) block(r, c).add_term(Exponent{t.offset, 0}, bt(r, c));
        }
        cert.factors.push_back(numeric_factor(prune(determinant(block.minus_lambda()), 1e-11)));
    }

    // Exact upgrade when every factor rounds to rationals reproducing D.
    bool all_exact = true;
    for (auto& f : cert.factors) {
        f.exact = rationalize_poly(f.numeric);
        all_exact = all_exact && f.exact.has_value();
    }
    if (all_exact) {
        auto prod = cert.exact_product();
        all_exact = prod && *prod == cert.target;
    }
    if (all_exact) {
        cert.kind = CertificateKind::Exact;
        for (auto& f : cert.factors) f.numeric = f.exact->to_numeric();
    } else {
        cert.kind = CertificateKind::Numeric;
        for (auto& f : cert.factors) f.exact.reset();
    }
    return finish(std::move(cert), opts);
}

FactorizationCertificate symmetry_factorize(const OperatorSpec& spec, const RationalMatrix& u,
                                            const CertificateOptions& opts) {
    return symmetry_factorize(spec, to_eigen(u), opts);
}

FactorizationCertificate multilayer_factorize(const OperatorSpec& base, const RationalMatrix& coupling,
                                              const CertificateOptions& opts) {
    const OperatorSpec layered = build_multilayer(base, coupling);
    const std::size_t s = coupling.size();
    LaurentMatrix k(0, s);
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) k(r, c) = LaurentPoly::constant(0, coupling[r][c]);
    const UniPoly charpoly = to_unipoly_in_lambda(determinant(k.minus_lambda()));
    const auto roots = roots_with_multiplicity(charpoly);

    FactorizationCertificate cert;
    cert.provenance = Provenance::Multilayer;
    cert.target = dispersion(layered);
    const LaurentPoly d_base = dispersion(base);
    const bool rational = std::all_of(roots.begin(), roots.end(), [](const PolyRoot& r) { return r.exact.has_value(); });
    if (rational) {
        cert.kind = CertificateKind::Exact;
        for (const auto& r : roots) cert.factors.push_back(exact_factor(d_base.shift_lambda(*r.exact), r.multiplicity));
    } else {
        cert.kind = CertificateKind::Numeric;
        // Hermitian K: eigenvalues from the self-adjoint solver are more
        // accurate than companion roots.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(coupling));
        const NumericPoly nb = d_base.to_numeric();
        std::vector<std::pair<double, int>> grouped;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double mu = es.eigenvalues()(i);
            if (!grouped.empty() && std::abs(grouped.back().first - mu) < 1e-9 * std::max(1.0, std::abs(mu)))
                ++grouped.back().second;
            else
                grouped.emplace_back(mu, 1);
        }
        for (const auto& [mu, m] : grouped) cert.factors.push_back(numeric_factor(nb.shift_lambda(Complex(mu, 0.0)), m));
    }
    return finish(std::move(cert), opts);
}

CompositeResult composite_factorize(const OperatorSpec& spec, const GaussianRational& lambda0, const LaurentPoly& g,
                                    const CertificateOptions& opts) {
    CompositeResult res;
    const int d = spec.dimension();
    if (g.dimension() != d) throw DimensionMismatch("composite variable has the wrong dimension");
    const LaurentPoly p = dispersion(spec).substitute_lambda(lambda0);
    if (p.is_zero()) {
        res.failure = "D(z, lambda0) vanishes identically (flat band)";
        return res;
    }
    res.monomial_shift.assign(d, 0);
    auto coeffs = composite_rewrite(p, g);
    if (!coeffs) {
        // Retry with the monomial normalization z^-min(exponents) p.
        const auto lo = p.min_exponents();
        for (int i = 0; i < d; ++i) res.monomial_shift[i] = -lo[i];
        coeffs = composite_rewrite(p.shift_z(res.monomial_shift), g);
    }
    if (!coeffs) {
        res.failure = "D(z, lambda0) is not a polynomial in g";
        return res;
    }
    while (!coeffs->empty() && coeffs->back().is_zero()) coeffs->pop_back();
    res.composite_coefficients = *coeffs;

    const UniPoly poly(*coeffs);
    const auto roots = roots_with_multiplicity(poly);
    std::vector<int> unshift(d);
    for (int i = 0; i < d; ++i) unshift[i] = -res.monomial_shift[i];

    FactorizationCertificate cert;
    cert.provenance = Provenance::Composite;
    cert.target = p;
    const bool rational = std::all_of(roots.begin(), roots.end(), [](const PolyRoot& r) { return r.exact.has_value(); });
    const LaurentPoly unit = LaurentPoly::monomial(d, unshift, 0, poly.leading());
    cert.factors.push_back(exact_factor(unit, 1, true));
    if (rational) {
        cert.kind = CertificateKind::Exact;
        for (const auto& r : roots)
            cert.factors.push_back(exact_factor(g - LaurentPoly::constant(d, *r.exact), r.multiplicity));
    } else {
        cert.kind = CertificateKind::Numeric;
        const NumericPoly ng = g.to_numeric();
        for (const auto& r : roots)
            cert.factors.push_back(numeric_factor(ng - NumericPoly::constant(d, r.value), r.multiplicity));
    }
    res.certificate = finish(std::move(cert), opts);
    return res;
}

std::optional<FactorizationCertificate> flatband_factorize(const OperatorSpec& spec) {
    const LaurentPoly dd = dispersion(spec);
    const UniPoly f = lambda_coefficient_gcd(dd);
    if (f.degree() < 1) return std::nullopt;
    const int d = spec.dimension();
    LaurentPoly quotient(d);
    for (const auto& [n, coeffs] : dd.lambda_coefficients()) {
        auto [q, rem] = UniPoly(coeffs).divmod(f);
        if (!rem.is_zero()) throw CertificateError("flat-band factor does not divide D");
        for (std::size_t m = 0; m < q.coeffs().size(); ++m)
            quotient.add_term(Exponent{n, static_cast<int>(m)}, q.coeffs()[m]);
    }
    LaurentPoly fl(d);
    for (std::size_t m = 0; m < f.coeffs().size(); ++m)
        fl.add_term(Exponent{std::vector<int>(d, 0), static_cast<int>(m)}, f.coeffs()[m]);

    FactorizationCertificate cert;
    cert.kind = CertificateKind::Exact;
    cert.provenance = Provenance::Flatband;
    cert.target = dd;
    cert.factors.push_back(exact_factor(fl));
    cert.factors.push_back(exact_factor(quotient));
    CertificateOptions opts;
    return finish(std::move(cert), opts);
}

}  // namespace blochlab
