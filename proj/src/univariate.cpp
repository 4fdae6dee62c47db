#include "blochlab/univariate.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace blochlab {

UniPoly::UniPoly(std::vector<GaussianRational> coeffs) : c_(std::move(coeffs)) { trim(); }

UniPoly UniPoly::linear_root(const GaussianRational& root) { return UniPoly({-root, GaussianRational(1)}); }

void UniPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

UniPoly UniPoly::monic() const {
    if (is_zero()) return *this;
    std::vector<GaussianRational> out = c_;
    GaussianRational lc = c_.back();
    for (auto& c : out) c /= lc;
    return UniPoly(std::move(out));
}

GaussianRational UniPoly::evaluate(const GaussianRational& t) const {
    GaussianRational acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Complex UniPoly::evaluate(Complex t) const {
    Complex acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + it->to_complex();
    return acc;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<GaussianRational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return UniPoly(std::move(out));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) {
    std::vector<GaussianRational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] -= b.c_[i];
    return UniPoly(std::move(out));
}

std::pair<UniPoly, UniPoly> UniPoly::divmod(const UniPoly& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<GaussianRational> rem = c_;
    int dd = divisor.degree();
    if (degree() < dd) return {UniPoly(), *this};
    std::vector<GaussianRational> quot(degree() - dd + 1);
    const GaussianRational& lc = divisor.leading();
    for (int k = degree() - dd; k >= 0; --k) {
        GaussianRational q = rem[k + dd] / lc;
        if (q.is_zero()) continue;
        quot[k] = q;
        for (int j = 0; j <= dd; ++j) rem[k + j] -= q * divisor.c_[j];
    }
    return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

std::vector<Complex> UniPoly::numeric_roots() const {
    int n = degree();
    if (n < 1) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    Complex lc = leading().to_complex();
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c_[i].to_complex() / lc;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

std::string UniPoly::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        if (c_[k].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[k].to_string() << ")";
        if (k >= 1) os << "*" << var;
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = x.divmod(y).second;
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

std::vector<PolyRoot> roots_with_multiplicity(const UniPoly& p) {
    std::vector<PolyRoot> out;
    if (p.degree() < 1) return out;
    UniPoly rest = p;
    for (Complex r : p.numeric_roots()) {
        if (rest.degree() < 1) break;
        // Rounding tolerance scales with root magnitude; multiple roots blur
        // the companion eigenvalues, so accept a loose match and verify exactly.
        double tol = 1e-5 * std::max(1.0, std::abs(r));
        auto cand = rationalize(r, 10000, tol);
        if (!cand) continue;
        if (std::any_of(out.begin(), out.end(), [&](const PolyRoot& pr) { return pr.exact && *pr.exact == *cand; }))
            continue;
        UniPoly lin = UniPoly::linear_root(*cand);
        int mult = 0;
        while (rest.degree() >= 1) {
            auto [q, rem] = rest.divmod(lin);
            if (!rem.is_zero()) break;
            rest = std::move(q);
            ++mult;
        }
        if (mult > 0) out.push_back({cand->to_complex(), *cand, mult});
    }
    // Remaining irrational or high-height roots, grouped numerically.
    for (Complex r : rest.numeric_roots()) {
        auto it = std::find_if(out.begin(), out.end(), [&](const PolyRoot& pr) {
            return !pr.exact && std::abs(pr.value - r) < 1e-6 * std::max(1.0, std::abs(r));
        });
        if (it != out.end())
            ++it->multiplicity;
        else
            out.push_back({r, std::nullopt, 1});
    }
    std::sort(out.begin(), out.end(), [](const PolyRoot& a, const PolyRoot& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
    });
    return out;
}

UniPoly to_unipoly_in_lambda(const LaurentPoly& p) {
    std::vector<GaussianRational> c(std::max(0, p.lambda_degree() + 1));
    for (const auto& [e, coeff] : p.terms()) {
        for (int v : e.z)
            if (v != 0) throw std::invalid_argument("polynomial depends on z; not univariate in lambda");
        c[e.lambda] += coeff;
    }
    return UniPoly(std::move(c));
}

}  // namespace blochlab
