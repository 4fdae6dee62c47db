#include "blochlab/laurent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

#include "blochlab/univariate.hpp"

namespace blochlab {

std::string CoeffTraits<Complex>::to_string(const Complex& c) {
    std::ostringstream os;
    os.precision(17);
    if (c.imag() == 0.0) {
        os << c.real();
    } else {
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    return os.str();
}

std::string variable_name(int dimension, int axis) {
    if (dimension == 1) return "z";
    if (dimension == 2) return axis == 0 ? "x" : "y";
    return "z" + std::to_string(axis + 1);
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::constant(int dimension, const C& c) {
    BasicLaurentPoly p(dimension);
    p.add_term(Exponent{std::vector<int>(dimension, 0), 0}, c);
    return p;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::monomial(int dimension, std::vector<int> z, int lambda_power, const C& c) {
    if (static_cast<int>(z.size()) != dimension) throw DimensionMismatch("exponent arity differs from dimension");
    if (lambda_power < 0) throw std::invalid_argument("negative lambda power");
    BasicLaurentPoly p(dimension);
    p.add_term(Exponent{std::move(z), lambda_power}, c);
    return p;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::variable(int dimension, int axis) {
    if (axis < 0 || axis >= dimension) throw std::out_of_range("variable axis out of range");
    std::vector<int> z(dimension, 0);
    z[axis] = 1;
    return monomial(dimension, std::move(z), 0, C(1));
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::lambda(int dimension) {
    return monomial(dimension, std::vector<int>(dimension, 0), 1, C(1));
}

template <class C>
void BasicLaurentPoly<C>::check_dim(const BasicLaurentPoly& o) const {
    if (dim_ != o.dim_)
        throw DimensionMismatch("Laurent polynomial dimensions differ: " + std::to_string(dim_) + " vs " +
                                std::to_string(o.dim_));
}

template <class C>
bool BasicLaurentPoly<C>::is_lambda_free() const {
    return terms_.empty() || terms_.rbegin()->first.lambda == 0;
}

template <class C>
int BasicLaurentPoly<C>::lambda_degree() const {
    return terms_.empty() ? -1 : terms_.rbegin()->first.lambda;
}

template <class C>
C BasicLaurentPoly<C>::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? C(0) : it->second;
}

template <class C>
void BasicLaurentPoly<C>::add_term(const Exponent& e, const C& c) {
    if (static_cast<int>(e.z.size()) != dim_) throw DimensionMismatch("exponent arity differs from dimension");
    if (CoeffTraits<C>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }
}

template <class C>
BasicLaurentPoly<C>& BasicLaurentPoly<C>::operator+=(const BasicLaurentPoly& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

template <class C>
BasicLaurentPoly<C>& BasicLaurentPoly<C>::operator-=(const BasicLaurentPoly& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

template <class C>
BasicLaurentPoly<C>& BasicLaurentPoly<C>::operator*=(const BasicLaurentPoly& o) {
    check_dim(o);
    BasicLaurentPoly out(dim_);
    Exponent e;
    e.z.resize(dim_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (int i = 0; i < dim_; ++i) e.z[i] = ea.z[i] + eb.z[i];
            e.lambda = ea.lambda + eb.lambda;
            out.add_term(e, ca * cb);
        }
    }
    terms_ = std::move(out.terms_);
    return *this;
}

template <class C>
BasicLaurentPoly<C>& BasicLaurentPoly<C>::operator*=(const C& c) {
    if (CoeffTraits<C>::is_zero(c)) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::operator-() const {
    BasicLaurentPoly r = *this;
    for (auto& [e, v] : r.terms_) v = -v;
    return r;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::pow(int exponent) const {
    if (exponent < 0) throw std::invalid_argument("negative power of a Laurent polynomial");
    BasicLaurentPoly result = constant(dim_, C(1));
    BasicLaurentPoly base = *this;
    while (exponent > 0) {
        if (exponent & 1) result *= base;
        exponent >>= 1;
        if (exponent) base *= base;
    }
    return result;
}

template <class C>
Complex BasicLaurentPoly<C>::evaluate(std::span<const Complex> z, Complex lambda) const {
    if (static_cast<int>(z.size()) != dim_) throw DimensionMismatch("evaluation point has wrong arity");
    for (const Complex& zi : z)
        if (zi == Complex(0.0, 0.0)) throw std::domain_error("evaluation at a zero coordinate");
    Complex acc = 0.0;
    for (const auto& [e, c] : terms_) {
        Complex t = CoeffTraits<C>::to_complex(c);
        for (int i = 0; i < dim_; ++i)
            if (e.z[i] != 0) t *= std::pow(z[i], e.z[i]);
        if (e.lambda != 0) t *= std::pow(lambda, e.lambda);
        acc += t;
    }
    return acc;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::euler_derivative(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::out_of_range("Euler derivative axis out of range");
    BasicLaurentPoly out(dim_);
    for (const auto& [e, c] : terms_)
        if (e.z[axis] != 0) out.terms_.emplace(e, c * C(e.z[axis]));
    return out;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::lambda_derivative() const {
    BasicLaurentPoly out(dim_);
    for (const auto& [e, c] : terms_) {
        if (e.lambda == 0) continue;
        Exponent f = e;
        --f.lambda;
        out.add_term(f, c * C(e.lambda));
    }
    return out;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::substitute_lambda(const C& lambda0) const {
    BasicLaurentPoly out(dim_);
    for (const auto& [e, c] : terms_) {
        C v = c;
        for (int k = 0; k < e.lambda; ++k) v *= lambda0;
        out.add_term(Exponent{e.z, 0}, v);
    }
    return out;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::shift_lambda(const C& shift) const {
    // (lambda - s)^m = sum_k binom(m,k) lambda^k (-s)^(m-k)
    BasicLaurentPoly out(dim_);
    C neg = -shift;
    for (const auto& [e, c] : terms_) {
        int m = e.lambda;
        std::vector<C> powers(m + 1, C(1));
        for (int k = 1; k <= m; ++k) powers[k] = powers[k - 1] * neg;
        long binom = 1;
        for (int k = 0; k <= m; ++k) {
            out.add_term(Exponent{e.z, k}, c * C(binom) * powers[m - k]);
            binom = binom * (m - k) / (k + 1);
        }
    }
    return out;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::reflect_conjugate() const {
    BasicLaurentPoly out(dim_);
    for (const auto& [e, c] : terms_) {
        Exponent f = e;
        for (int& v : f.z) v = -v;
        out.terms_.emplace(std::move(f), CoeffTraits<C>::conj(c));
    }
    return out;
}

template <class C>
BasicLaurentPoly<C> BasicLaurentPoly<C>::shift_z(std::span<const int> shift) const {
    if (static_cast<int>(shift.size()) != dim_) throw DimensionMismatch("shift arity differs from dimension");
    BasicLaurentPoly out(dim_);
    for (const auto& [e, c] : terms_) {
        Exponent f = e;
        for (int i = 0; i < dim_; ++i) f.z[i] += shift[i];
        out.terms_.emplace(std::move(f), c);
    }
    return out;
}

template <class C>
std::map<std::vector<int>, std::vector<C>> BasicLaurentPoly<C>::lambda_coefficients() const {
    std::map<std::vector<int>, std::vector<C>> out;
    for (const auto& [e, c] : terms_) {
        auto& v = out[e.z];
        if (static_cast<int>(v.size()) <= e.lambda) v.resize(e.lambda + 1, C(0));
        v[e.lambda] = c;
    }
    return out;
}

template <class C>
std::vector<int> BasicLaurentPoly<C>::min_exponents() const {
    if (terms_.empty()) return {};
    std::vector<int> out = terms_.begin()->first.z;
    for (const auto& [e, c] : terms_)
        for (int i = 0; i < dim_; ++i) out[i] = std::min(out[i], e.z[i]);
    return out;
}

template <class C>
std::vector<int> BasicLaurentPoly<C>::max_exponents() const {
    if (terms_.empty()) return {};
    std::vector<int> out = terms_.begin()->first.z;
    for (const auto& [e, c] : terms_)
        for (int i = 0; i < dim_; ++i) out[i] = std::max(out[i], e.z[i]);
    return out;
}

template <class C>
int BasicLaurentPoly<C>::span() const {
    auto lo = min_exponents(), hi = max_exponents();
    int s = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) s = std::max(s, hi[i] - lo[i]);
    return s;
}

template <class C>
BasicLaurentPoly<Complex> BasicLaurentPoly<C>::to_numeric() const {
    BasicLaurentPoly<Complex> out(dim_);
    for (const auto& [e, c] : terms_) out.add_term(e, CoeffTraits<C>::to_complex(c));
    return out;
}

template <class C>
std::string BasicLaurentPoly<C>::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        std::string mono;
        if (e.lambda == 1) mono = "λ";
        if (e.lambda > 1) mono = "λ^" + std::to_string(e.lambda);
        for (int i = 0; i < dim_; ++i) {
            if (e.z[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += variable_name(dim_, i);
            if (e.z[i] != 1) mono += "^" + std::to_string(e.z[i]);
        }
        std::string coeff = CoeffTraits<C>::to_string(c);
        bool negative = !coeff.empty() && coeff[0] == '-' &&
                        coeff.find_first_of("+-", 1) == std::string::npos;
        if (negative) coeff.erase(0, 1);
        if (coeff.find_first_of("+-", 1) != std::string::npos && coeff[0] != '(') coeff = "(" + coeff + ")";
        if (first)
            os << (negative ? "-" : "");
        else
            os << (negative ? " - " : " + ");
        first = false;
        if (mono.empty())
            os << coeff;
        else if (coeff == "1")
            os << mono;
        else
            os << coeff << "*" << mono;
    }
    return os.str();
}

template class BasicLaurentPoly<GaussianRational>;
template class BasicLaurentPoly<Complex>;

template <class C>
BasicLaurentMatrix<C> BasicLaurentMatrix<C>::minus_lambda() const {
    BasicLaurentMatrix out = *this;
    for (std::size_t i = 0; i < size_; ++i)
        out(i, i).add_term(Exponent{std::vector<int>(dim_, 0), 1}, C(-1));
    return out;
}

template <class C>
Eigen::MatrixXcd BasicLaurentMatrix<C>::evaluate(std::span<const Complex> z, Complex lambda) const {
    Eigen::MatrixXcd m(size_, size_);
    for (std::size_t r = 0; r < size_; ++r)
        for (std::size_t c = 0; c < size_; ++c) m(r, c) = (*this)(r, c).evaluate(z, lambda);
    return m;
}

template <class C>
BasicLaurentMatrix<Complex> BasicLaurentMatrix<C>::to_numeric() const {
    BasicLaurentMatrix<Complex> out(dim_, size_);
    for (std::size_t r = 0; r < size_; ++r)
        for (std::size_t c = 0; c < size_; ++c) out(r, c) = (*this)(r, c).to_numeric();
    return out;
}

template class BasicLaurentMatrix<GaussianRational>;
template class BasicLaurentMatrix<Complex>;

template <class C>
BasicLaurentPoly<C> determinant(const BasicLaurentMatrix<C>& m) {
    using Poly = BasicLaurentPoly<C>;
    const std::size_t n = m.size();
    if (n == 0) return Poly::constant(m.dimension(), C(1));
    if (n > 20) throw std::invalid_argument("determinant: matrix too large for subset expansion");
    // minors[S] = det of rows 0..|S|-1 restricted to the column set S.
    std::vector<Poly> minors(std::size_t(1) << n, Poly(m.dimension()));
    minors[0] = Poly::constant(m.dimension(), C(1));
    std::vector<std::uint32_t> order;
    for (std::uint32_t s = 1; s < (1u << n); ++s) order.push_back(s);
    std::stable_sort(order.begin(), order.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
    for (std::uint32_t s : order) {
        const std::size_t row = std::popcount(s) - 1;
        Poly acc(m.dimension());
        for (std::size_t c = 0; c < n; ++c) {
            if (!(s & (1u << c))) continue;
            const Poly& entry = m(row, c);
            const Poly& minor = minors[s & ~(1u << c)];
            if (entry.is_zero() || minor.is_zero()) continue;
            // Sign from the number of chosen columns to the right of c.
            int above = std::popcount(s >> (c + 1));
            Poly term = minor * entry;
            if (above % 2)
                acc -= term;
            else
                acc += term;
        }
        minors[s] = std::move(acc);
    }
    return minors[(1u << n) - 1];
}

template LaurentPoly determinant(const LaurentMatrix&);
template NumericPoly determinant(const NumericMatrix&);

UniPoly lambda_coefficient_gcd(const LaurentPoly& p) {
    if (p.is_zero()) throw std::invalid_argument("lambda_coefficient_gcd of the zero polynomial");
    UniPoly g;
    for (const auto& [n, coeffs] : p.lambda_coefficients()) {
        g = gcd(g, UniPoly(coeffs));
        if (g.degree() == 0) break;
    }
    return g;
}

LaurentPoly compose(std::span<const GaussianRational> coeffs, const LaurentPoly& g) {
    LaurentPoly acc(g.dimension());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc *= g;
        acc += LaurentPoly::constant(g.dimension(), *it);
    }
    return acc;
}

namespace {

// Solves A x = b exactly; rows are equations. Returns nullopt if inconsistent.
std::optional<std::vector<GaussianRational>> solve_exact(std::vector<std::vector<GaussianRational>> a,
                                                         std::vector<GaussianRational> b, std::size_t unknowns) {
    const std::size_t rows = a.size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < unknowns && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        GaussianRational inv = GaussianRational(1) / a[r][c];
        for (std::size_t k = c; k < unknowns; ++k) a[r][k] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            GaussianRational f = a[i][c];
            for (std::size_t k = c; k < unknowns; ++k) a[i][k] -= f * a[r][k];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (!b[i].is_zero()) return std::nullopt;
    std::vector<GaussianRational> x(unknowns);
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

}  // namespace

std::optional<std::vector<GaussianRational>> composite_rewrite(const LaurentPoly& p, const LaurentPoly& g) {
    if (p.dimension() != g.dimension()) throw DimensionMismatch("composite_rewrite: dimension mismatch");
    if (!p.is_lambda_free() || !g.is_lambda_free())
        throw std::invalid_argument("composite_rewrite: arguments must be lambda-free");
    const bool constant = std::all_of(g.terms().begin(), g.terms().end(), [](const auto& t) {
        return std::all_of(t.first.z.begin(), t.first.z.end(), [](int n) { return n == 0; });
    });
    if (g.is_zero() || constant) throw std::invalid_argument("composite_rewrite: g must be nonconstant");
    // A monomial has span 0 but its powers still move.
    const int span_g = std::max(g.span(), 1);
    const int max_degree = (p.span() + span_g - 1) / span_g + 2;

    std::vector<LaurentPoly> powers;
    powers.push_back(LaurentPoly::constant(g.dimension(), 1));
    for (int m = 1; m <= max_degree; ++m) powers.push_back(powers.back() * g);

    std::set<Exponent> support;
    for (const auto& [e, c] : p.terms()) support.insert(e);
    for (const auto& pw : powers)
        for (const auto& [e, c] : pw.terms()) support.insert(e);

    const std::size_t unknowns = powers.size();
    std::vector<std::vector<GaussianRational>> a;
    std::vector<GaussianRational> b;
    for (const Exponent& e : support) {
        std::vector<GaussianRational> row(unknowns);
        for (std::size_t m = 0; m < unknowns; ++m) row[m] = powers[m].coefficient(e);
        a.push_back(std::move(row));
        b.push_back(p.coefficient(e));
    }
    auto x = solve_exact(std::move(a), std::move(b), unknowns);
    if (!x) return std::nullopt;
    while (!x->empty() && x->back().is_zero()) x->pop_back();
    if (compose(*x, g) != p) return std::nullopt;
    return x;
}

}  // namespace blochlab
