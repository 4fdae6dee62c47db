#include "blochlab/floquet.hpp"

#include <cmath>
#include <map>

#include <Eigen/SVD>

namespace blochlab {

LaurentMatrix floquet_matrix(const OperatorSpec& spec) {
    if (!spec.is_graph()) return spec.direct().matrix;
    const auto& g = spec.graph();
    LaurentMatrix m(g.dimension, g.vertices.size());
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        m(i, i) += LaurentPoly::constant(g.dimension, g.vertices[i].potential);
    for (const auto& e : g.edges) {
        std::size_t v = g.vertex_index(e.to_vertex);
        std::size_t w = g.vertex_index(e.from_vertex);
        m(v, w).add_term(Exponent{e.offset, 0}, e.weight);
    }
    return m;
}

LaurentPoly dispersion(const OperatorSpec& spec) { return determinant(floquet_matrix(spec).minus_lambda()); }

BlochSymbol::BlochSymbol(const LaurentMatrix& m) : dim_(m.dimension()), n_(static_cast<int>(m.size())) {
    std::map<std::vector<int>, Eigen::MatrixXcd> by_offset;
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            for (const auto& [e, coeff] : m(r, c).terms()) {
                if (e.lambda != 0) throw std::invalid_argument("Bloch symbol entries must be lambda-free");
                auto [it, inserted] = by_offset.try_emplace(e.z, Eigen::MatrixXcd::Zero(n_, n_));
                it->second(r, c) += coeff.to_complex();
            }
    for (auto& [offset, coeff] : by_offset) terms_.push_back({offset, std::move(coeff)});
}

Eigen::MatrixXcd BlochSymbol::at(std::span<const Complex> z) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
    for (const auto& t : terms_) {
        Complex f = 1.0;
        for (int i = 0; i < dim_; ++i)
            if (t.offset[i]) f *= std::pow(z[i], t.offset[i]);
        out += f * t.coeff;
    }
    return out;
}

namespace {

Complex phase(std::span<const double> k, const std::vector<int>& offset) {
    double arg = 0.0;
    for (std::size_t i = 0; i < offset.size(); ++i) arg += offset[i] * k[i];
    return {std::cos(arg), std::sin(arg)};
}

}  // namespace

Eigen::MatrixXcd BlochSymbol::at_k(std::span<const double> k) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
    for (const auto& t : terms_) out += phase(k, t.offset) * t.coeff;
    return out;
}

Eigen::MatrixXcd BlochSymbol::dk(std::span<const double> k, int p) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
    for (const auto& t : terms_)
        if (t.offset[p]) out += (Complex(0.0, t.offset[p]) * phase(k, t.offset)) * t.coeff;
    return out;
}

Eigen::MatrixXcd BlochSymbol::dk2(std::span<const double> k, int p, int q) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
    for (const auto& t : terms_)
        if (t.offset[p] && t.offset[q])
            out -= (static_cast<double>(t.offset[p]) * t.offset[q] * phase(k, t.offset)) * t.coeff;
    return out;
}

double BlochSymbol::norm_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += Eigen::JacobiSVD<Eigen::MatrixXcd>(t.coeff).singularValues()(0);
    return s;
}

double BlochSymbol::lipschitz_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double len = 0.0;
        for (int o : t.offset) len += double(o) * o;
        if (len == 0.0) continue;
        s += std::sqrt(len) * Eigen::JacobiSVD<Eigen::MatrixXcd>(t.coeff).singularValues()(0);
    }
    return s;
}

// ---------------------------------------------------------------------------

RealSpaceWindow RealSpaceWindow::zeros(std::vector<int> lo, std::vector<int> hi, std::size_t cell_size) {
    if (lo.size() != hi.size()) throw WindowError("window bounds have different arity");
    RealSpaceWindow w{std::move(lo), std::move(hi), cell_size, {}};
    for (std::size_t i = 0; i < w.lo.size(); ++i)
        if (w.hi[i] < w.lo[i]) throw WindowError("window box is empty");
    w.values.assign(w.cell_count() * cell_size, Complex(0.0, 0.0));
    return w;
}

std::size_t RealSpaceWindow::cell_count() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) n *= static_cast<std::size_t>(std::max(0, hi[i] - lo[i] + 1));
    return n;
}

bool RealSpaceWindow::contains(std::span<const int> cell) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (cell[i] < lo[i] || cell[i] > hi[i]) return false;
    return true;
}

std::size_t RealSpaceWindow::cell_index(std::span<const int> cell) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (cell[i] < lo[i] || cell[i] > hi[i]) throw WindowError("cell outside window");
        idx = idx * (hi[i] - lo[i] + 1) + (cell[i] - lo[i]);
    }
    return idx;
}

std::vector<int> RealSpaceWindow::cell_at(std::size_t index) const {
    std::vector<int> cell(lo.size());
    for (std::size_t i = lo.size(); i-- > 0;) {
        const std::size_t extent = hi[i] - lo[i] + 1;
        cell[i] = lo[i] + static_cast<int>(index % extent);
        index /= extent;
    }
    return cell;
}

std::vector<int> operator_range(const OperatorSpec& spec) {
    std::vector<int> r(spec.dimension(), 0);
    auto widen = [&](const std::vector<int>& o) {
        for (std::size_t i = 0; i < o.size(); ++i) r[i] = std::max(r[i], std::abs(o[i]));
    };
    if (spec.is_graph()) {
        for (const auto& e : spec.graph().edges) widen(e.offset);
    } else {
        const BlochSymbol sym(spec.direct().matrix);
        for (const auto& t : sym.terms()) widen(t.offset);
    }
    return r;
}

RealSpaceWindow apply_operator(const OperatorSpec& spec, const RealSpaceWindow& f) {
    const int d = spec.dimension();
    if (f.dimension() != d) throw WindowError("window dimension does not match the operator");
    if (f.cell_size != spec.cell_size()) throw WindowError("window cell size does not match |W|");
    if (f.values.size() != f.cell_count() * f.cell_size) throw WindowError("window value count mismatch");
    const auto range = operator_range(spec);
    std::vector<int> lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = f.lo[i] + range[i];
        hi[i] = f.hi[i] - range[i];
        if (hi[i] < lo[i]) throw WindowError("window too small for the operator range");
    }
    RealSpaceWindow out = RealSpaceWindow::zeros(lo, hi, f.cell_size);
    std::vector<int> src(d);

    if (spec.is_graph()) {
        const auto& g = spec.graph();
        struct Resolved {
            std::size_t to, from;
            const std::vector<int>* offset;
            Complex weight;
        };
        std::vector<Resolved> edges;
        for (const auto& e : g.edges)
            edges.push_back({g.vertex_index(e.to_vertex), g.vertex_index(e.from_vertex), &e.offset, e.weight.to_complex()});
        std::vector<Complex> potential;
        for (const auto& v : g.vertices) potential.push_back(v.potential.to_complex());

        for (std::size_t ci = 0; ci < out.cell_count(); ++ci) {
            const auto cell = out.cell_at(ci);
            for (std::size_t v = 0; v < f.cell_size; ++v)
                out.values[ci * f.cell_size + v] = potential[v] * f.at(cell, v);
            for (const auto& e : edges) {
                for (int i = 0; i < d; ++i) src[i] = cell[i] + (*e.offset)[i];
                out.values[ci * f.cell_size + e.to] += e.weight * f.at(src, e.from);
            }
        }
        return out;
    }

    const BlochSymbol sym(spec.direct().matrix);
    const int n = sym.size();
    for (std::size_t ci = 0; ci < out.cell_count(); ++ci) {
        const auto cell = out.cell_at(ci);
        for (const auto& t : sym.terms()) {
            for (int i = 0; i < d; ++i) src[i] = cell[i] + t.offset[i];
            for (int v = 0; v < n; ++v)
                for (int w = 0; w < n; ++w)
                    if (t.coeff(v, w) != Complex(0.0, 0.0)) out.values[ci * n + v] += t.coeff(v, w) * f.at(src, w);
        }
    }
    return out;
}

RealSpaceWindow QuasiPeriodicMode::sample(std::vector<int> lo, std::vector<int> hi) const {
    RealSpaceWindow out = RealSpaceWindow::zeros(std::move(lo), std::move(hi), amplitude.size());
    for (std::size_t ci = 0; ci < out.cell_count(); ++ci) {
        const auto cell = out.cell_at(ci);
        Complex f = 1.0;
        for (std::size_t i = 0; i < cell.size(); ++i) f *= std::pow(weight[i], cell[i]);
        for (Eigen::Index w = 0; w < amplitude.size(); ++w) out.values[ci * out.cell_size + w] = amplitude(w) * f;
    }
    return out;
}

ModeResult floquet_mode(const OperatorSpec& spec, std::span<const Complex> zeta, Complex lambda,
                        std::optional<double> tol) {
    if (static_cast<int>(zeta.size()) != spec.dimension()) throw DimensionMismatch("Floquet multiplier arity");
    const LaurentMatrix fm = floquet_matrix(spec);
    const Eigen::MatrixXcd a = fm.evaluate(zeta);
    const int n = static_cast<int>(a.rows());
    ModeResult res;
    // Term-wise scale sum_o ||A_o|| |zeta^o|: unlike ||A(zeta)|| it does not
    // collapse where A(zeta) itself is small (e.g. at Dirac points).
    double scale = 0.0;
    const BlochSymbol sym(fm);
    for (const auto& t : sym.terms()) {
        double m = Eigen::JacobiSVD<Eigen::MatrixXcd>(t.coeff).singularValues()(0);
        for (std::size_t i = 0; i < zeta.size(); ++i) m *= std::pow(std::abs(zeta[i]), t.offset[i]);
        scale += m;
    }
    res.tolerance = tol.value_or(scale > 0.0 ? 1e-8 * scale : 1e-8);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - lambda * Eigen::MatrixXcd::Identity(n, n), Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    for (int i = 0; i < n; ++i) {
        res.singular_values.push_back(s(i));
        if (s(i) <= res.tolerance) ++res.kernel_dimension;
    }
    res.abs_dispersion = std::abs(determinant(fm.minus_lambda()).evaluate(zeta, lambda));
    if (s(n - 1) <= res.tolerance) {
        QuasiPeriodicMode mode;
        mode.weight.assign(zeta.begin(), zeta.end());
        mode.amplitude = svd.matrixV().col(n - 1);
        res.mode = std::move(mode);
    }
    return res;
}

}  // namespace blochlab
