#include "blochlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace blochlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t total_points(const std::vector<int>& res) {
    std::size_t n = 1;
    for (int g : res) n *= static_cast<std::size_t>(g);
    return n;
}

}  // namespace

std::vector<int> BandGrid::index_of(std::size_t point) const {
    std::vector<int> idx(resolution.size());
    for (std::size_t i = resolution.size(); i-- > 0;) {
        idx[i] = static_cast<int>(point % resolution[i]);
        point /= resolution[i];
    }
    return idx;
}

std::size_t BandGrid::point_at(std::span<const int> index) const {
    std::size_t p = 0;
    for (std::size_t i = 0; i < resolution.size(); ++i) {
        int g = resolution[i];
        int m = ((index[i] % g) + g) % g;
        p = p * g + m;
    }
    return p;
}

std::vector<double> BandGrid::k_of(std::size_t point) const {
    auto idx = index_of(point);
    std::vector<double> k(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) k[i] = kTwoPi * idx[i] / resolution[i];
    return k;
}

double BandGrid::min_energy() const { return *std::min_element(energies.begin(), energies.end()); }
double BandGrid::max_energy() const { return *std::max_element(energies.begin(), energies.end()); }

BandGrid band_grid(const OperatorSpec& spec, std::vector<int> resolution) {
    if (static_cast<int>(resolution.size()) != spec.dimension())
        throw SpectrumError("resolution arity does not match the dimension");
    for (int g : resolution)
        if (g < 2) throw SpectrumError("resolution must be at least 2 per axis");
    if (!spec.is_self_adjoint()) throw SpectrumError("band grid requires a self-adjoint operator");

    const BlochSymbol sym(spec);
    BandGrid grid;
    grid.resolution = std::move(resolution);
    grid.bands = spec.cell_size();
    const std::size_t n = total_points(grid.resolution);
    grid.energies.resize(n * grid.bands);
    grid.gaps.resize(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    for (std::size_t p = 0; p < n; ++p) {
        const auto k = grid.k_of(p);
        solver.compute(sym.at_k(k), Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid.bands; ++j) {
            grid.energies[p * grid.bands + j] = ev(j);
            if (j > 0) gap = std::min(gap, ev(j) - ev(j - 1));
        }
        grid.gaps[p] = gap;
    }
    return grid;
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi; });
    std::vector<Interval> out;
    for (const auto& iv : intervals) {
        if (!out.empty() && iv.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

int root_multiplicity(const UniPoly& p, const GaussianRational& root) {
    if (p.is_zero()) return 0;
    UniPoly lin = UniPoly::linear_root(root), rest = p;
    int m = 0;
    while (rest.degree() >= 1) {
        auto [q, r] = rest.divmod(lin);
        if (!r.is_zero()) break;
        rest = std::move(q);
        ++m;
    }
    return m;
}

SpectralReport spectral_report(const BandGrid& grid, const OperatorSpec& spec) {
    SpectralReport rep;
    rep.resolution = grid.resolution;
    for (std::size_t j = 0; j < grid.bands; ++j) {
        Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (std::size_t p = 0; p < grid.point_count(); ++p) {
            iv.lo = std::min(iv.lo, grid.energy(p, j));
            iv.hi = std::max(iv.hi, grid.energy(p, j));
        }
        rep.bands.push_back(iv);
    }
    rep.spectrum = merge_intervals(rep.bands);

    const UniPoly f = lambda_coefficient_gcd(dispersion(spec));
    for (const auto& root : roots_with_multiplicity(f)) {
        FlatBand fb{root.value, root.exact, root.multiplicity, {}};
        const double e = root.value.real();
        const double tol = 1e-12 * std::max(1.0, std::abs(e));
        for (std::size_t j = 0; j < grid.bands; ++j) {
            bool constant = true;
            for (std::size_t p = 0; p < grid.point_count() && constant; ++p)
                constant = std::abs(grid.energy(p, j) - e) <= tol;
            if (constant) fb.grid_bands.push_back(j);
        }
        rep.flat_bands.push_back(std::move(fb));
    }
    return rep;
}

EigenvalueCertificate eigenvalue_test(const OperatorSpec& spec, const GaussianRational& lambda0) {
    const LaurentPoly d = dispersion(spec);
    EigenvalueCertificate cert;
    cert.residual = d.substitute_lambda(lambda0);
    cert.is_eigenvalue = cert.residual.is_zero();
    cert.multiplicity = root_multiplicity(lambda_coefficient_gcd(d), lambda0);
    return cert;
}

double DensityOfStates::total() const {
    long double s = 0.0L;
    for (double m : mass) s += m;
    return static_cast<double>(s);
}

namespace {

// Distributes `weight` over the bins according to a CDF supported on [a, b].
template <class Cdf>
void deposit(std::vector<long double>& acc, double lo, double width, double a, double b, long double weight, Cdf cdf) {
    const auto nbins = static_cast<long>(acc.size());
    auto bin_of = [&](double e) {
        long i = static_cast<long>(std::floor((e - lo) / width));
        return std::clamp(i, 0L, nbins - 1);
    };
    const double hi = lo + width * static_cast<double>(nbins);
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (b - a <= 1e-14 * scale) {
        const double e = 0.5 * (a + b);
        if (e >= lo - 1e-14 * scale && e <= hi + 1e-14 * scale) acc[bin_of(e)] += weight;
        return;
    }
    // Mass outside [lo, hi] is dropped.
    const long first = bin_of(a), last = bin_of(b);
    for (long i = first; i <= last; ++i) {
        const double lower = lo + static_cast<double>(i) * width;
        const double upper = (i == nbins - 1) ? hi : lo + static_cast<double>(i + 1) * width;
        const double c1 = lower <= a ? 0.0 : cdf(lower);
        const double c2 = upper >= b ? 1.0 : cdf(upper);
        if (c2 > c1) acc[i] += weight * (c2 - c1);
    }
}

}  // namespace

DensityOfStates density_of_states(const BandGrid& grid, std::size_t bins, std::optional<Interval> range,
                                  DosMethod method) {
    if (bins == 0) throw SpectrumError("density of states needs at least one bin");
    DensityOfStates dos;
    dos.method = method;
    Interval r = range.value_or(Interval{grid.min_energy(), grid.max_energy()});
    if (r.hi <= r.lo) r = {r.lo - 0.5, r.lo + 0.5};
    dos.lo = r.lo;
    dos.hi = r.hi;
    const double width = (r.hi - r.lo) / static_cast<double>(bins);
    std::vector<long double> acc(bins, 0.0L);
    const std::size_t npts = grid.point_count();
    const int d = grid.dimension();
    if (d > 2) dos.method = method = DosMethod::Histogram;

    auto in_range = [&](double e) { return e >= r.lo && e <= r.hi; };

    if (method == DosMethod::Histogram) {
        const long double w = 1.0L / (static_cast<long double>(grid.bands) * npts);
        for (double e : grid.energies) {
            if (!in_range(e)) continue;
            auto i = std::min<std::size_t>(bins - 1, static_cast<std::size_t>(std::floor((e - r.lo) / width)));
            acc[i] += w;
        }
    } else if (d == 1) {
        const int g = grid.resolution[0];
        const long double w = 1.0L / (static_cast<long double>(grid.bands) * g);
        for (int m = 0; m < g; ++m) {
            const std::size_t p0 = m, p1 = (m + 1) % g;
            for (std::size_t j = 0; j < grid.bands; ++j) {
                double a = grid.energy(p0, j), b = grid.energy(p1, j);
                if (a > b) std::swap(a, b);
                deposit(acc, r.lo, width, a, b, w, [&](double e) { return (e - a) / (b - a); });
            }
        }
    } else {
        const int g0 = grid.resolution[0], g1 = grid.resolution[1];
        const long double w = 1.0L / (2.0L * grid.bands * g0 * g1);
        for (int i0 = 0; i0 < g0; ++i0)
            for (int i1 = 0; i1 < g1; ++i1) {
                const int c00[2] = {i0, i1}, c10[2] = {i0 + 1, i1}, c11[2] = {i0 + 1, i1 + 1}, c01[2] = {i0, i1 + 1};
                const std::size_t p00 = grid.point_at(c00), p10 = grid.point_at(c10), p11 = grid.point_at(c11),
                                  p01 = grid.point_at(c01);
                const std::size_t tris[2][3] = {{p00, p10, p11}, {p00, p11, p01}};
                for (const auto& tri : tris)
                    for (std::size_t j = 0; j < grid.bands; ++j) {
                        double e[3] = {grid.energy(tri[0], j), grid.energy(tri[1], j), grid.energy(tri[2], j)};
                        std::sort(e, e + 3);
                        const double e1 = e[0], e2 = e[1], e3 = e[2];
                        // CDF of a linear function on a uniform triangle.
                        auto cdf = [=](double x) {
                            if (x <= e1) return 0.0;
                            if (x >= e3) return 1.0;
                            if (x < e2) return (x - e1) * (x - e1) / ((e2 - e1) * (e3 - e1));
                            return 1.0 - (e3 - x) * (e3 - x) / ((e3 - e1) * (e3 - e2));
                        };
                        deposit(acc, r.lo, width, e1, e3, w, cdf);
                    }
            }
    }
    dos.mass.assign(acc.begin(), acc.end());
    return dos;
}

namespace {

// u(n) for n in the output box from the grid solution uhat.
RealSpaceWindow inverse_transform(const std::vector<int>& res, const std::vector<Eigen::VectorXcd>& uhat,
                                  std::size_t cell_size, const std::vector<int>& lo, const std::vector<int>& hi) {
    const int d = static_cast<int>(res.size());
    RealSpaceWindow out = RealSpaceWindow::zeros(lo, hi, cell_size);
    std::vector<std::vector<Complex>> twiddle(d);
    for (int i = 0; i < d; ++i) {
        twiddle[i].resize(res[i]);
        for (int m = 0; m < res[i]; ++m) twiddle[i][m] = std::polar(1.0, kTwoPi * m / res[i]);
    }
    const std::size_t npts = uhat.size();
    const double norm = 1.0 / static_cast<double>(npts);
    std::vector<int> idx(d);
    for (std::size_t ci = 0; ci < out.cell_count(); ++ci) {
        const auto cell = out.cell_at(ci);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(cell_size);
        for (std::size_t p = 0; p < npts; ++p) {
            std::size_t rest = p;
            Complex ph = 1.0;
            for (int i = d - 1; i >= 0; --i) {
                int m = static_cast<int>(rest % res[i]);
                rest /= res[i];
                long long prod = static_cast<long long>(m) * cell[i];
                int r = static_cast<int>(((prod % res[i]) + res[i]) % res[i]);
                ph *= twiddle[i][r];
            }
            acc += ph * uhat[p];
        }
        for (std::size_t w = 0; w < cell_size; ++w) out.values[ci * cell_size + w] = acc(w) * norm;
    }
    return out;
}

struct GridSolve {
    std::vector<Eigen::VectorXcd> uhat;
    double min_abs_det = std::numeric_limits<double>::infinity();
    double min_sv = std::numeric_limits<double>::infinity();
};

GridSolve solve_on_grid(const BlochSymbol& sym, const RealSpaceWindow& f, Complex lambda, const std::vector<int>& res) {
    const int d = static_cast<int>(res.size());
    const std::size_t n = f.cell_size;
    BandGrid shape;
    shape.resolution = res;
    const std::size_t npts = total_points(res);
    GridSolve gs;
    gs.uhat.resize(npts);
    std::vector<std::pair<std::vector<int>, Eigen::VectorXcd>> sources;
    for (std::size_t ci = 0; ci < f.cell_count(); ++ci) {
        Eigen::VectorXcd v(n);
        bool nonzero = false;
        for (std::size_t w = 0; w < n; ++w) {
            v(w) = f.values[ci * n + w];
            nonzero = nonzero || v(w) != Complex(0.0, 0.0);
        }
        if (nonzero) sources.emplace_back(f.cell_at(ci), std::move(v));
    }
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t p = 0; p < npts; ++p) {
        const auto k = shape.k_of(p);
        Eigen::VectorXcd fhat = Eigen::VectorXcd::Zero(n);
        for (const auto& [cell, v] : sources) {
            double arg = 0.0;
            for (int i = 0; i < d; ++i) arg += k[i] * cell[i];
            fhat += std::polar(1.0, -arg) * v;
        }
        const Eigen::MatrixXcd m = sym.at_k(k) - lambda * eye;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        gs.min_abs_det = std::min(gs.min_abs_det, std::abs(lu.determinant()));
        gs.min_sv = std::min(gs.min_sv, Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(n - 1));
        gs.uhat[p] = lu.solve(fhat);
    }
    return gs;
}

}  // namespace

ResolventResult resolvent_apply(const OperatorSpec& spec, const RealSpaceWindow& f, Complex lambda,
                                std::vector<int> resolution, std::vector<int> out_lo, std::vector<int> out_hi) {
    const int d = spec.dimension();
    if (static_cast<int>(resolution.size()) != d) throw SpectrumError("resolution arity does not match the dimension");
    for (int g : resolution)
        if (g < 2) throw SpectrumError("resolution must be at least 2 per axis");
    if (f.dimension() != d || f.cell_size != spec.cell_size()) throw WindowError("source window does not fit the operator");
    if (static_cast<int>(out_lo.size()) != d || static_cast<int>(out_hi.size()) != d)
        throw WindowError("output box arity does not match the dimension");

    const BlochSymbol sym(spec);
    ResolventResult res;
    res.resolution = resolution;
    GridSolve fine = solve_on_grid(sym, f, lambda, resolution);
    res.min_abs_dispersion = fine.min_abs_det;
    res.min_singular_value = fine.min_sv;
    if (!(fine.min_sv > 0.0) || !std::isfinite(fine.min_sv))
        throw SpectrumError("lambda lies on a grid eigenvalue; the resolvent is undefined at this resolution");
    res.u = inverse_transform(resolution, fine.uhat, f.cell_size, out_lo, out_hi);

    std::vector<int> coarse_res = resolution;
    bool halvable = true;
    for (int& g : coarse_res) {
        halvable = halvable && g % 2 == 0 && g >= 4;
        g /= 2;
    }
    if (halvable) {
        GridSolve coarse = solve_on_grid(sym, f, lambda, coarse_res);
        RealSpaceWindow uc = inverse_transform(coarse_res, coarse.uhat, f.cell_size, out_lo, out_hi);
        double err = 0.0;
        for (std::size_t i = 0; i < uc.values.size(); ++i) err = std::max(err, std::abs(uc.values[i] - res.u.values[i]));
        res.quadrature_error_estimate = err;
    }
    if (!(res.min_abs_dispersion > 10.0 * res.quadrature_error_estimate))
        throw SpectrumError("lambda is too close to the spectrum for this resolution: min |D| = " +
                            std::to_string(res.min_abs_dispersion) + ", quadrature error estimate = " +
                            std::to_string(res.quadrature_error_estimate));
    return res;
}

}  // namespace blochlab
