#include "blochlab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <variant>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace blochlab {

std::vector<LaurentPoly> cpe_system(const LaurentPoly& d) {
    if (d.is_zero()) throw std::invalid_argument("critical point equations of the zero polynomial");
    std::vector<LaurentPoly> out{d};
    for (int i = 0; i < d.dimension(); ++i) out.push_back(d.euler_derivative(i));
    return out;
}

std::string cpe_text(const LaurentPoly& d) {
    const auto sys = cpe_system(d);
    std::ostringstream s;
    s << "# critical point equations in";
    for (int i = 0; i < d.dimension(); ++i) s << ' ' << variable_name(d.dimension(), i);
    s << " lambda; all right-hand sides = 0\n";
    s << "D = " << sys[0].to_string() << '\n';
    for (int i = 0; i < d.dimension(); ++i) {
        const std::string v = variable_name(d.dimension(), i);
        s << v << "*dD/d" << v << " = " << sys[i + 1].to_string() << '\n';
    }
    return s.str();
}

std::string to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::Minimum: return "min";
        case CriticalKind::Maximum: return "max";
        case CriticalKind::Saddle: return "saddle";
        case CriticalKind::DegenerateHessian: return "degenerate-hessian";
        case CriticalKind::BandCrossing: return "band-crossing";
    }
    return "unknown";
}

std::string to_string(EdgeVerdict v) {
    switch (v) {
        case EdgeVerdict::NondegenerateUnique: return "nondegenerate-unique";
        case EdgeVerdict::NondegenerateMultiple: return "nondegenerate-multiple";
        case EdgeVerdict::Degenerate: return "degenerate";
        case EdgeVerdict::Unresolved: return "unresolved";
    }
    return "unknown";
}

std::size_t CriticalSearch::isolated_count() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const CriticalPoint& p) {
        return p.isolated && p.kind != CriticalKind::BandCrossing;
    }));
}

std::size_t CriticalSearch::crossing_count() const {
    return static_cast<std::size_t>(std::count_if(
        points.begin(), points.end(), [](const CriticalPoint& p) { return p.kind == CriticalKind::BandCrossing; }));
}

BandJet band_jet(const BlochSymbol& sym, std::span<const double> k, std::size_t band) {
    const int d = sym.dimension();
    const int n = sym.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym.at_k(k));
    const auto& lam = es.eigenvalues();
    const auto& vec = es.eigenvectors();
    const auto j = static_cast<Eigen::Index>(band);
    BandJet out;
    out.energy = lam(j);
    out.gap = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m)
        if (m != j) out.gap = std::min(out.gap, std::abs(lam(m) - lam(j)));

    const Eigen::VectorXcd psi = vec.col(j);
    std::vector<Eigen::VectorXcd> b(d);  // b[p](m) = psi_m^* A_p psi
    out.gradient.resize(d);
    for (int p = 0; p < d; ++p) {
        b[p] = vec.adjoint() * (sym.dk(k, p) * psi);
        out.gradient(p) = b[p](j).real();
    }
    out.hessian.resize(d, d);
    for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) {
            double h = psi.dot(sym.dk2(k, p, q) * psi).real();
            for (int m = 0; m < n; ++m)
                if (m != j) h += 2.0 * (std::conj(b[p](m)) * b[q](m)).real() / (lam(j) - lam(m));
            out.hessian(p, q) = out.hessian(q, p) = h;
        }
    return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0) x += kTwoPi;
    return x >= kTwoPi ? 0.0 : x;
}

double torus_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::remainder(a[i] - b[i], kTwoPi);
        s += d * d;
    }
    return std::sqrt(s);
}

// Grid neighbors in cyclic ring order (d = 2) or left/right (d = 1).
std::vector<std::size_t> ring(const BandGrid& g, std::size_t p) {
    const auto idx = g.index_of(p);
    static const int ring2[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    std::vector<std::size_t> out;
    std::vector<int> q(idx.begin(), idx.end());
    if (g.dimension() == 1) {
        for (int s : {-1, 1}) {
            q[0] = idx[0] + s;
            out.push_back(g.point_at(q));
        }
    } else {
        for (const auto& o : ring2) {
            q[0] = idx[0] + o[0];
            q[1] = idx[1] + o[1];
            out.push_back(g.point_at(q));
        }
    }
    return out;
}

struct Context {
    const OperatorSpec& spec;
    const BandGrid& grid;
    const CriticalOptions& opts;
    BlochSymbol sym;
    int d;
    double width;
    double h;  // largest grid spacing
};

CriticalKind classify(const Eigen::MatrixXd& hess, double hess_abs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const auto& mu = es.eigenvalues();
    if (mu.cwiseAbs().minCoeff() <= hess_abs) return CriticalKind::DegenerateHessian;
    if (mu.minCoeff() > 0) return CriticalKind::Minimum;
    if (mu.maxCoeff() < 0) return CriticalKind::Maximum;
    return CriticalKind::Saddle;
}

// Damped Newton on grad lambda_j = 0 with a pseudo-inverse Hessian.
std::variant<CriticalPoint, std::string> refine_simple(const Context& c, std::vector<double> k, std::size_t band) {
    const double gap_abs = c.opts.gap_tol * c.width;
    for (int it = 0; it <= c.opts.max_iterations; ++it) {
        const BandJet jet = band_jet(c.sym, k, band);
        if (jet.gap < gap_abs) return std::string("band crossing encountered");
        const double gn = jet.gradient.norm();
        if (gn < c.opts.refine_tol) {
            CriticalPoint cp;
            for (auto& v : k) v = wrap(v);
            cp.k = k;
            cp.band = band;
            cp.energy = jet.energy;
            cp.gradient_norm = gn;
            cp.hessian = jet.hessian;
            cp.kind = classify(jet.hessian, c.opts.hess_tol * c.width);
            cp.gap = jet.gap;
            return cp;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jet.hessian);
        const auto& mu = es.eigenvalues();
        const double cutoff = 1e-8 * std::max(mu.cwiseAbs().maxCoeff(), 1e-300);
        Eigen::VectorXd step = Eigen::VectorXd::Zero(c.d);
        for (int i = 0; i < c.d; ++i)
            if (std::abs(mu(i)) > cutoff) step -= es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(jet.gradient) / mu(i));
        if (step.norm() == 0.0) step = -jet.gradient;  // flat Hessian: gradient step
        if (step.norm() > c.h) step *= c.h / step.norm();
        for (int i = 0; i < c.d; ++i) k[i] += step(i);
    }
    return std::string("Newton iteration did not converge");
}

// Gauss-Newton on the 2x2 effective block of bands j, j+1: closes the gap when
// the crossing is genuine.
std::variant<CriticalPoint, std::string> refine_crossing(const Context& c, std::vector<double> k, std::size_t band) {
    const double gap_abs = c.opts.gap_tol * c.width;
    const auto j = static_cast<Eigen::Index>(band);
    double gap = 0.0;
    for (int it = 0; it <= c.opts.max_iterations; ++it) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.sym.at_k(k));
        const auto& lam = es.eigenvalues();
        gap = lam(j + 1) - lam(j);
        if (gap < 1e-13 * std::max(1.0, c.width)) break;
        const Eigen::VectorXcd a = es.eigenvectors().col(j), b = es.eigenvectors().col(j + 1);
        Eigen::MatrixXd jac(3, c.d);
        for (int p = 0; p < c.d; ++p) {
            const Eigen::MatrixXcd dp = c.sym.dk(k, p);
            const Complex off = a.dot(dp * b);
            jac(0, p) = b.dot(dp * b).real() - a.dot(dp * a).real();
            jac(1, p) = 2.0 * off.real();
            jac(2, p) = 2.0 * off.imag();
        }
        Eigen::Vector3d r(gap, 0.0, 0.0);
        Eigen::VectorXd step = -jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(r);
        if (step.norm() > c.h) step *= c.h / step.norm();
        for (int i = 0; i < c.d; ++i) k[i] += step(i);
        if (step.norm() < 1e-15) break;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.sym.at_k(k));
    const auto& lam = es.eigenvalues();
    gap = lam(j + 1) - lam(j);
    if (!(gap < gap_abs)) return std::string("near-crossing does not close");

    CriticalPoint cp;
    for (auto& v : k) v = wrap(v);
    cp.k = k;
    cp.energy = 0.5 * (lam(j) + lam(j + 1));
    cp.kind = CriticalKind::BandCrossing;
    cp.hessian = Eigen::MatrixXd::Zero(c.d, c.d);
    cp.gap = gap;
    cp.band = band;
    for (Eigen::Index m = j; m-- > 0;)
        if (std::abs(lam(m) - cp.energy) <= gap_abs) cp.band = static_cast<std::size_t>(m);
    std::vector<Complex> zeta;
    for (double v : cp.k) zeta.push_back(std::polar(1.0, v));
    cp.multiplicity = floquet_mode(c.spec, zeta, cp.energy).kernel_dimension;
    return cp;
}

bool same_point(const CriticalPoint& a, const CriticalPoint& b, double tol) {
    const bool ca = a.kind == CriticalKind::BandCrossing, cb = b.kind == CriticalKind::BandCrossing;
    return ca == cb && a.band == b.band && torus_distance(a.k, b.k) < tol;
}

// Newton converges only linearly at a degenerate point, so copies of it can
// land up to a grid spacing apart; merge them when the energies agree.
bool same_degenerate(const CriticalPoint& a, const CriticalPoint& b, double radius, double energy_tol) {
    return a.kind == CriticalKind::DegenerateHessian && b.kind == CriticalKind::DegenerateHessian && a.band == b.band &&
           torus_distance(a.k, b.k) < radius && std::abs(a.energy - b.energy) <= energy_tol;
}

}  // namespace

CriticalSearch find_critical_points(const OperatorSpec& spec, const BandGrid& grid, const CriticalOptions& opts) {
    const int d = spec.dimension();
    if (d < 1 || d > 2) throw CriticalError("critical point refinement supports d = 1 and d = 2 only");
    if (!spec.is_self_adjoint()) throw CriticalError("critical points need a self-adjoint operator");
    if (grid.dimension() != d || grid.bands != spec.cell_size()) throw CriticalError("band grid does not match the operator");

    Context c{spec, grid, opts, BlochSymbol(spec), d, 0.0, 0.0};
    c.width = grid.max_energy() - grid.min_energy();
    if (c.width <= 0.0) c.width = 1.0;
    for (int r : grid.resolution) c.h = std::max(c.h, kTwoPi / r);

    CriticalSearch out;
    out.spectral_width = c.width;
    out.options = opts;
    const std::size_t np = grid.point_count(), nb = grid.bands;

    // Gradient norms on the grid.
    std::vector<double> gnorm(np * nb);
    for (std::size_t p = 0; p < np; ++p) {
        const auto k = grid.k_of(p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.sym.at_k(k));
        std::vector<Eigen::MatrixXcd> dks;
        for (int i = 0; i < d; ++i) dks.push_back(c.sym.dk(k, i));
        for (std::size_t j = 0; j < nb; ++j) {
            const Eigen::VectorXcd psi = es.eigenvectors().col(static_cast<Eigen::Index>(j));
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += std::pow(psi.dot(dks[i] * psi).real(), 2);
            gnorm[p * nb + j] = std::sqrt(s);
        }
    }

    // Second-order Taylor bound used to collect low-gradient chains.
    double m2 = 0.0;
    for (const auto& t : c.sym.terms()) {
        double len2 = 0.0;
        for (int o : t.offset) len2 += double(o) * o;
        if (len2 > 0) m2 += len2 * Eigen::JacobiSVD<Eigen::MatrixXcd>(t.coeff).singularValues()(0);
    }
    const double tau = m2 * c.h * std::sqrt(double(d));
    const double zero_diff = 1e-14 * c.width;

    std::vector<CriticalPoint> candidates;
    const double energy_tol = opts.match_tol * c.width;
    auto merges = [&](const CriticalPoint& a, const CriticalPoint& b) {
        return same_point(a, b, opts.cluster_tol) || same_degenerate(a, b, c.h, energy_tol);
    };
    auto add_candidate = [&](CriticalPoint cp) {
        for (auto& q : candidates)
            if (merges(q, cp)) {
                const bool iso = q.isolated && cp.isolated;
                if (cp.gradient_norm < q.gradient_norm) q = std::move(cp);
                q.isolated = iso;
                return;
            }
        candidates.push_back(std::move(cp));
    };
    auto note_failure = [&](std::size_t p, std::size_t band, std::string why) {
        out.failures.push_back({grid.k_of(p), band, std::move(why)});
    };

    std::vector<bool> flat(nb, false);
    for (std::size_t j = 0; j < nb; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t p = 0; p < np; ++p) {
            lo = std::min(lo, grid.energy(p, j));
            hi = std::max(hi, grid.energy(p, j));
        }
        if (hi - lo <= 1e-12 * std::max(1.0, c.width)) {
            flat[j] = true;
            CriticalPoint cp;
            cp.k.assign(d, 0.0);
            cp.band = j;
            cp.energy = 0.5 * (lo + hi);
            cp.hessian = Eigen::MatrixXd::Zero(d, d);
            cp.kind = CriticalKind::DegenerateHessian;
            cp.isolated = false;
            candidates.push_back(cp);
        }
    }

    for (std::size_t j = 0; j < nb; ++j) {
        if (flat[j]) continue;
        std::set<std::size_t> seeds;
        std::vector<bool> low(np, false);
        for (std::size_t p = 0; p < np; ++p) {
            const auto nbrs = ring(grid, p);
            const double e = grid.energy(p, j);
            bool all_ge = true, all_le = true, any_nonzero = false;
            std::vector<int> signs;
            bool gmin = true;
            for (std::size_t q : nbrs) {
                const double diff = grid.energy(q, j) - e;
                const int s = diff > zero_diff ? 1 : (diff < -zero_diff ? -1 : 0);
                all_ge = all_ge && s >= 0;
                all_le = all_le && s <= 0;
                any_nonzero = any_nonzero || s != 0;
                if (s) signs.push_back(s);
                gmin = gmin && gnorm[p * nb + j] <= gnorm[q * nb + j];
            }
            int changes = 0;
            for (std::size_t i = 0; i < signs.size(); ++i) changes += signs[i] != signs[(i + 1) % signs.size()];
            if (any_nonzero && (all_ge || all_le || changes >= 4)) seeds.insert(p);
            if (gmin) seeds.insert(p);
            low[p] = gnorm[p * nb + j] <= tau;
        }
        out.seeds += seeds.size();
        for (std::size_t p : seeds) {
            auto r = refine_simple(c, grid.k_of(p), j);
            if (auto* cp = std::get_if<CriticalPoint>(&r))
                add_candidate(std::move(*cp));
            else
                note_failure(p, j, std::get<std::string>(r));
        }

        // Low-gradient chains: a large component whose refined sample yields
        // several distinct degenerate critical points is a critical curve.
        std::vector<bool> seen(np, false);
        for (std::size_t start = 0; start < np; ++start) {
            if (!low[start] || seen[start]) continue;
            std::vector<std::size_t> comp;
            std::deque<std::size_t> queue{start};
            seen[start] = true;
            while (!queue.empty()) {
                const std::size_t p = queue.front();
                queue.pop_front();
                comp.push_back(p);
                for (std::size_t q : ring(grid, p))
                    if (low[q] && !seen[q]) {
                        seen[q] = true;
                        queue.push_back(q);
                    }
            }
            if (comp.size() < opts.chain_length) continue;
            const std::size_t samples = std::min(comp.size(), 2 * opts.chain_length);
            std::vector<CriticalPoint> refined;
            for (std::size_t s = 0; s < samples; ++s) {
                const std::size_t p = comp[s * comp.size() / samples];
                auto r = refine_simple(c, grid.k_of(p), j);
                auto* cp = std::get_if<CriticalPoint>(&r);
                if (!cp || cp->kind != CriticalKind::DegenerateHessian) continue;
                if (std::none_of(refined.begin(), refined.end(),
                                 [&](const CriticalPoint& q) { return merges(q, *cp); }))
                    refined.push_back(std::move(*cp));
            }
            if (refined.size() < 3) continue;
            std::set<std::size_t> members(comp.begin(), comp.end());
            for (auto& q : candidates) {
                if (q.band != j || q.kind == CriticalKind::BandCrossing) continue;
                std::vector<int> idx(d);
                for (int i = 0; i < d; ++i)
                    idx[i] = static_cast<int>(std::lround(q.k[i] / (kTwoPi / grid.resolution[i])));
                if (members.count(grid.point_at(idx))) q.isolated = false;
            }
            for (auto& q : refined) {
                q.isolated = false;
                add_candidate(std::move(q));
            }
        }
    }

    // Crossings between consecutive bands.
    const double crossing_window = 2.0 * c.sym.lipschitz_bound() * c.h * std::sqrt(double(d)) + opts.gap_tol * c.width;
    for (std::size_t j = 0; j + 1 < nb; ++j) {
        if (flat[j] && flat[j + 1]) continue;
        for (std::size_t p = 0; p < np; ++p) {
            const double gp = grid.energy(p, j + 1) - grid.energy(p, j);
            if (gp >= crossing_window) continue;
            bool local_min = true;
            for (std::size_t q : ring(grid, p))
                local_min = local_min && gp <= grid.energy(q, j + 1) - grid.energy(q, j);
            if (!local_min) continue;
            ++out.seeds;
            auto r = refine_crossing(c, grid.k_of(p), j);
            if (auto* cp = std::get_if<CriticalPoint>(&r))
                add_candidate(std::move(*cp));
            else
                note_failure(p, j, std::get<std::string>(r));
        }
    }

    // Degenerate points at one energy that link up at grid spacing sample a
    // critical curve, even when no low-gradient chain was found.
    {
        const std::size_t n = candidates.size();
        std::vector<std::size_t> parent(n);
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
        auto find = [&](std::size_t i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (same_degenerate(candidates[a], candidates[b], 2.5 * c.h, energy_tol)) parent[find(a)] = find(b);
        std::map<std::size_t, std::size_t> size;
        for (std::size_t i = 0; i < n; ++i) ++size[find(i)];
        for (std::size_t i = 0; i < n; ++i)
            if (size[find(i)] >= 3) candidates[i].isolated = false;
    }
    // Step one grid spacing along the Hessian null direction: landing on a
    // different critical point at the same energy means a curve.
    for (auto& cp : candidates) {
        if (cp.kind != CriticalKind::DegenerateHessian || !cp.isolated) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.hessian);
        Eigen::Index i0 = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&i0);
        const Eigen::VectorXd v = es.eigenvectors().col(i0);
        for (double sgn : {1.0, -1.0}) {
            auto k = cp.k;
            for (int i = 0; i < d; ++i) k[i] += sgn * c.h * v(i);
            auto r = refine_simple(c, k, cp.band);
            const auto* q = std::get_if<CriticalPoint>(&r);
            if (q && q->kind == CriticalKind::DegenerateHessian && std::abs(q->energy - cp.energy) <= energy_tol &&
                torus_distance(q->k, cp.k) > 0.25 * c.h) {
                cp.isolated = false;
                break;
            }
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.band != b.band) return a.band < b.band;
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.k < b.k;
    });
    out.points = std::move(candidates);
    return out;
}

SpectralReport refine_report(SpectralReport report, const CriticalSearch& search) {
    for (const auto& p : search.points) {
        const std::size_t last = p.kind == CriticalKind::BandCrossing ? p.band + std::max(p.multiplicity, 2) - 1 : p.band;
        for (std::size_t j = p.band; j <= last && j < report.bands.size(); ++j) {
            report.bands[j].lo = std::min(report.bands[j].lo, p.energy);
            report.bands[j].hi = std::max(report.bands[j].hi, p.energy);
        }
    }
    report.spectrum = merge_intervals(report.bands);
    report.refined = true;
    return report;
}

std::vector<EdgeAudit> spectral_edge_report(const CriticalSearch& search, const SpectralReport& report) {
    const double match = search.options.match_tol * search.spectral_width;
    std::vector<EdgeAudit> out;
    for (std::size_t j = 0; j < report.bands.size(); ++j) {
        const bool flat = std::any_of(report.flat_bands.begin(), report.flat_bands.end(), [&](const FlatBand& f) {
            return std::find(f.grid_bands.begin(), f.grid_bands.end(), j) != f.grid_bands.end();
        });
        for (bool upper : {false, true}) {
            EdgeAudit a;
            a.band = j;
            a.upper = upper;
            a.energy = upper ? report.bands[j].hi : report.bands[j].lo;
            bool degenerate = flat, crossing = false;
            for (std::size_t i = 0; i < search.points.size(); ++i) {
                const auto& p = search.points[i];
                const bool is_crossing = p.kind == CriticalKind::BandCrossing;
                const std::size_t last = is_crossing ? p.band + std::max(p.multiplicity, 2) - 1 : p.band;
                if (j < p.band || j > last || std::abs(p.energy - a.energy) > match) continue;
                if (p.kind == CriticalKind::Saddle) continue;
                if (!is_crossing && p.kind != CriticalKind::DegenerateHessian &&
                    (p.kind == CriticalKind::Maximum) != upper)
                    continue;
                const bool nondeg = (p.kind == CriticalKind::Minimum || p.kind == CriticalKind::Maximum) && p.isolated;
                a.attained.push_back({i, nondeg});
                degenerate = degenerate || p.kind == CriticalKind::DegenerateHessian || !p.isolated;
                crossing = crossing || is_crossing;
            }
            a.multiplicity = static_cast<int>(a.attained.size());
            if (degenerate)
                a.verdict = EdgeVerdict::Degenerate;
            else if (crossing || a.attained.empty())
                a.verdict = EdgeVerdict::Unresolved;
            else
                a.verdict = a.attained.size() == 1 ? EdgeVerdict::NondegenerateUnique : EdgeVerdict::NondegenerateMultiple;
            out.push_back(std::move(a));
        }
    }
    return out;
}

}  // namespace blochlab
