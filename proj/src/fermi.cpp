#include "blochlab/fermi.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "blochlab/floquet.hpp"

namespace blochlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TermTable {
    std::vector<std::array<int, 2>> exps;
    std::vector<Complex> coeffs;
};

TermTable table_of(const NumericPoly& f) {
    TermTable t;
    for (const auto& [e, c] : f.terms()) {
        t.exps.push_back({e.z[0], e.z[1]});
        t.coeffs.push_back(c);
    }
    return t;
}

// Value, gradient and Hessian in k of f(exp(ik)).
struct Jet {
    Complex value;
    std::array<Complex, 2> grad;
    std::array<std::array<Complex, 2>, 2> hess;
};

Jet jet(const TermTable& t, TorusPoint k) {
    Jet j{};
    for (std::size_t i = 0; i < t.coeffs.size(); ++i) {
        const auto& n = t.exps[i];
        Complex v = t.coeffs[i] * std::polar(1.0, n[0] * k[0] + n[1] * k[1]);
        j.value += v;
        for (int p = 0; p < 2; ++p) {
            j.grad[p] += Complex(0.0, n[p]) * v;
            for (int q = 0; q < 2; ++q) j.hess[p][q] -= double(n[p]) * n[q] * v;
        }
    }
    return j;
}

double term_scale(const TermTable& t) {
    double s = 0.0;
    for (const auto& c : t.coeffs) s += std::abs(c);
    return s;
}

struct Crossing {
    long id;
    TorusPoint pt;
};

}  // namespace

std::vector<Polyline> periodic_contours(const std::vector<double>& values, int g0, int g1) {
    if (g0 < 2 || g1 < 2 || values.size() != static_cast<std::size_t>(g0) * g1)
        throw FermiError("contour grid has the wrong shape");
    const double h0 = kTwoPi / g0, h1 = kTwoPi / g1;
    auto val = [&](int i, int j) { return values[static_cast<std::size_t>(i % g0) * g1 + (j % g1)]; };
    auto edge_id = [&](int i, int j, int axis) { return (static_cast<long>(i % g0) * g1 + (j % g1)) * 2 + axis; };
    // Crossing on the edge starting at grid point (i, j) along axis; i, j unwrapped.
    auto crossing = [&](int i, int j, int axis) {
        double a = val(i, j), b = axis == 0 ? val(i + 1, j) : val(i, j + 1);
        double t = a / (a - b);
        TorusPoint pt = axis == 0 ? TorusPoint{h0 * (i + t), h1 * j} : TorusPoint{h0 * i, h1 * (j + t)};
        return Crossing{edge_id(i, j, axis), pt};
    };

    std::vector<std::pair<Crossing, Crossing>> segments;
    for (int i = 0; i < g0; ++i)
        for (int j = 0; j < g1; ++j) {
            const bool in[4] = {val(i, j) > 0, val(i + 1, j) > 0, val(i + 1, j + 1) > 0, val(i, j + 1) > 0};
            // Edges: 0 = c0-c1, 1 = c1-c2, 2 = c3-c2, 3 = c0-c3.
            auto edge = [&](int e) {
                switch (e) {
                    case 0: return crossing(i, j, 0);
                    case 1: return crossing(i + 1, j, 1);
                    case 2: return crossing(i, j + 1, 0);
                    default: return crossing(i, j, 1);
                }
            };
            const bool cut[4] = {in[0] != in[1], in[1] != in[2], in[3] != in[2], in[0] != in[3]};
            const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
            if (ncut == 2) {
                int a = -1, b = -1;
                for (int e = 0; e < 4; ++e)
                    if (cut[e]) (a < 0 ? a : b) = e;
                segments.emplace_back(edge(a), edge(b));
            } else if (ncut == 4) {
                const double center = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                if ((center > 0) == in[0]) {
                    // Diagonal c0-c2 connected: isolate corners c1 and c3.
                    segments.emplace_back(edge(0), edge(1));
                    segments.emplace_back(edge(2), edge(3));
                } else {
                    segments.emplace_back(edge(3), edge(0));
                    segments.emplace_back(edge(1), edge(2));
                }
            }
        }

    // Join segments sharing a crossing with identical coordinates; shared
    // seam crossings have coordinates differing by 2*pi and stay split.
    using Key = std::tuple<long, double, double>;
    auto key_of = [](const Crossing& c) { return Key{c.id, c.pt[0], c.pt[1]}; };
    std::multimap<Key, std::size_t> ends;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        ends.emplace(key_of(segments[s].first), s);
        ends.emplace(key_of(segments[s].second), s);
    }
    std::vector<bool> used(segments.size(), false);
    auto next_segment = [&](const Crossing& at, std::size_t from) -> std::optional<std::size_t> {
        auto [lo, hi] = ends.equal_range(key_of(at));
        for (auto it = lo; it != hi; ++it)
            if (it->second != from && !used[it->second]) return it->second;
        return std::nullopt;
    };
    auto walk = [&](std::size_t s, Crossing tail, std::vector<TorusPoint>& out) {
        std::size_t cur = s;
        while (auto nxt = next_segment(tail, cur)) {
            used[*nxt] = true;
            const auto& seg = segments[*nxt];
            tail = key_of(seg.first) == key_of(tail) ? seg.second : seg.first;
            out.push_back(tail.pt);
            cur = *nxt;
        }
    };

    std::vector<Polyline> lines;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<TorusPoint> forward{segments[s].first.pt, segments[s].second.pt};
        walk(s, segments[s].second, forward);
        std::vector<TorusPoint> backward;
        walk(s, segments[s].first, backward);
        Polyline line(backward.rbegin(), backward.rend());
        line.insert(line.end(), forward.begin(), forward.end());
        lines.push_back(std::move(line));
    }
    return lines;
}

double interpolation_bound(const NumericPoly& f, const std::vector<int>& resolution) {
    double bound = 0.0;
    for (std::size_t p = 0; p < resolution.size(); ++p) {
        double m2 = 0.0;
        for (const auto& [e, c] : f.terms()) m2 += std::abs(c) * double(e.z[p]) * e.z[p];
        const double h = kTwoPi / resolution[p];
        bound = std::max(bound, h * h / 8.0 * m2);
    }
    return bound;
}

TorusPoint to_display_window(TorusPoint k) {
    for (double& v : k) {
        v = std::fmod(v, kTwoPi);
        if (v < 0) v += kTwoPi;
        if (v >= 1.5 * std::numbers::pi) v -= kTwoPi;
    }
    return k;
}

namespace {

FermiSection build_section(const OperatorSpec& spec, FermiSection sec, const FermiOptions& opts) {
    const int d = spec.dimension();
    if (!opts.extract_curves) return sec;
    if (d != 2) throw FermiError("real Fermi curves are only extracted for d = 2");
    if (opts.resolution.size() != 2 || opts.resolution[0] < 4 || opts.resolution[1] < 4)
        throw FermiError("Fermi curve resolution must be two values >= 4");

    const int g0 = opts.resolution[0], g1 = opts.resolution[1];
    sec.resolution = opts.resolution;
    const TermTable tab = table_of(sec.numeric_polynomial);
    const bool real_mode = spec.is_self_adjoint() && sec.lambda0.imag() == 0.0;
    sec.low_confidence = !real_mode;
    sec.vertex_bound = interpolation_bound(sec.numeric_polynomial, sec.resolution);

    std::vector<double> values(static_cast<std::size_t>(g0) * g1);
    std::vector<Complex> raw(values.size());
    for (int i = 0; i < g0; ++i)
        for (int j = 0; j < g1; ++j) {
            TorusPoint k{kTwoPi * i / g0, kTwoPi * j / g1};
            Complex v = 0.0;
            for (std::size_t t = 0; t < tab.coeffs.size(); ++t)
                v += tab.coeffs[t] * std::polar(1.0, tab.exps[t][0] * k[0] + tab.exps[t][1] * k[1]);
            raw[static_cast<std::size_t>(i) * g1 + j] = v;
        }
    if (real_mode) {
        for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i].real();
    } else {
        const double tau = sec.vertex_bound * sec.vertex_bound;
        for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::norm(raw[i]) - tau;
    }
    sec.curves = periodic_contours(values, g0, g1);
    if (!real_mode) return sec;

    // Point-like components: grid extrema of f that refine to an exact zero.
    const double scale = term_scale(tab);
    const double candidate_tol = 8.0 * sec.vertex_bound;
    auto val = [&](int i, int j) { return values[static_cast<std::size_t>((i + g0) % g0) * g1 + ((j + g1) % g1)]; };
    for (int i = 0; i < g0; ++i)
        for (int j = 0; j < g1; ++j) {
            const double c = val(i, j);
            if (std::abs(c) > candidate_tol) continue;
            bool is_max = true, is_min = true;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (!di && !dj) continue;
                    const double n = val(i + di, j + dj);
                    is_max = is_max && n <= c;
                    is_min = is_min && n >= c;
                }
            if (!is_max && !is_min) continue;
            TorusPoint k{kTwoPi * i / g0, kTwoPi * j / g1};
            bool converged = false;
            for (int it = 0; it < 50; ++it) {
                Jet jt = jet(tab, k);
                const double gx = jt.grad[0].real(), gy = jt.grad[1].real();
                const double a = jt.hess[0][0].real(), b = jt.hess[0][1].real(), dd = jt.hess[1][1].real();
                const double det = a * dd - b * b;
                if (std::abs(det) < 1e-300) break;
                const double sx = (dd * gx - b * gy) / det, sy = (a * gy - b * gx) / det;
                k[0] -= sx;
                k[1] -= sy;
                if (std::hypot(sx, sy) < 1e-14) {
                    converged = true;
                    break;
                }
            }
            if (!converged) continue;
            if (std::abs(jet(tab, k).value) > 1e-9 * scale) continue;
            k = {std::fmod(std::fmod(k[0], kTwoPi) + kTwoPi, kTwoPi), std::fmod(std::fmod(k[1], kTwoPi) + kTwoPi, kTwoPi)};
            bool dup = false;
            for (const auto& p : sec.points) {
                double dx = std::remainder(p[0] - k[0], kTwoPi), dy = std::remainder(p[1] - k[1], kTwoPi);
                dup = dup || std::hypot(dx, dy) < 1e-6;
            }
            if (!dup) sec.points.push_back(k);
        }
    return sec;
}

}  // namespace

FermiSection fermi_section(const OperatorSpec& spec, const GaussianRational& lambda0, const FermiOptions& opts) {
    FermiSection sec;
    sec.lambda0 = lambda0.to_complex();
    sec.lambda0_exact = lambda0;
    sec.polynomial = dispersion(spec).substitute_lambda(lambda0);
    sec.numeric_polynomial = sec.polynomial->to_numeric();
    return build_section(spec, std::move(sec), opts);
}

FermiSection fermi_section(const OperatorSpec& spec, Complex lambda0, const FermiOptions& opts) {
    FermiSection sec;
    sec.lambda0 = lambda0;
    sec.numeric_polynomial = dispersion(spec).to_numeric().substitute_lambda(lambda0);
    return build_section(spec, std::move(sec), opts);
}

}  // namespace blochlab
