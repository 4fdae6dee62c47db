#include "blochlab/polytope.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include <gmpxx.h>

namespace blochlab {

namespace {

using Vec = std::vector<long long>;

Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

long long dot(const Vec& a, const Vec& b) {
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec primitive(Vec v) {
    long long g = 0;
    for (long long x : v) g = std::gcd(g, x < 0 ? -x : x);
    if (g > 1)
        for (auto& x : v) x /= g;
    return v;
}

bool is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

// Exact rank of a set of integer vectors.
int rank_of(std::vector<Vec> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    std::vector<std::vector<mpq_class>> m;
    for (const auto& r : rows) {
        std::vector<mpq_class> q;
        for (long long x : r) q.emplace_back(static_cast<long>(x));
        m.push_back(std::move(q));
    }
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
        std::size_t p = rank;
        while (p < m.size() && sgn(m[p][c]) == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[rank]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == static_cast<std::size_t>(rank) || sgn(m[r][c]) == 0) continue;
            mpq_class f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

int affine_rank_of(const std::vector<LatticePoint>& pts, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return -1;
    std::vector<Vec> diffs;
    for (std::size_t i = 1; i < idx.size(); ++i) diffs.push_back(sub(pts[idx[i]], pts[idx[0]]));
    return rank_of(std::move(diffs));
}

// Points maximizing <normal, .>.
std::vector<std::size_t> argmax(const std::vector<LatticePoint>& pts, const Vec& normal) {
    long long best = 0;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        long long v = dot(normal, pts[i]);
        if (out.empty() || v > best) {
            best = v;
            out = {i};
        } else if (v == best) {
            out.push_back(i);
        }
    }
    return out;
}

// Candidate normal is an outer facet normal when all points lie on one side;
// flips the sign if they lie on the positive side.
std::optional<Vec> supporting(const std::vector<LatticePoint>& pts, const LatticePoint& base, Vec n) {
    if (is_zero(n)) return std::nullopt;
    bool pos = false, neg = false;
    for (const auto& p : pts) {
        long long s = dot(n, sub(p, base));
        pos = pos || s > 0;
        neg = neg || s < 0;
    }
    if (pos && neg) return std::nullopt;
    if (pos)
        for (auto& x : n) x = -x;
    return primitive(std::move(n));
}

std::vector<Vec> facet_normals(const std::vector<LatticePoint>& pts, int ambient, int rank) {
    std::vector<Vec> normals;
    const std::size_t m = pts.size();
    auto add = [&](std::optional<Vec> n) {
        if (n && std::find(normals.begin(), normals.end(), *n) == normals.end()) normals.push_back(*n);
    };
    if (rank == 1) {
        Vec dir;
        for (std::size_t i = 1; i < m && dir.empty(); ++i)
            if (pts[i] != pts[0]) dir = primitive(sub(pts[i], pts[0]));
        Vec neg = dir;
        for (auto& x : neg) x = -x;
        normals = {dir, neg};
    } else if (rank == 2 && ambient == 2) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                Vec e = sub(pts[j], pts[i]);
                add(supporting(pts, pts[i], Vec{-e[1], e[0]}));
            }
    } else if (rank == 2 && ambient == 3) {
        Vec u;
        for (std::size_t i = 1; i < m && u.empty(); ++i)
            for (std::size_t j = i + 1; j < m && u.empty(); ++j) {
                Vec c = cross(sub(pts[i], pts[0]), sub(pts[j], pts[0]));
                if (!is_zero(c)) u = c;
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) add(supporting(pts, pts[i], cross(u, sub(pts[j], pts[i]))));
    } else if (rank == 3) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t k = j + 1; k < m; ++k)
                    add(supporting(pts, pts[i], cross(sub(pts[j], pts[i]), sub(pts[k], pts[i]))));
    }
    return normals;
}

// Cyclic order of coplanar points via a monotone chain in a coordinate projection.
std::vector<std::size_t> polygon_order(const std::vector<LatticePoint>& pts, std::vector<std::size_t> idx,
                                       const Vec& normal) {
    std::size_t drop = 0;
    for (std::size_t i = 1; i < normal.size(); ++i)
        if (std::llabs(normal[i]) > std::llabs(normal[drop])) drop = i;
    auto proj = [&](std::size_t i) {
        std::array<long long, 2> p{};
        int k = 0;
        for (std::size_t c = 0; c < pts[i].size(); ++c)
            if (c != drop) p[k++] = pts[i][c];
        return p;
    };
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return proj(a) < proj(b); });
    auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
        auto po = proj(o), pa = proj(a), pb = proj(b);
        return (pa[0] - po[0]) * (pb[1] - po[1]) - (pa[1] - po[1]) * (pb[0] - po[0]);
    };
    std::vector<std::size_t> hull(2 * idx.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0) --k;
        hull[k++] = idx[i];
    }
    for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0) --k;
        hull[k++] = idx[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    return hull;
}

long long abs_det3(const Vec& a, const Vec& b, const Vec& c) { return std::llabs(dot(a, cross(b, c))); }

}  // namespace

int affine_rank(const std::vector<LatticePoint>& points) {
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    return affine_rank_of(points, idx);
}

NewtonPolytope newton_polytope(const LaurentPoly& d) {
    if (d.is_zero()) throw std::invalid_argument("Newton polytope of the zero polynomial");
    NewtonPolytope p;
    p.dimension = d.dimension();
    const int ambient = p.dimension + 1;
    std::set<LatticePoint> uniq;
    for (const auto& [e, c] : d.terms()) {
        LatticePoint pt(e.z.begin(), e.z.end());
        pt.push_back(e.lambda);
        uniq.insert(pt);
    }
    p.support.assign(uniq.begin(), uniq.end());
    const auto& pts = p.support;
    p.hull_dimension = affine_rank(pts);
    p.degenerate = p.hull_dimension < ambient;

    Face improper;
    improper.improper = true;
    improper.normal.assign(ambient, 0);
    improper.dimension = p.hull_dimension;
    improper.points.resize(pts.size());
    std::iota(improper.points.begin(), improper.points.end(), 0);

    if (ambient > 3) {
        p.supported = false;
        p.faces = {improper};
        return p;
    }
    if (p.hull_dimension == 0) {
        p.hull_vertices = {0};
        p.faces = {improper};
        return p;
    }

    // Facets, then lower faces by pairwise intersection.
    std::vector<Face> facets;
    for (const auto& n : facet_normals(pts, ambient, p.hull_dimension)) {
        Face f;
        f.normal = n;
        f.points = argmax(pts, n);
        f.dimension = affine_rank_of(pts, f.points);
        if (f.dimension == p.hull_dimension - 1) facets.push_back(std::move(f));
    }
    std::map<std::vector<std::size_t>, Face> faces;
    for (const auto& f : facets) faces.emplace(f.points, f);
    std::vector<std::vector<std::size_t>> level;
    for (const auto& f : facets) level.push_back(f.points);
    for (int dim = p.hull_dimension - 2; dim >= 0; --dim) {
        std::set<std::vector<std::size_t>> next;
        for (std::size_t a = 0; a < level.size(); ++a)
            for (std::size_t b = a + 1; b < level.size(); ++b) {
                std::vector<std::size_t> inter;
                std::set_intersection(level[a].begin(), level[a].end(), level[b].begin(), level[b].end(),
                                      std::back_inserter(inter));
                if (affine_rank_of(pts, inter) == dim) next.insert(inter);
            }
        for (const auto& pts_idx : next) {
            Face f;
            f.points = pts_idx;
            f.dimension = dim;
            f.normal.assign(ambient, 0);
            for (const auto& fc : facets)
                if (std::includes(fc.points.begin(), fc.points.end(), pts_idx.begin(), pts_idx.end()))
                    for (int i = 0; i < ambient; ++i) f.normal[i] += fc.normal[i];
            f.normal = primitive(f.normal);
            faces.emplace(pts_idx, std::move(f));
        }
        level.assign(next.begin(), next.end());
    }

    for (auto& [idx, f] : faces) {
        p.faces.push_back(f);
        if (f.dimension == 0) p.hull_vertices.push_back(idx[0]);
    }
    std::sort(p.hull_vertices.begin(), p.hull_vertices.end());
    std::sort(p.faces.begin(), p.faces.end(), [](const Face& a, const Face& b) {
        if (a.dimension != b.dimension) return a.dimension > b.dimension;
        return a.normal < b.normal;
    });
    p.faces.push_back(improper);

    if (!p.degenerate) {
        const LatticePoint& v0 = pts[p.hull_vertices.front()];
        auto is_vertex = [&](std::size_t i) { return std::binary_search(p.hull_vertices.begin(), p.hull_vertices.end(), i); };
        long long vol = 0;
        for (const auto& f : p.faces) {
            if (f.improper || f.dimension != ambient - 1) continue;
            std::vector<std::size_t> verts;
            for (std::size_t i : f.points)
                if (is_vertex(i)) verts.push_back(i);
            if (ambient == 1) {
                continue;
            } else if (ambient == 2) {
                const Vec a = sub(pts[verts[0]], v0), b = sub(pts[verts[1]], v0);
                vol += std::llabs(a[0] * b[1] - a[1] * b[0]);
            } else {
                const auto ring = polygon_order(pts, verts, f.normal);
                for (std::size_t i = 1; i + 1 < ring.size(); ++i)
                    vol += abs_det3(sub(pts[ring[0]], v0), sub(pts[ring[i]], v0), sub(pts[ring[i + 1]], v0));
            }
        }
        if (ambient == 1) vol = pts.back()[0] - pts.front()[0];
        p.normalized_volume = vol;
    }
    return p;
}

LaurentPoly facial_form(const LaurentPoly& d, const NewtonPolytope& p, const Face& face) {
    const bool known = std::any_of(p.faces.begin(), p.faces.end(), [&](const Face& f) {
        return f.points == face.points && f.normal == face.normal && f.improper == face.improper;
    });
    if (!known) throw FaceError("face is not a face of this Newton polytope");
    std::set<LatticePoint> on_face;
    for (std::size_t i : face.points) on_face.insert(p.support.at(i));
    LaurentPoly out(d.dimension());
    for (const auto& [e, c] : d.terms()) {
        LatticePoint pt(e.z.begin(), e.z.end());
        pt.push_back(e.lambda);
        if (on_face.count(pt)) out.add_term(e, c);
    }
    return out;
}

std::vector<Face> vertical_faces(const NewtonPolytope& p) {
    std::vector<Face> out;
    if (!p.supported) return out;
    const std::size_t ambient = static_cast<std::size_t>(p.dimension) + 1;
    Vec e_lambda(ambient, 0);
    e_lambda.back() = 1;
    for (const auto& f : p.faces) {
        if (f.improper || f.dimension < 1) continue;
        std::vector<Vec> diffs;
        for (std::size_t i = 1; i < f.points.size(); ++i) diffs.push_back(sub(p.support[f.points[i]], p.support[f.points[0]]));
        const int r = rank_of(diffs);
        diffs.push_back(e_lambda);
        if (rank_of(diffs) == r) out.push_back(f);
    }
    return out;
}

}  // namespace blochlab
