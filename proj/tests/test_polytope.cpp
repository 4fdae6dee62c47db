#include <doctest.h>

#include <algorithm>

#include "blochlab/floquet.hpp"
#include "blochlab/io.hpp"
#include "blochlab/polytope.hpp"

using namespace blochlab;

namespace {

LaurentPoly P(const char* text, int d) { return parse_laurent(text, d); }

const Face* face_with_normal(const NewtonPolytope& p, const std::vector<long long>& n) {
    for (const auto& f : p.faces)
        if (!f.improper && f.normal == n) return &f;
    return nullptr;
}

}  // namespace

TEST_CASE("square lattice polytope") {
    const auto d = dispersion(builtin("square_lattice", {{"V", 0}}));
    const auto p = newton_polytope(d);
    CHECK(p.supported);
    CHECK_FALSE(p.degenerate);
    CHECK(p.hull_dimension == 3);
    CHECK(p.normalized_volume == 4);
    CHECK(p.hull_vertices.size() == 5);
    // Four lateral triangles plus the base square.
    CHECK(std::count_if(p.faces.begin(), p.faces.end(), [](const Face& f) { return f.dimension == 2; }) == 5);

    const auto* top = face_with_normal(p, {0, 0, 1});
    REQUIRE(top != nullptr);
    CHECK(top->dimension == 0);
    CHECK(facial_form(d, p, *top) == P("-lambda", 2));
    const auto* base = face_with_normal(p, {0, 0, -1});
    REQUIRE(base != nullptr);
    CHECK(base->dimension == 2);
    CHECK(facial_form(d, p, *base) == P("-x - x^-1 - y - y^-1", 2));
    CHECK(p.improper_face().improper);
    CHECK(facial_form(d, p, p.improper_face()) == d);
    CHECK(vertical_faces(p).empty());
}

TEST_CASE("graphene polytope is a hexagonal pyramid") {
    const auto d = dispersion(builtin("hexagonal", {{"a", -1}, {"b", -2}, {"c", -3}, {"Vv", 0}, {"Vw", 1}}));
    const auto p = newton_polytope(d);
    // Area 3 base, height 2: volume 2, times 3!.
    CHECK(p.normalized_volume == 12);
    CHECK(p.hull_vertices.size() == 7);
    CHECK(vertical_faces(p).empty());
}

TEST_CASE("line has no vertical edge, a flat band at nonzero energy does") {
    const auto line = newton_polytope(dispersion(builtin("line", {{"V", 0}})));
    CHECK(line.normalized_volume == 2);
    CHECK(vertical_faces(line).empty());

    const auto d = P("(1 - lambda)*(-lambda - z - z^-1)", 1);
    const auto p = newton_polytope(d);
    const auto v = vertical_faces(p);
    REQUIRE(v.size() == 2);
    for (const auto& f : v) {
        CHECK(f.dimension == 1);
        CHECK(f.normal.back() == 0);
        CHECK(std::abs(f.normal.front()) == 1);
    }
    const auto* right = face_with_normal(p, {1, 0});
    REQUIRE(right != nullptr);
    CHECK(facial_form(d, p, *right) == P("z lambda - z", 1));
}

TEST_CASE("degenerate and unsupported polytopes") {
    const auto flat = newton_polytope(P("-lambda + 3", 2));
    CHECK(flat.degenerate);
    CHECK(flat.normalized_volume == 0);
    CHECK(flat.hull_dimension == 1);

    const auto d3 = newton_polytope(P("-lambda - z1 - z2 - z3", 3));
    CHECK_FALSE(d3.supported);
    CHECK(d3.support.size() == 4);
}

TEST_CASE("facial form rejects a foreign face") {
    const auto d = dispersion(builtin("square_lattice", {{"V", 0}}));
    const auto p = newton_polytope(d);
    Face foreign;
    foreign.normal = {5, 7, 1};
    foreign.dimension = 0;
    foreign.points = {0};
    CHECK_THROWS_AS(facial_form(d, p, foreign), FaceError);
}

TEST_CASE("affine rank") {
    CHECK(affine_rank({}) == -1);
    CHECK(affine_rank({{1, 2}}) == 0);
    CHECK(affine_rank({{0, 0}, {1, 1}, {2, 2}}) == 1);
    CHECK(affine_rank({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 3);
}
