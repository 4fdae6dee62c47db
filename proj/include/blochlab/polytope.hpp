#pragma once

#include <vector>

#include "blochlab/laurent.hpp"

namespace blochlab {

// Exponent vector (n_1, ..., n_d, m) of a term z^n lambda^m.
using LatticePoint = std::vector<long long>;

struct Face {
    std::vector<long long> normal;  // primitive outer normal; zero for the improper face
    int dimension = 0;
    std::vector<std::size_t> points;  // indices into NewtonPolytope::support
    bool improper = false;
};

struct NewtonPolytope {
    int dimension = 0;  // d; ambient dimension is d + 1
    std::vector<LatticePoint> support;
    std::vector<std::size_t> hull_vertices;  // indices into support
    std::vector<Face> faces;                 // proper faces by decreasing dimension, then the improper face
    long long normalized_volume = 0;         // (d+1)! * Euclidean volume
    int hull_dimension = 0;
    bool degenerate = false;  // lower-dimensional hull; volume 0
    bool supported = true;    // false for d >= 3: support only

    const Face& improper_face() const { return faces.back(); }
};

NewtonPolytope newton_polytope(const LaurentPoly& d);

class FaceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Sum of the terms of D whose exponents lie on the face. The face must come
// from newton_polytope(D).
LaurentPoly facial_form(const LaurentPoly& d, const NewtonPolytope& p, const Face& face);

// Proper faces whose affine hull contains the lambda direction.
std::vector<Face> vertical_faces(const NewtonPolytope& p);

// Affine rank of a point set (0 for a single point, -1 for none).
int affine_rank(const std::vector<LatticePoint>& points);

}  // namespace blochlab
