#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blochlab/gaussian_rational.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Edge v <- w: (Af)(v+m) receives weight * f(w + m + offset).
struct EdgeRecord {
    std::string to_vertex;
    std::string from_vertex;
    std::vector<int> offset;
    GaussianRational weight;

    bool operator==(const EdgeRecord&) const = default;
};

struct Vertex {
    std::string name;
    GaussianRational potential;

    bool operator==(const Vertex&) const = default;
};

struct PeriodicGraph {
    int dimension = 1;
    std::vector<Vertex> vertices;
    std::vector<EdgeRecord> edges;
    bool hermitian_closure = true;

    std::size_t vertex_index(const std::string& name) const;  // throws SpecError
    bool operator==(const PeriodicGraph&) const = default;
};

struct DirectMatrix {
    int dimension = 1;
    LaurentMatrix matrix;
    bool self_adjoint = true;

    bool operator==(const DirectMatrix&) const = default;
};

// A periodic operator given either as a labeled graph or directly by its
// Floquet matrix. Constructed through validate(), so instances are always valid.
class OperatorSpec {
public:
    using Body = std::variant<PeriodicGraph, DirectMatrix>;

    // Validates; for graphs with hermitian_closure set, adds missing reverse
    // edges (w <- v, -offset, conj(weight)).
    static OperatorSpec from_graph(PeriodicGraph g);
    static OperatorSpec from_matrix(DirectMatrix m);

    int dimension() const;
    std::size_t cell_size() const;  // |W|
    bool is_graph() const { return std::holds_alternative<PeriodicGraph>(body_); }
    const PeriodicGraph& graph() const { return std::get<PeriodicGraph>(body_); }
    const DirectMatrix& direct() const { return std::get<DirectMatrix>(body_); }
    const Body& body() const { return body_; }
    std::vector<std::string> vertex_names() const;

    // Self-adjointness scan: every edge has its conjugate reverse and all
    // potentials are real (graphs); entry(v,w)(1/conj z) == conj(entry(w,v)(z)) (matrices).
    bool is_self_adjoint() const;

    bool operator==(const OperatorSpec&) const = default;

private:
    explicit OperatorSpec(Body b) : body_(std::move(b)) {}
    Body body_;
};

using Params = std::map<std::string, GaussianRational>;

// Parses the JSON graph file format.
OperatorSpec parse_spec(const std::string& text);
std::string serialize_spec(const OperatorSpec& spec);

// Builtins: line, square_lattice, hexagonal, lieb, ab_bilayer, fik.
OperatorSpec builtin(const std::string& name, const Params& params);
std::vector<std::string> builtin_names();
// Parameter names (with defaults where one exists) accepted by a builtin.
std::vector<std::pair<std::string, std::optional<GaussianRational>>> builtin_parameters(const std::string& name);

// "a=-1,b=1/2" -> params
Params parse_params(const std::string& text);

using RationalMatrix = std::vector<std::vector<GaussianRational>>;

bool is_hermitian(const RationalMatrix& k);

// A = I_s (x) base + K (x) I on s*|W| vertices; layer-major vertex order,
// names "<base name>@<layer>" with layers counted from 1.
OperatorSpec build_multilayer(const OperatorSpec& base, const RationalMatrix& coupling);

}  // namespace blochlab
