#include "blochlab/graph_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "blochlab/io.hpp"

namespace blochlab {

namespace {

using EdgeKey = std::tuple<std::string, std::string, std::vector<int>>;

std::string describe(const EdgeRecord& e) {
    std::ostringstream os;
    os << e.to_vertex << " <- " << e.from_vertex << " offset (";
    for (std::size_t i = 0; i < e.offset.size(); ++i) os << (i ? "," : "") << e.offset[i];
    os << ")";
    return os.str();
}

std::vector<int> negated(const std::vector<int>& v) {
    std::vector<int> out(v);
    for (int& x : out) x = -x;
    return out;
}

PeriodicGraph validated(PeriodicGraph g) {
    if (g.dimension < 1) throw SpecError("dimension must be a positive integer");
    if (g.vertices.empty()) throw SpecError("graph has no vertices");
    std::set<std::string> names;
    for (const auto& v : g.vertices) {
        if (v.name.empty()) throw SpecError("empty vertex name");
        if (!names.insert(v.name).second) throw SpecError("duplicate vertex name '" + v.name + "'");
    }

    std::map<EdgeKey, GaussianRational> seen;
    std::vector<EdgeRecord> edges;
    for (const auto& e : g.edges) {
        if (!names.count(e.to_vertex))
            throw SpecError("edge " + describe(e) + ": unknown vertex '" + e.to_vertex + "'");
        if (!names.count(e.from_vertex))
            throw SpecError("edge " + describe(e) + ": unknown vertex '" + e.from_vertex + "'");
        if (static_cast<int>(e.offset.size()) != g.dimension)
            throw SpecError("edge " + describe(e) + ": offset arity " + std::to_string(e.offset.size()) +
                            " does not match dimension " + std::to_string(g.dimension));
        if (e.weight.is_zero()) throw SpecError("edge " + describe(e) + ": zero weight");
        EdgeKey key{e.to_vertex, e.from_vertex, e.offset};
        auto [it, inserted] = seen.emplace(key, e.weight);
        if (!inserted) {
            if (it->second != e.weight) throw SpecError("conflicting duplicate edge " + describe(e));
            continue;
        }
        edges.push_back(e);
    }

    if (g.hermitian_closure) {
        const std::size_t original = edges.size();
        for (std::size_t i = 0; i < original; ++i) {
            EdgeRecord rev{edges[i].from_vertex, edges[i].to_vertex, negated(edges[i].offset), edges[i].weight.conj()};
            EdgeKey key{rev.to_vertex, rev.from_vertex, rev.offset};
            auto it = seen.find(key);
            if (it != seen.end()) {
                if (it->second != rev.weight)
                    throw SpecError("hermitian closure conflicts with edge " + describe(rev));
                continue;
            }
            seen.emplace(key, rev.weight);
            edges.push_back(std::move(rev));
        }
        for (const auto& v : g.vertices)
            if (!v.potential.is_real())
                throw SpecError("vertex '" + v.name + "' has a non-real potential under hermitian closure");
    }
    g.edges = std::move(edges);
    return g;
}

bool matrix_is_reflective(const LaurentMatrix& m) {
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.size(); ++c)
            if (m(r, c).reflect_conjugate() != m(c, r)) return false;
    return true;
}

}  // namespace

std::size_t PeriodicGraph::vertex_index(const std::string& name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].name == name) return i;
    throw SpecError("unknown vertex '" + name + "'");
}

OperatorSpec OperatorSpec::from_graph(PeriodicGraph g) { return OperatorSpec(validated(std::move(g))); }

OperatorSpec OperatorSpec::from_matrix(DirectMatrix m) {
    if (m.dimension < 1) throw SpecError("dimension must be a positive integer");
    if (m.matrix.size() == 0) throw SpecError("direct matrix is empty");
    if (m.matrix.dimension() != m.dimension) throw SpecError("direct matrix entries have the wrong dimension");
    for (std::size_t r = 0; r < m.matrix.size(); ++r)
        for (std::size_t c = 0; c < m.matrix.size(); ++c)
            if (!m.matrix(r, c).is_lambda_free())
                throw SpecError("direct matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                                ") depends on lambda");
    if (m.self_adjoint && !matrix_is_reflective(m.matrix))
        throw SpecError("direct matrix flagged self-adjoint violates entry(v,w)(1/conj z) = conj(entry(w,v)(z))");
    return OperatorSpec(std::move(m));
}

int OperatorSpec::dimension() const {
    return std::visit([](const auto& b) { return b.dimension; }, body_);
}

std::size_t OperatorSpec::cell_size() const {
    if (is_graph()) return graph().vertices.size();
    return direct().matrix.size();
}

std::vector<std::string> OperatorSpec::vertex_names() const {
    std::vector<std::string> out;
    if (is_graph()) {
        for (const auto& v : graph().vertices) out.push_back(v.name);
    } else {
        for (std::size_t i = 0; i < direct().matrix.size(); ++i) out.push_back(std::to_string(i));
    }
    return out;
}

bool OperatorSpec::is_self_adjoint() const {
    if (!is_graph()) return matrix_is_reflective(direct().matrix);
    const auto& g = graph();
    for (const auto& v : g.vertices)
        if (!v.potential.is_real()) return false;
    std::map<EdgeKey, GaussianRational> weights;
    for (const auto& e : g.edges) weights.emplace(EdgeKey{e.to_vertex, e.from_vertex, e.offset}, e.weight);
    for (const auto& e : g.edges) {
        auto it = weights.find(EdgeKey{e.from_vertex, e.to_vertex, negated(e.offset)});
        if (it == weights.end() || it->second != e.weight.conj()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// File format

OperatorSpec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("malformed document: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw SpecError("malformed document: top level must be an object");
        if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
            throw SpecError("malformed document: integer 'dimension' is required");
        const int d = doc["dimension"].get<int>();
        if (d < 1) throw SpecError("dimension must be a positive integer");

        if (doc.contains("direct_matrix")) {
            if (doc.contains("vertices") || doc.contains("edges"))
                throw SpecError("malformed document: 'direct_matrix' replaces 'vertices'/'edges'");
            const json& rows = doc["direct_matrix"];
            if (!rows.is_array() || rows.empty()) throw SpecError("malformed document: 'direct_matrix' must be a list");
            std::size_t n = 0;
            while (n * n < rows.size()) ++n;
            if (n * n != rows.size()) throw SpecError("malformed document: 'direct_matrix' length is not a square");
            DirectMatrix dm{d, LaurentMatrix(d, n), doc.value("self_adjoint", true)};
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (!rows[k].is_array()) throw SpecError("malformed document: matrix entry must be a term list");
                LaurentPoly p(d);
                for (const auto& term : rows[k]) {
                    auto exps = term.at("exponents").get<std::vector<int>>();
                    if (static_cast<int>(exps.size()) != d)
                        throw SpecError("matrix entry term: exponent arity does not match dimension");
                    p.add_term(Exponent{exps, 0}, rational_from_json(term.at("coeff")));
                }
                dm.matrix(k / n, k % n) = std::move(p);
            }
            return OperatorSpec::from_matrix(std::move(dm));
        }

        PeriodicGraph g;
        g.dimension = d;
        g.hermitian_closure = doc.value("hermitian_closure", true);
        if (!doc.contains("vertices") || !doc["vertices"].is_array())
            throw SpecError("malformed document: 'vertices' list is required");
        for (const auto& v : doc["vertices"]) {
            if (!v.is_object() || !v.contains("name") || !v["name"].is_string())
                throw SpecError("malformed document: vertex needs a string 'name'");
            GaussianRational pot = v.contains("potential") ? rational_from_json(v["potential"]) : GaussianRational(0);
            g.vertices.push_back({v["name"].get<std::string>(), pot});
        }
        for (const auto& e : doc.value("edges", json::array())) {
            if (!e.is_object()) throw SpecError("malformed document: edge must be an object");
            for (const char* key : {"to", "from", "offset", "weight"})
                if (!e.contains(key)) throw SpecError(std::string("malformed document: edge missing '") + key + "'");
            if (!e["offset"].is_array()) throw SpecError("malformed document: edge 'offset' must be an int array");
            EdgeRecord rec;
            rec.to_vertex = e["to"].get<std::string>();
            rec.from_vertex = e["from"].get<std::string>();
            for (const auto& o : e["offset"]) {
                if (!o.is_number_integer()) throw SpecError("malformed document: edge 'offset' must be an int array");
                rec.offset.push_back(o.get<int>());
            }
            rec.weight = rational_from_json(e["weight"]);
            g.edges.push_back(std::move(rec));
        }
        return OperatorSpec::from_graph(std::move(g));
    } catch (const ParseError& e) {
        throw SpecError(std::string("bad rational: ") + e.what());
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed document: ") + e.what());
    }
}

std::string serialize_spec(const OperatorSpec& spec) {
    json doc;
    doc["dimension"] = spec.dimension();
    if (spec.is_graph()) {
        const auto& g = spec.graph();
        doc["hermitian_closure"] = g.hermitian_closure;
        doc["vertices"] = json::array();
        for (const auto& v : g.vertices)
            doc["vertices"].push_back({{"name", v.name}, {"potential", v.potential.to_string()}});
        doc["edges"] = json::array();
        for (const auto& e : g.edges)
            doc["edges"].push_back(
                {{"to", e.to_vertex}, {"from", e.from_vertex}, {"offset", e.offset}, {"weight", e.weight.to_string()}});
    } else {
        const auto& dm = spec.direct();
        doc["self_adjoint"] = dm.self_adjoint;
        doc["direct_matrix"] = json::array();
        for (std::size_t r = 0; r < dm.matrix.size(); ++r)
            for (std::size_t c = 0; c < dm.matrix.size(); ++c) {
                json terms = json::array();
                for (const auto& [e, coeff] : dm.matrix(r, c).terms())
                    terms.push_back({{"coeff", coeff.to_string()}, {"exponents", e.z}});
                doc["direct_matrix"].push_back(std::move(terms));
            }
    }
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

const std::map<std::string, std::vector<std::string>>& builtin_table() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"line", {"V"}},
        {"square_lattice", {"V"}},
        {"hexagonal", {"a", "b", "c", "Vv", "Vw"}},
        {"lieb", {"Vu", "Vv", "Vw"}},
        {"ab_bilayer", {"Delta", "gamma1", "gamma4"}},
        {"fik", {"a", "b", "c", "d", "e", "Vu", "Vv"}},
    };
    return table;
}

const GaussianRational& param(const Params& p, const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw SpecError("missing parameter '" + name + "'");
    return it->second;
}

LaurentPoly lin(int d, std::initializer_list<std::pair<std::vector<int>, GaussianRational>> terms) {
    LaurentPoly p(d);
    for (const auto& [e, c] : terms) p.add_term(Exponent{e, 0}, c);
    return p;
}

}  // namespace

std::vector<std::string> builtin_names() {
    std::vector<std::string> out;
    for (const auto& [name, params] : builtin_table()) out.push_back(name);
    return out;
}

std::vector<std::pair<std::string, std::optional<GaussianRational>>> builtin_parameters(const std::string& name) {
    auto it = builtin_table().find(name);
    if (it == builtin_table().end()) throw SpecError("unknown builtin '" + name + "'");
    std::vector<std::pair<std::string, std::optional<GaussianRational>>> out;
    for (const auto& p : it->second) out.emplace_back(p, std::nullopt);
    return out;
}

OperatorSpec builtin(const std::string& name, const Params& params) {
    auto it = builtin_table().find(name);
    if (it == builtin_table().end()) throw SpecError("unknown builtin '" + name + "'");
    for (const auto& [key, value] : params)
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
            throw SpecError("builtin '" + name + "' has no parameter '" + key + "'");
    const GaussianRational one(1), minus_one(-1);

    if (name == "line") {
        // (Af)(n) = -f(n-1) + V f(n) - f(n+1)
        PeriodicGraph g{1, {{"v", param(params, "V")}}, {{"v", "v", {1}, minus_one}}, true};
        return OperatorSpec::from_graph(std::move(g));
    }
    if (name == "square_lattice") {
        PeriodicGraph g{2, {{"v", param(params, "V")}}, {{"v", "v", {1, 0}, minus_one}, {"v", "v", {0, 1}, minus_one}},
                        true};
        return OperatorSpec::from_graph(std::move(g));
    }
    if (name == "hexagonal") {
        // v is joined to w, w-(1,0), w-(0,1) with labels a, b, c.
        PeriodicGraph g{2,
                        {{"v", param(params, "Vv")}, {"w", param(params, "Vw")}},
                        {{"v", "w", {0, 0}, param(params, "a")},
                         {"v", "w", {-1, 0}, param(params, "b")},
                         {"v", "w", {0, -1}, param(params, "c")}},
                        true};
        return OperatorSpec::from_graph(std::move(g));
    }
    if (name == "lieb") {
        // u has degree 4; v sits on the horizontal edge, w on the vertical one.
        PeriodicGraph g{2,
                        {{"u", param(params, "Vu")}, {"v", param(params, "Vv")}, {"w", param(params, "Vw")}},
                        {{"u", "v", {0, 0}, one},
                         {"u", "v", {-1, 0}, one},
                         {"u", "w", {0, 0}, one},
                         {"u", "w", {0, -1}, one}},
                        true};
        return OperatorSpec::from_graph(std::move(g));
    }
    if (name == "fik") {
        // Five edge orbits between u and v; with b=d and c=e the off-diagonal
        // symbol is a + b(x + 1/x) + c(y + 1/y).
        PeriodicGraph g{2,
                        {{"u", param(params, "Vu")}, {"v", param(params, "Vv")}},
                        {{"u", "v", {0, 0}, param(params, "a")},
                         {"u", "v", {1, 0}, param(params, "b")},
                         {"u", "v", {0, 1}, param(params, "c")},
                         {"u", "v", {-1, 0}, param(params, "d")},
                         {"u", "v", {0, -1}, param(params, "e")}},
                        true};
        return OperatorSpec::from_graph(std::move(g));
    }
    // ab_bilayer, basis (1A, 1B, 2A, 2B)
    const GaussianRational& delta = param(params, "Delta");
    const GaussianRational& g1 = param(params, "gamma1");
    const GaussianRational& g4 = param(params, "gamma4");
    if (!delta.is_real() || !g1.is_real() || !g4.is_real())
        throw SpecError("ab_bilayer parameters must be real");
    const int d = 2;
    LaurentPoly zeta = lin(d, {{{0, 0}, one}, {{1, 0}, one}, {{0, 1}, one}});
    LaurentPoly zeta_p = lin(d, {{{0, 0}, one}, {{-1, 0}, one}, {{0, -1}, one}});
    auto c = [&](const GaussianRational& v) { return LaurentPoly::constant(d, v); };
    LaurentMatrix m(d, 4);
    m(0, 0) = c(delta);
    m(0, 1) = zeta_p;
    m(0, 2) = g4 * zeta_p;
    m(1, 0) = zeta;
    m(1, 1) = c(delta);
    m(1, 2) = c(g1);
    m(1, 3) = g4 * zeta_p;
    m(2, 0) = g4 * zeta;
    m(2, 1) = c(g1);
    m(2, 2) = c(-delta);
    m(2, 3) = zeta_p;
    m(3, 1) = g4 * zeta;
    m(3, 2) = zeta;
    m(3, 3) = c(-delta);
    return OperatorSpec::from_matrix(DirectMatrix{d, std::move(m), true});
}

Params parse_params(const std::string& text) {
    Params out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw SpecError("parameter '" + item + "' is not key=value");
        std::string key = item.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        try {
            out[key] = GaussianRational::parse(item.substr(eq + 1));
        } catch (const ParseError& e) {
            throw SpecError("parameter '" + key + "': " + e.what());
        }
    }
    return out;
}

bool is_hermitian(const RationalMatrix& k) {
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i].size() != k.size()) return false;
        for (std::size_t j = 0; j < k.size(); ++j)
            if (k[i][j] != k[j][i].conj()) return false;
    }
    return true;
}

OperatorSpec build_multilayer(const OperatorSpec& base, const RationalMatrix& coupling) {
    const std::size_t s = coupling.size();
    if (s == 0) throw SpecError("coupling matrix is empty");
    for (const auto& row : coupling)
        if (row.size() != s) throw SpecError("coupling matrix is not square");
    if (!is_hermitian(coupling)) throw SpecError("coupling matrix is not Hermitian");

    if (base.is_graph()) {
        const auto& g = base.graph();
        PeriodicGraph out;
        out.dimension = g.dimension;
        out.hermitian_closure = false;
        auto layer_name = [](const std::string& n, std::size_t layer) { return n + "@" + std::to_string(layer + 1); };
        for (std::size_t l = 0; l < s; ++l)
            for (const auto& v : g.vertices) out.vertices.push_back({layer_name(v.name, l), v.potential + coupling[l][l]});
        for (std::size_t l = 0; l < s; ++l)
            for (const auto& e : g.edges)
                out.edges.push_back({layer_name(e.to_vertex, l), layer_name(e.from_vertex, l), e.offset, e.weight});
        const std::vector<int> zero(g.dimension, 0);
        for (std::size_t l = 0; l < s; ++l)
            for (std::size_t m = 0; m < s; ++m) {
                if (l == m || coupling[l][m].is_zero()) continue;
                for (const auto& v : g.vertices)
                    out.edges.push_back({layer_name(v.name, l), layer_name(v.name, m), zero, coupling[l][m]});
            }
        return OperatorSpec::from_graph(std::move(out));
    }

    const auto& dm = base.direct();
    const std::size_t n = dm.matrix.size();
    DirectMatrix out{dm.dimension, LaurentMatrix(dm.dimension, s * n), dm.self_adjoint};
    for (std::size_t l = 0; l < s; ++l)
        for (std::size_t m = 0; m < s; ++m)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    LaurentPoly entry(dm.dimension);
                    if (l == m) entry += dm.matrix(i, j);
                    if (i == j) entry += LaurentPoly::constant(dm.dimension, coupling[l][m]);
                    out.matrix(l * n + i, m * n + j) = std::move(entry);
                }
    return OperatorSpec::from_matrix(std::move(out));
}

}  // namespace blochlab
