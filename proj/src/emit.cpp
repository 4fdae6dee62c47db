#include "blochlab/emit.hpp"

#include <cstdio>
#include <numbers>
#include <sstream>

namespace blochlab {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json interval_list(const std::vector<Interval>& v) {
    json out = json::array();
    for (const auto& i : v) out.push_back({i.lo, i.hi});
    return out;
}

json factor_json(const Factor& f) {
    json j{{"multiplicity", f.multiplicity}, {"unit", f.unit}, {"numeric", numeric_poly_to_json(f.numeric)}};
    if (f.exact) {
        j["polynomial"] = laurent_to_json(*f.exact);
        j["printed"] = f.exact->to_string();
    } else {
        j["printed"] = f.numeric.to_string();
    }
    return j;
}

}  // namespace

json report_json(const SpectralReport& report, const json& meta) {
    json flat = json::array();
    for (const auto& fb : report.flat_bands) {
        json f{{"energy", complex_to_json(fb.energy)},
               {"exact", fb.exact_flag()},
               {"multiplicity", fb.multiplicity},
               {"grid_bands", fb.grid_bands}};
        if (fb.exact) f["energy_exact"] = fb.exact->to_string();
        flat.push_back(f);
    }
    return {{"meta", meta},
            {"resolution", report.resolution},
            {"bands", interval_list(report.bands)},
            {"spectrum", interval_list(report.spectrum)},
            {"flat_bands", flat},
            {"refined", report.refined}};
}

json fermi_json(const FermiSection& s, const json& meta) {
    json curves = json::array();
    for (const auto& line : s.curves) {
        json pts = json::array();
        for (const auto& p : line) pts.push_back({p[0], p[1]});
        curves.push_back(pts);
    }
    json points = json::array();
    for (const auto& p : s.points) points.push_back({p[0], p[1]});
    json j{{"meta", meta},
           {"lambda0", s.lambda0_exact ? json(s.lambda0_exact->to_string()) : complex_to_json(s.lambda0)},
           {"numeric_polynomial", numeric_poly_to_json(s.numeric_polynomial)},
           {"curves", curves},
           {"points", points},
           {"resolution", s.resolution},
           {"vertex_bound", s.vertex_bound},
           {"low_confidence", s.low_confidence},
           {"window", {0.0, 2.0 * std::numbers::pi}},
           {"display_window", {-0.5 * std::numbers::pi, 1.5 * std::numbers::pi}}};
    if (s.polynomial) {
        j["polynomial"] = laurent_to_json(*s.polynomial);
        j["printed"] = s.polynomial->to_string();
    } else {
        j["polynomial"] = nullptr;
    }
    return j;
}

json certificate_json(const FactorizationCertificate& c, const json& meta) {
    json factors = json::array();
    for (const auto& f : c.factors) factors.push_back(factor_json(f));
    return {{"meta", meta},
            {"kind", to_string(c.kind)},
            {"provenance", to_string(c.provenance)},
            {"target", laurent_to_json(c.target)},
            {"target_printed", c.target.to_string()},
            {"factors", factors},
            {"factor_count", c.factor_count()},
            {"residual",
             {{"samples", c.residual.samples},
              {"max_relative", c.residual.max_relative},
              {"mean_relative", c.residual.mean_relative},
              {"tolerance", c.residual.tolerance},
              {"seed", c.residual.seed}}}};
}

json composite_json(const CompositeResult& r, const json& meta) {
    if (!r.success()) return {{"meta", meta}, {"success", false}, {"failure", r.failure}};
    json j = certificate_json(*r.certificate, meta);
    j["success"] = true;
    json coeffs = json::array();
    for (const auto& c : r.composite_coefficients) coeffs.push_back(c.to_string());
    j["composite_coefficients"] = coeffs;
    j["monomial_shift"] = r.monomial_shift;
    return j;
}

json critical_json(const CriticalSearch& s, const std::vector<EdgeAudit>& audit, const json& meta) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back({{"k", p.k},
                       {"band", p.band},
                       {"energy", p.energy},
                       {"gradient_norm", p.gradient_norm},
                       {"hessian", matrix_json(p.hessian)},
                       {"classification", to_string(p.kind)},
                       {"isolated", p.isolated},
                       {"multiplicity", p.multiplicity},
                       {"gap", p.gap}});
    json edges = json::array();
    for (const auto& a : audit) {
        json att = json::array();
        for (const auto& e : a.attained) att.push_back({{"point", e.point}, {"nondegenerate", e.nondegenerate}});
        edges.push_back({{"band", a.band},
                         {"edge", a.upper ? "max" : "min"},
                         {"energy", a.energy},
                         {"attained", att},
                         {"multiplicity", a.multiplicity},
                         {"verdict", to_string(a.verdict)}});
    }
    json failures = json::array();
    for (const auto& f : s.failures) failures.push_back({{"seed", f.seed}, {"band", f.band}, {"reason", f.reason}});
    const auto& o = s.options;
    return {{"meta", meta},
            {"points", pts},
            {"edge_audit", edges},
            {"isolated_count", s.isolated_count()},
            {"crossing_count", s.crossing_count()},
            {"seeds", s.seeds},
            {"failures", failures},
            {"spectral_width", s.spectral_width},
            {"tolerances",
             {{"refine", o.refine_tol},
              {"cluster", o.cluster_tol},
              {"gap", o.gap_tol},
              {"hess", o.hess_tol},
              {"match", o.match_tol},
              {"chain_length", o.chain_length}}}};
}

json polytope_json(const NewtonPolytope& p, const LaurentPoly& d, const json& meta) {
    json faces = json::array();
    for (const auto& f : p.faces) {
        json pts = json::array();
        for (std::size_t i : f.points) pts.push_back(p.support[i]);
        json face{{"normal", f.normal}, {"dimension", f.dimension}, {"points", pts}, {"improper", f.improper}};
        if (p.supported) face["facial_form"] = facial_form(d, p, f).to_string();
        faces.push_back(face);
    }
    json verts = json::array();
    for (std::size_t i : p.hull_vertices) verts.push_back(p.support[i]);
    json vertical = json::array();
    for (const auto& f : vertical_faces(p)) vertical.push_back(f.normal);
    return {{"meta", meta},
            {"dimension", p.dimension},
            {"support", p.support},
            {"hull_vertices", verts},
            {"faces", faces},
            {"vertical_face_normals", vertical},
            {"normalized_volume", p.normalized_volume},
            {"hull_dimension", p.hull_dimension},
            {"degenerate", p.degenerate},
            {"supported", p.supported}};
}

json window_to_json(const RealSpaceWindow& w) {
    json box = json::array();
    for (std::size_t i = 0; i < w.lo.size(); ++i) box.push_back({w.lo[i], w.hi[i]});
    json values = json::array();
    for (const auto& v : w.values) values.push_back(complex_to_json(v));
    return {{"box", box}, {"cell_size", w.cell_size}, {"values", values}};
}

RealSpaceWindow window_from_json(const json& j) {
    std::vector<int> lo, hi;
    for (const auto& b : j.at("box")) {
        lo.push_back(b.at(0).get<int>());
        hi.push_back(b.at(1).get<int>());
    }
    RealSpaceWindow w = RealSpaceWindow::zeros(lo, hi, j.at("cell_size").get<std::size_t>());
    const auto& vals = j.at("values");
    if (vals.size() != w.values.size()) throw WindowError("window value count does not match the box");
    for (std::size_t i = 0; i < vals.size(); ++i) w.values[i] = complex_from_json(vals[i]);
    return w;
}

json mode_json(const ModeResult& m, const RealSpaceWindow* sample, const json& meta) {
    json j{{"meta", meta},
           {"kernel_dimension", m.kernel_dimension},
           {"singular_values", m.singular_values},
           {"tolerance", m.tolerance},
           {"abs_dispersion", m.abs_dispersion},
           {"found", m.mode.has_value()}};
    if (m.mode) {
        json weight = json::array(), amp = json::array();
        for (auto w : m.mode->weight) weight.push_back(complex_to_json(w));
        for (Eigen::Index i = 0; i < m.mode->amplitude.size(); ++i) amp.push_back(complex_to_json(m.mode->amplitude(i)));
        j["weight"] = weight;
        j["amplitude"] = amp;
        if (sample) j["window"] = window_to_json(*sample);
    }
    return j;
}

json resolvent_json(const ResolventResult& r, const json& meta) {
    return {{"meta", meta},
            {"resolution", r.resolution},
            {"min_abs_dispersion", r.min_abs_dispersion},
            {"min_singular_value", r.min_singular_value},
            {"quadrature_error_estimate", r.quadrature_error_estimate},
            {"window", window_to_json(r.u)}};
}

std::string bands_csv(const BandGrid& grid, const json& meta) {
    std::ostringstream s;
    s << "# " << meta.dump() << '\n';
    for (int i = 0; i < grid.dimension(); ++i) s << (i ? "," : "") << 'k' << i + 1;
    for (std::size_t j = 0; j < grid.bands; ++j) s << ",lambda" << j + 1;
    s << '\n';
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
        const auto k = grid.k_of(p);
        for (std::size_t i = 0; i < k.size(); ++i) s << (i ? "," : "") << fmt(k[i]);
        for (std::size_t j = 0; j < grid.bands; ++j) s << ',' << fmt(grid.energy(p, j));
        s << '\n';
    }
    return s.str();
}

std::string dos_csv(const DensityOfStates& dos, const json& meta) {
    std::ostringstream s;
    s << "# " << meta.dump() << '\n' << "bin_center,density\n";
    for (std::size_t i = 0; i < dos.bins(); ++i) s << fmt(dos.bin_center(i)) << ',' << fmt(dos.density(i)) << '\n';
    return s.str();
}

}  // namespace blochlab
