#include "blochlab/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blochlab/emit.hpp"

namespace blochlab::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double refine = 1e-10;
    double cluster = 1e-6;
    double gap = 1e-6;
    double hess = 1e-6;
    double match = 1e-8;
    double chain = 8;
    double mode = 0.0;  // 0: relative default 1e-8 * ||A(zeta)||
    double certificate = 1e-8;
    double commute = 1e-10;
};

struct Config {
    std::string subcommand;
    std::string builtin_name;
    std::string params;
    std::string input;
    std::string resolution;
    std::string lambda0;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    Tolerances tol;
    // Subcommand-specific.
    std::size_t bins = 64;
    std::string method = "linear";
    std::string range;
    std::string mechanism;
    std::string matrix;
    std::string g;
    std::string k;
    std::string zeta;
    std::string box;
    std::string window;

    json to_json() const {
        json j{{"subcommand", subcommand}, {"out", out_dir}, {"seed", seed}};
        if (!builtin_name.empty()) j["builtin"] = builtin_name;
        if (!params.empty()) j["params"] = params;
        if (!input.empty()) j["input"] = input;
        if (!resolution.empty()) j["resolution"] = resolution;
        if (!lambda0.empty()) j["lambda0"] = lambda0;
        j["tolerances"] = {{"refine", tol.refine},   {"cluster", tol.cluster}, {"gap", tol.gap},
                           {"hess", tol.hess},       {"match", tol.match},     {"chain", tol.chain},
                           {"mode", tol.mode},       {"certificate", tol.certificate},
                           {"commute", tol.commute}};
        if (subcommand == "dos") {
            j["bins"] = bins;
            j["method"] = method;
            if (!range.empty()) j["range"] = range;
        }
        if (subcommand == "certify") {
            j["mechanism"] = mechanism;
            if (!matrix.empty()) j["matrix"] = matrix;
            if (!g.empty()) j["g"] = g;
        }
        if (!k.empty()) j["k"] = k;
        if (!zeta.empty()) j["zeta"] = zeta;
        if (!box.empty()) j["box"] = box;
        if (!window.empty()) j["window"] = window;
        return j;
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

OperatorSpec load_spec(const Config& c) {
    if (!c.input.empty() && !c.builtin_name.empty()) throw UsageError("give either --input or --builtin, not both");
    if (!c.input.empty()) return parse_spec(read_text_file(c.input));
    if (!c.builtin_name.empty()) return builtin(c.builtin_name, parse_params(c.params));
    throw UsageError("an operator is required: --input PATH or --builtin NAME");
}

std::vector<int> resolution_for(const Config& c, int d, int fallback) {
    if (c.resolution.empty()) return std::vector<int>(d, fallback);
    std::vector<int> r;
    for (const auto& s : split(c.resolution, ',')) {
        try {
            r.push_back(std::stoi(s));
        } catch (const std::exception&) {
            throw UsageError("bad --resolution '" + c.resolution + "'");
        }
    }
    if (r.size() == 1) r.assign(d, r[0]);
    if (static_cast<int>(r.size()) != d) throw UsageError("--resolution needs 1 or d values");
    for (int v : r)
        if (v < 2) throw UsageError("--resolution values must be >= 2");
    return r;
}

GaussianRational require_lambda0(const Config& c) {
    if (c.lambda0.empty()) throw UsageError("--lambda0 is required");
    return GaussianRational::parse(c.lambda0);
}

RationalMatrix parse_matrix(const std::string& text) {
    if (text.empty()) throw UsageError("--matrix is required, rows separated by ';', entries by ','");
    RationalMatrix m;
    for (const auto& row : split(text, ';')) {
        std::vector<GaussianRational> r;
        for (const auto& e : split(row, ',')) r.push_back(GaussianRational::parse(e));
        m.push_back(std::move(r));
    }
    return m;
}

std::pair<int, int> parse_box(const std::string& text, std::pair<int, int> fallback) {
    if (text.empty()) return fallback;
    auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--box must be LO,HI");
    return {std::stoi(parts[0]), std::stoi(parts[1])};
}

std::filesystem::path out_path(const Config& c, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
    return std::filesystem::path(c.out_dir) / name;
}

void emit(const Config& c, const std::string& name, const std::string& text, std::ostream& out) {
    const auto p = out_path(c, name);
    write_text_file(p.string(), text);
    out << "wrote " << p.string() << '\n';
}

void emit_json(const Config& c, const std::string& name, const json& j, std::ostream& out) {
    emit(c, name, j.dump(2) + "\n", out);
}

int execute(const Config& c, std::ostream& out) {
    const json meta{{"tool", "blochlab"}, {"version", kVersion}, {"config", c.to_json()}, {"seed", c.seed}};

    if (c.subcommand == "validate") {
        const OperatorSpec spec = load_spec(c);
        out << "valid: dimension=" << spec.dimension() << " cells=" << spec.cell_size()
            << " kind=" << (spec.is_graph() ? "graph" : "direct_matrix")
            << " self_adjoint=" << (spec.is_self_adjoint() ? "true" : "false");
        if (spec.is_graph()) out << " edges=" << spec.graph().edges.size();
        out << '\n';
        return kOk;
    }

    const OperatorSpec spec = load_spec(c);
    const int d = spec.dimension();

    if (c.subcommand == "dispersion") {
        const LaurentPoly dd = dispersion(spec);
        out << dd.to_string() << '\n';
        emit_json(c, "dispersion.json",
                  {{"meta", meta},
                   {"polynomial", laurent_to_json(dd)},
                   {"printed", dd.to_string()},
                   {"reflection_identity", dd.reflect_conjugate() == dd}},
                  out);
        return kOk;
    }
    if (c.subcommand == "bands") {
        const BandGrid grid = band_grid(spec, resolution_for(c, d, 64));
        emit(c, "bands.csv", bands_csv(grid, meta), out);
        emit_json(c, "report.json", report_json(spectral_report(grid, spec), meta), out);
        return kOk;
    }
    if (c.subcommand == "dos") {
        const BandGrid grid = band_grid(spec, resolution_for(c, d, d == 1 ? 512 : 128));
        DosMethod method;
        if (c.method == "linear")
            method = DosMethod::Linear;
        else if (c.method == "histogram")
            method = DosMethod::Histogram;
        else
            throw UsageError("--method must be linear or histogram");
        std::optional<Interval> range;
        if (!c.range.empty()) {
            auto parts = split(c.range, ',');
            if (parts.size() != 2) throw UsageError("--range must be LO,HI");
            range = Interval{std::stod(parts[0]), std::stod(parts[1])};
        }
        emit(c, "dos.csv", dos_csv(density_of_states(grid, c.bins, range, method), meta), out);
        return kOk;
    }
    if (c.subcommand == "fermi") {
        FermiOptions fo;
        fo.extract_curves = d == 2;
        if (fo.extract_curves) fo.resolution = resolution_for(c, d, 256);
        const FermiSection s = fermi_section(spec, require_lambda0(c), fo);
        out << "curves=" << s.curves.size() << " points=" << s.points.size() << '\n';
        emit_json(c, "fermi.json", fermi_json(s, meta), out);
        return kOk;
    }
    if (c.subcommand == "certify") {
        CertificateOptions co;
        co.seed = c.seed;
        co.tolerance = c.tol.certificate;
        co.commute_tol = c.tol.commute;
        json doc;
        if (c.mechanism == "symmetry") {
            const auto cert = symmetry_factorize(spec, parse_matrix(c.matrix), co);
            doc = certificate_json(cert, meta);
        } else if (c.mechanism == "multilayer") {
            const auto cert = multilayer_factorize(spec, parse_matrix(c.matrix), co);
            doc = certificate_json(cert, meta);
        } else if (c.mechanism == "composite") {
            if (c.g.empty()) throw UsageError("--g is required for the composite mechanism");
            const auto res = composite_factorize(spec, require_lambda0(c), parse_laurent(c.g, d), co);
            doc = composite_json(res, meta);
        } else if (c.mechanism == "flatband") {
            const auto cert = flatband_factorize(spec);
            if (cert) {
                doc = certificate_json(*cert, meta);
                doc["success"] = true;
            } else {
                doc = {{"meta", meta}, {"success", false}, {"failure", "no flat band: lambda-coefficient gcd is constant"}};
            }
        } else {
            throw UsageError("--mechanism must be symmetry, multilayer, composite or flatband");
        }
        if (doc.contains("kind")) out << doc["kind"].get<std::string>() << " certificate, " << doc["factor_count"] << " factors\n";
        if (doc.contains("success") && !doc["success"].get<bool>()) out << "no certificate: " << doc["failure"].get<std::string>() << '\n';
        emit_json(c, "certificate.json", doc, out);
        return kOk;
    }
    if (c.subcommand == "critical") {
        const BandGrid grid = band_grid(spec, resolution_for(c, d, 64));
        CriticalOptions co;
        co.refine_tol = c.tol.refine;
        co.cluster_tol = c.tol.cluster;
        co.gap_tol = c.tol.gap;
        co.hess_tol = c.tol.hess;
        co.match_tol = c.tol.match;
        co.chain_length = static_cast<std::size_t>(c.tol.chain);
        const CriticalSearch search = find_critical_points(spec, grid, co);
        const SpectralReport report = refine_report(spectral_report(grid, spec), search);
        const auto audit = spectral_edge_report(search, report);
        out << "critical points: " << search.isolated_count() << " isolated, " << search.crossing_count()
            << " band crossings\n";
        emit_json(c, "critical.json", critical_json(search, audit, meta), out);
        emit_json(c, "report.json", report_json(report, meta), out);
        emit(c, "cpe.txt", cpe_text(dispersion(spec)), out);
        return kOk;
    }
    if (c.subcommand == "polytope") {
        const LaurentPoly dd = dispersion(spec);
        const NewtonPolytope p = newton_polytope(dd);
        out << "normalized_volume=" << p.normalized_volume << (p.degenerate ? " (degenerate)" : "")
            << (p.supported ? "" : " (hull not supported for d >= 3)") << '\n';
        emit_json(c, "polytope.json", polytope_json(p, dd, meta), out);
        emit(c, "cpe.txt", cpe_text(dd), out);
        return kOk;
    }
    if (c.subcommand == "apply") {
        if (c.window.empty()) throw UsageError("--window PATH is required");
        const RealSpaceWindow f = window_from_json(json::parse(read_text_file(c.window)));
        const RealSpaceWindow af = apply_operator(spec, f);
        emit_json(c, "apply.json", {{"meta", meta}, {"window", window_to_json(af)}}, out);
        return kOk;
    }
    if (c.subcommand == "mode") {
        std::vector<Complex> zeta;
        if (!c.k.empty()) {
            for (const auto& s : split(c.k, ',')) zeta.push_back(std::polar(1.0, std::stod(s)));
        } else if (!c.zeta.empty()) {
            for (const auto& s : split(c.zeta, ',')) zeta.push_back(GaussianRational::parse(s).to_complex());
        } else {
            throw UsageError("--k or --zeta is required");
        }
        if (static_cast<int>(zeta.size()) != d) throw UsageError("--k/--zeta needs d values");
        std::optional<double> tol;
        if (c.tol.mode > 0) tol = c.tol.mode;
        const ModeResult m = floquet_mode(spec, zeta, require_lambda0(c).to_complex(), tol);
        out << "kernel_dimension=" << m.kernel_dimension << '\n';
        std::optional<RealSpaceWindow> sample;
        if (m.mode) {
            const auto [lo, hi] = parse_box(c.box, {0, 3});
            sample = m.mode->sample(std::vector<int>(d, lo), std::vector<int>(d, hi));
        }
        emit_json(c, "mode.json", mode_json(m, sample ? &*sample : nullptr, meta), out);
        return kOk;
    }
    if (c.subcommand == "resolvent") {
        const Complex lambda = require_lambda0(c).to_complex();
        RealSpaceWindow f;
        if (!c.window.empty()) {
            f = window_from_json(json::parse(read_text_file(c.window)));
        } else {
            f = RealSpaceWindow::zeros(std::vector<int>(d, 0), std::vector<int>(d, 0), spec.cell_size());
            f.values[0] = 1.0;
        }
        const auto [lo, hi] = parse_box(c.box, {-5, 5});
        const ResolventResult r = resolvent_apply(spec, f, lambda, resolution_for(c, d, d == 1 ? 1024 : 128),
                                                  std::vector<int>(d, lo), std::vector<int>(d, hi));
        out << "quadrature_error_estimate=" << r.quadrature_error_estimate << '\n';
        emit_json(c, "resolvent.json", resolvent_json(r, meta), out);
        return kOk;
    }
    throw UsageError("unknown subcommand");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral analysis of periodic graph operators", "blochlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Config c;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "parse and validate an operator"},
        {"dispersion", "print and export D(z, lambda) = det(A(z) - lambda I)"},
        {"bands", "band energies on a k-grid (bands.csv, report.json)"},
        {"dos", "density of states (dos.csv)"},
        {"fermi", "Fermi section at --lambda0 (fermi.json)"},
        {"certify", "factorization certificate (certificate.json)"},
        {"critical", "critical points and spectral-edge audit (critical.json)"},
        {"polytope", "Newton polytope (polytope.json, cpe.txt)"},
        {"apply", "apply the operator to a real-space window (apply.json)"},
        {"mode", "Floquet mode at (zeta, lambda0) (mode.json)"},
        {"resolvent", "solve (A - lambda0) u = f (resolvent.json)"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->callback([&c, n = name] { c.subcommand = n; });
        sub->add_option("--builtin", c.builtin_name, "builtin operator name");
        sub->add_option("-p,--params", c.params, "builtin parameters key=val,... (rational strings)");
        sub->add_option("--input", c.input, "operator file (JSON)");
        sub->add_option("--out", c.out_dir, "output directory");
        sub->add_option("--seed", c.seed, "seed for randomized validation points");
        sub->add_option("--resolution", c.resolution, "grid size N or N,N");
        sub->add_option("--lambda0", c.lambda0, "energy (rational string)");
        sub->add_option("--tol.refine", c.tol.refine)->check(CLI::PositiveNumber);
        sub->add_option("--tol.cluster", c.tol.cluster)->check(CLI::PositiveNumber);
        sub->add_option("--tol.gap", c.tol.gap)->check(CLI::PositiveNumber);
        sub->add_option("--tol.hess", c.tol.hess)->check(CLI::PositiveNumber);
        sub->add_option("--tol.match", c.tol.match)->check(CLI::PositiveNumber);
        sub->add_option("--tol.chain", c.tol.chain)->check(CLI::PositiveNumber);
        sub->add_option("--tol.mode", c.tol.mode)->check(CLI::PositiveNumber);
        sub->add_option("--tol.certificate", c.tol.certificate)->check(CLI::PositiveNumber);
        sub->add_option("--tol.commute", c.tol.commute)->check(CLI::PositiveNumber);
        if (name == "validate") sub->add_option("path", c.input, "operator file (JSON)");
        if (name == "dos") {
            sub->add_option("--bins", c.bins, "number of bins")->check(CLI::PositiveNumber);
            sub->add_option("--method", c.method, "linear | histogram");
            sub->add_option("--range", c.range, "energy range LO,HI");
        }
        if (name == "certify") {
            sub->add_option("--mechanism", c.mechanism, "symmetry | multilayer | composite | flatband")->required();
            sub->add_option("--matrix", c.matrix, "U or K, rows ';' entries ','");
            sub->add_option("--g", c.g, "composite variable, e.g. \"(1+x+y)*(1+x^-1+y^-1)\"");
        }
        if (name == "mode") {
            sub->add_option("--k", c.k, "quasimomentum k1,k2 (zeta = exp(ik))");
            sub->add_option("--zeta", c.zeta, "Floquet multipliers (rational strings)");
            sub->add_option("--box", c.box, "sample box LO,HI per axis");
        }
        if (name == "apply" || name == "resolvent") sub->add_option("--window", c.window, "window JSON file");
        if (name == "resolvent") sub->add_option("--box", c.box, "output box LO,HI per axis");
    }

    std::vector<std::string> argv_store{"blochlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        return execute(c, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const SpecError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const WindowError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << '\n';
        return kComputation;
    }
}

}  // namespace blochlab::cli
