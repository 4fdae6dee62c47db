#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "blochlab/cli.hpp"
#include "blochlab/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace blochlab;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    static const auto base = fs::temp_directory_path() / ("blochlab_cli_" + std::to_string(std::random_device{}()));
    const auto p = base / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void check_meta(const json& meta, const std::string& subcommand) {
    CHECK(meta.at("tool") == "blochlab");
    CHECK(meta.at("version") == cli::kVersion);
    CHECK(meta.contains("seed"));
    CHECK(meta.at("config").at("subcommand") == subcommand);
}

}  // namespace

TEST_CASE("dispersion prints the polynomial and writes JSON") {
    const auto dir = scratch("dispersion");
    const auto r = run({"dispersion", "--builtin", "hexagonal", "-p", "a=-1,b=-1,c=-1,Vv=0,Vw=0", "--out", dir.string()});
    REQUIRE(r.code == cli::kOk);
    const auto first = r.out.substr(0, r.out.find('\n'));
    CHECK(parse_laurent(first, 2) == parse_laurent("lambda^2 - (1+x+y)*(1+x^-1+y^-1)", 2));
    const auto j = json::parse(slurp(dir / "dispersion.json"));
    check_meta(j.at("meta"), "dispersion");
    CHECK(j.at("reflection_identity") == true);
    CHECK(laurent_from_json(j.at("polynomial"), 2) == parse_laurent(first, 2));
}

TEST_CASE("bands.csv for the line graph") {
    const auto dir = scratch("bands");
    const auto r = run({"bands", "--builtin", "line", "-p", "V=0", "--resolution", "8", "--out", dir.string()});
    REQUIRE(r.code == cli::kOk);
    std::istringstream csv(slurp(dir / "bands.csv"));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line.rfind("# ", 0) == 0);
    check_meta(json::parse(line.substr(2)), "bands");
    std::getline(csv, line);
    CHECK(line == "k1,lambda1");
    int rows = 0;
    while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        const double k = std::stod(line.substr(0, comma)), e = std::stod(line.substr(comma + 1));
        CHECK(std::abs(e + 2 * std::cos(k)) < 1e-12);
        ++rows;
    }
    CHECK(rows == 8);
    check_meta(json::parse(slurp(dir / "report.json")).at("meta"), "bands");
}

TEST_CASE("validate reports bad documents") {
    const auto dir = scratch("validate");
    const auto good = dir / "good.json";
    std::ofstream(good) << R"({"dimension": 1, "vertices": [{"name": "v"}], "edges": [{"to": "v", "from": "v", "offset": [1], "weight": "-1"}]})";
    const auto ok = run({"validate", good.string()});
    CHECK(ok.code == cli::kOk);
    CHECK(ok.out.find("valid") != std::string::npos);

    const auto bad = dir / "bad.json";
    std::ofstream(bad) << R"({"dimension": 1, "vertices": [{"name": "v"}], "edges": [{"to": "v", "from": "ghost", "offset": [1], "weight": "1"}]})";
    const auto r = run({"validate", bad.string()});
    CHECK(r.code == cli::kValidation);
    CHECK(r.err.find("ghost") != std::string::npos);

    CHECK(run({"validate", (dir / "missing.json").string()}).code == cli::kIo);
}

TEST_CASE("exit codes") {
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"bands"}).code == cli::kUsage);
    CHECK(run({"bands", "--builtin", "line", "-p", "V=0", "--resolution", "1"}).code == cli::kUsage);
    CHECK(run({"bands", "--builtin", "kagome", "-p", "V=0"}).code == cli::kValidation);
    CHECK(run({"bands", "--builtin", "line", "-p", "V=0.5"}).code == cli::kValidation);
    const auto dir = scratch("exit");
    // Layer swap does not commute with a staggered single layer.
    const auto r = run({"certify", "--builtin", "hexagonal", "-p", "a=-1,b=-1,c=-1,Vv=0,Vw=1", "--mechanism", "symmetry",
                        "--matrix", "0,1;1,0", "--out", dir.string()});
    CHECK(r.code == cli::kComputation);
}

TEST_CASE("identical configurations emit identical bytes") {
    const auto dir = scratch("determinism");
    const std::vector<std::string> args{"critical", "--builtin", "hexagonal", "-p", "a=-1,b=-2,c=-3,Vv=0,Vw=1",
                                        "--resolution", "24", "--seed", "7", "--out", dir.string()};
    REQUIRE(run(args).code == cli::kOk);
    const auto first = slurp(dir / "critical.json");
    const auto report = slurp(dir / "report.json");
    REQUIRE(run(args).code == cli::kOk);
    CHECK(slurp(dir / "critical.json") == first);
    CHECK(slurp(dir / "report.json") == report);
    const auto j = json::parse(first);
    check_meta(j.at("meta"), "critical");
    CHECK(j.at("meta").at("seed") == 7);
    CHECK(fs::exists(dir / "cpe.txt"));
}

TEST_CASE("every emitting subcommand embeds meta") {
    const auto dir = scratch("meta");
    const std::string out = dir.string();
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"dos", "--builtin", "line", "-p", "V=0", "--resolution", "64", "--bins", "16"}, "dos.csv"},
        {{"fermi", "--builtin", "hexagonal", "-p", "a=-1,b=-1,c=-1,Vv=0,Vw=0", "--lambda0", "0", "--resolution", "32"},
         "fermi.json"},
        {{"certify", "--builtin", "line", "-p", "V=0", "--mechanism", "multilayer", "--matrix", "1,0;0,-1"},
         "certificate.json"},
        {{"polytope", "--builtin", "square_lattice", "-p", "V=0"}, "polytope.json"},
        {{"mode", "--builtin", "line", "-p", "V=0", "--zeta", "1", "--lambda0", "-2"}, "mode.json"},
    };
    for (const auto& [args, file] : cases) {
        auto full = args;
        full.insert(full.end(), {"--out", out});
        const auto r = run(full);
        INFO(args.front(), " ", r.err);
        REQUIRE(r.code == cli::kOk);
        const auto text = slurp(dir / file);
        const auto meta = file.ends_with(".csv") ? json::parse(text.substr(2, text.find('\n') - 2)) : json::parse(text).at("meta");
        check_meta(meta, args.front());
    }
}

TEST_CASE("the installed binary maps errors to exit codes") {
    const std::string exe = BLOCHLAB_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == cli::kOk);
    CHECK(status("nonsense") == cli::kUsage);
    CHECK(status("validate /nonexistent/spec.json") == cli::kIo);
}
