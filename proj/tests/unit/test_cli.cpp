#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatprop/grid.hpp"
#include "heatprop/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HEATPROP_CLI_PATH) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const fs::path& dir, const std::string& name,
                    const std::string& text) {
    fs::path p = dir / name;
    std::ofstream os(p);
    os << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

const std::string kStepScenario = R"(seed = 42

[grid]
dim = 1
points = 64
half_width = 12

[diffusivity]
kind = piecewise
breakpoints = 1.0
values = [[1.0]] ; [[3.0]]

[initial]
kind = gaussian
sigma = [[0.5]]

[times]
times = 0.5, 1.0, 1.5

[verify]
energy_q = 1.5 2
lplq = 1 2 2
decay = 2 1 2 2

[net]
epsilons = geometric(1e-1, 1e-3, 8)
)";

const std::string kConstantScenario = R"(seed = 42

[grid]
dim = 1
points = 64
half_width = 12

[diffusivity]
kind = constant
matrix = [[1.0]]

[initial]
kind = gaussian
sigma = [[0.5]]

[times]
times = 0.5, 1.0
)";

}  // namespace

TEST_CASE("solve writes states, norms, and metadata", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_solve");
    fs::path scn = write_text(dir, "case.scn", kStepScenario);
    fs::path out = dir / "out";
    REQUIRE(run_cli("solve --scenario " + scn.string() + " --out " + out.string()) == 0);

    heatprop::Field state = heatprop::read_field(out / "state_0000.bin");
    CHECK(state.grid.dim == 1);
    CHECK(state.grid.n == 64);
    CHECK(state.mass() == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(fs::exists(out / "state_0002.bin"));
    CHECK_FALSE(fs::exists(out / "state_0003.bin"));

    const std::string norms = slurp(out / "norms.csv");
    CHECK(norms.rfind("index,time,mass,l1,l2,linf,flags\n", 0) == 0);

    json meta = slurp_json(out / "meta.json");
    CHECK(meta["command"] == "solve");
    CHECK(meta["model"] == "piecewise_constant");
    CHECK(meta["seed"] == 42);
    CHECK(meta["states"].size() == 3);
    CHECK(meta["states"][1]["time"] == 1.0);
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_repeat");
    fs::path scn = write_text(dir, "case.scn", kStepScenario);
    for (const std::string cmd : {"solve", "verify"}) {
        fs::path a = dir / (cmd + "_a");
        fs::path b = dir / (cmd + "_b");
        REQUIRE(run_cli(cmd + " --scenario " + scn.string() + " --out " + a.string() +
                        " --seed 42") == 0);
        REQUIRE(run_cli(cmd + " --scenario " + scn.string() + " --out " + b.string() +
                        " --seed 42") == 0);
        std::vector<fs::path> names;
        for (const auto& entry : fs::directory_iterator(a))
            names.push_back(entry.path().filename());
        REQUIRE_FALSE(names.empty());
        for (const auto& name : names) {
            INFO(cmd << " artifact " << name.string());
            CHECK(slurp(a / name) == slurp(b / name));
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("verify passes and scaled bounds fail", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_verify");
    fs::path scn = write_text(dir, "case.scn", kStepScenario);
    fs::path good = dir / "good";
    REQUIRE(run_cli("verify --scenario " + scn.string() + " --out " + good.string()) ==
            0);
    json summary = slurp_json(good / "summary.json");
    CHECK(summary["all_satisfied"] == true);
    CHECK(summary["violations"] == 0);
    CHECK(summary["reports"].get<int>() > 0);
    const std::string csv = slurp(good / "reports.csv");
    CHECK(csv.rfind("check,params,time,measured,bound,ratio,satisfied\n", 0) == 0);
    CHECK(fs::exists(good / "reports.jsonl"));

    fs::path bad = dir / "bad";
    REQUIRE(run_cli("verify --scenario " + scn.string() + " --out " + bad.string() +
                    " --bound-scale 1e-6") == 1);
    json scaled = slurp_json(bad / "summary.json");
    CHECK(scaled["violations"].get<int>() > 0);
    fs::remove_all(dir);
}

TEST_CASE("certify emits a passing certificate", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_certify");
    fs::path scn = write_text(dir, "case.scn", kConstantScenario);
    fs::path out = dir / "out";
    REQUIRE(run_cli("certify --scenario " + scn.string() + " --out " + out.string()) ==
            0);
    json cert = slurp_json(out / "certificate.json");
    CHECK(cert["certified"] == true);
    CHECK(cert["checks"].size() > 4);
    bool saw_residual = false;
    for (const auto& c : cert["checks"]) {
        CHECK(c["pass"] == true);
        if (c["check"] == "pde_residual") saw_residual = true;
    }
    CHECK(saw_residual);
    fs::remove_all(dir);
}

TEST_CASE("net diagnostics pass on a step coefficient", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_net");
    fs::path scn = write_text(dir, "case.scn", kStepScenario);
    fs::path out = dir / "out";
    REQUIRE(run_cli("net --scenario " + scn.string() + " --out " + out.string()) == 0);
    json diag = slurp_json(out / "diagnostics.json");
    CHECK(diag["moderateness"]["verdict"] == "moderate");
    CHECK(diag["moderateness"]["order"] == 0);
    CHECK(diag["negligibility"]["verdict"] == "negligible");
    CHECK(diag["consistency"]["verdict"] == "consistent");
    const std::string csv = slurp(out / "net.csv");
    CHECK(csv.rfind("epsilon,moderate_sup_t_l2", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("scenario problems become error artifacts", "[cli]") {
    fs::path dir = fresh_dir("hp_cli_error");
    fs::path bad = write_text(dir, "bad.scn", "[grid]\ndim = 1\nspacing = 0.5\n");
    fs::path out = dir / "out";
    REQUIRE(run_cli("solve --scenario " + bad.string() + " --out " + out.string()) == 1);
    json err = slurp_json(out / "error.json");
    CHECK(err["error"] == "ParseError");
    CHECK(err["line"] == 3);

    fs::path no_model = write_text(dir, "nomodel.scn", "[grid]\ndim = 1\n");
    fs::path out2 = dir / "out2";
    REQUIRE(run_cli("solve --scenario " + no_model.string() + " --out " +
                    out2.string()) == 1);
    json err2 = slurp_json(out2 / "error.json");
    CHECK(err2["error"] == "ValidationError");
    CHECK_FALSE(err2.contains("line"));
    fs::remove_all(dir);
}

TEST_CASE("command line surface", "[cli]") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") != 0);
    CHECK(run_cli("solve") != 0);
}

TEST_CASE("shipped scenarios parse cleanly", "[cli]") {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(HEATPROP_SCENARIO_DIR))
        if (entry.path().extension() == ".scn") files.push_back(entry.path());
    REQUIRE(files.size() >= 3);
    for (const auto& f : files) {
        INFO(f.string());
        CHECK_NOTHROW(heatprop::parse_scenario_file(f));
    }
}
