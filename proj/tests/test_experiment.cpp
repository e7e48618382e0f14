#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bmlab/errors.hpp"
#include "bmlab/experiment.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/parallel.hpp"

using namespace bmlab;
using cli::ExperimentConfig;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig smoke_config(const std::string& out_dir) {
    return ExperimentConfig::from_string(
        "experiment = verify-clt\n"
        "model.kind = white\n"
        "function.kind = hermite_single\n"
        "function.m = 2\n"
        "n_values = 64,128\n"
        "mc.paths = 1000\n"
        "mc.seed = 7\n"
        "output.path = " + out_dir + "\n");
}

}  // namespace

TEST_CASE("config parsing, canonicalization, and hashing") {
    const auto a = ExperimentConfig::from_string("b = 2\na = 1\n# comment\n\n");
    const auto b = ExperimentConfig::from_string("a=1\nb=2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.get("a") == "1");
    CHECK(a.get("missing", "x") == "x");
    const auto c = ExperimentConfig::from_string("a=1\nb=3\n");
    CHECK(a.hash() != c.hash());
    CHECK_THROWS_AS(ExperimentConfig::from_string("novalue\n"), ConfigInvalid);
}

TEST_CASE("typed accessors and their failure modes") {
    auto cfg = smoke_config("/tmp/bmlab_cfg_test");
    CHECK(cfg.experiment() == "verify-clt");
    CHECK(cfg.n_values() == std::vector<std::size_t>{64, 128});
    CHECK(cfg.mc_paths() == 1000);
    CHECK(cfg.mc_seed() == 7);

    auto bad = cfg;
    bad.kv["n_values"] = "128,64";  // not increasing
    CHECK_THROWS_AS(bad.n_values(), ConfigInvalid);
    bad.kv["n_values"] = "1,4";  // entries must be >= 2
    CHECK_THROWS_AS(bad.n_values(), ConfigInvalid);

    auto noseed = cfg;
    noseed.kv.erase("mc.seed");
    CHECK_THROWS_AS(noseed.mc_seed(), ConfigInvalid);

    auto badexp = cfg;
    badexp.kv["experiment"] = "frobnicate";
    CHECK_THROWS_AS(badexp.experiment(), ConfigInvalid);

    auto badfn = cfg;
    badfn.kv["function.kind"] = "abs_power";
    badfn.kv["function.p"] = "oops";
    CHECK_THROWS_AS(badfn.function(), ConfigInvalid);
}

TEST_CASE("validate reports structural problems and regime warnings") {
    const auto ok = smoke_config("/tmp/bmlab_cfg_test");
    CHECK(cli::validate(ok).empty());

    auto warn = ok;
    warn.kv["model.kind"] = "fgn";
    warn.kv["model.h"] = "0.9";  // alpha*d = 0.2*2 <= 1
    const auto diags = cli::validate(warn);
    bool found = false;
    for (const auto& d : diags) {
        if (d.rfind("warning:", 0) == 0 && d.find("condition fails") != std::string::npos)
            found = true;
    }
    CHECK(found);

    auto broken = ok;
    broken.kv.erase("n_values");
    CHECK_FALSE(cli::validate(broken).empty());
}

TEST_CASE("smoothness inference") {
    using rates::Smoothness;
    const auto poly = hermite::FunctionSpec::polynomial({-4, 0, 1, 0, 1});
    CHECK(cli::infer_smoothness(poly, hermite::expand(poly)) == Smoothness::D6_8);
    const auto ap = hermite::FunctionSpec::abs_power(2.5, true);
    CHECK(cli::infer_smoothness(ap, hermite::expand(ap)) == Smoothness::D2_4);
    const auto h3 = hermite::FunctionSpec::hermite_single(3);
    CHECK(cli::infer_smoothness(h3, hermite::expand(h3)) == Smoothness::Hermite);
}

TEST_CASE("verify-clt end to end: outputs, determinism, exit code") {
    const fs::path dir = "/tmp/bmlab_exp_smoke";
    fs::remove_all(dir);
    auto cfg = smoke_config(dir.string());
    worker_threads() = 1;
    REQUIRE(cli::run(cfg) == 0);

    const fs::path csv = dir / "report.csv";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(dir / "summary.json"));

    const std::string first = slurp(csv);
    std::istringstream lines(first);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "n,sigma_n,ks,tv_hist,var_du,a2,a3,kappa4,tv_upper_prop31,tv_upper_prop33,"
          "bound_value,paths,seed,config_hash");
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    // Re-running the identical config reproduces the bytes exactly.
    REQUIRE(cli::run(cfg) == 0);
    CHECK(slurp(csv) == first);

    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"all_checks_passed\": true") != std::string::npos);
}

TEST_CASE("expand experiment writes the expansion report") {
    const fs::path dir = "/tmp/bmlab_exp_expand";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_string(
        "experiment = expand\nfunction.kind = abs_power\nfunction.p = 2.5\n"
        "output.path = " + dir.string() + "\n");
    REQUIRE(cli::run(cfg) == 0);
    const std::string j = slurp(dir / "summary.json");
    CHECK(j.find("\"rank\": 2") != std::string::npos);
}

TEST_CASE("rates experiment reports the predicted exponent") {
    const fs::path dir = "/tmp/bmlab_exp_rates";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_string(
        "experiment = rates\nmodel.kind = fgn\nmodel.h = 0.7\n"
        "function.kind = hermite_single\nfunction.m = 2\n"
        "n_values = 256,512,1024\noutput.path = " + dir.string() + "\n");
    REQUIRE(cli::run(cfg) == 0);
    const std::string j = slurp(dir / "summary.json");
    // alpha = 0.6, d = 2, single second-order chaos: slow branch 3/2 - 3*0.6 = -0.3.
    CHECK(j.find("\"predicted_exponent\": -0.3") != std::string::npos);
}
