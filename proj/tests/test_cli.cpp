// End-to-end checks of the command-line binary: exit codes, manifests,
// byte-level reproducibility, and the report subcommand.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <stablebm/experiments.hpp>
#include <stablebm/io.hpp>

using namespace sbm;

namespace {

const std::string kCli = SBM_CLI_PATH;

std::filesystem::path scratch(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "sbm_cli_test" / leaf;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

int run(const std::string& args, const std::string& log = "/dev/null") {
    std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

} // namespace

TEST_CASE("cli: version, help, and parse failures") {
    CHECK(run("--version") == 0);
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);              // a subcommand is required
    CHECK(run("frobnicate") == 2);    // unknown subcommand
    CHECK(run("simulate --bogus") == 2);
}

TEST_CASE("cli: a run writes outputs whose checksums match the manifest") {
    auto dir = scratch("kernel");
    CHECK(run("kernel-check --seed 123 --out " + dir.string()) == 0);
    RunManifest m = load_manifest((dir / "manifest-kernel-check-d1-a1.json").string());
    CHECK(m.experiment == "kernel-check");
    CHECK(m.version == std::string(kCliVersion));
    CHECK(m.config_echo.at("seed") == "123"); // the flag round-trips
    CHECK(m.config_echo.at("workers") == "1");
    CHECK(m.config_echo.at("out") == dir.string());
    CHECK(m.summary.at("max_abs_err") < 1e-6);
    REQUIRE(m.outputs.size() == 1);
    for (const auto& [name, sum] : m.outputs)
        CHECK(file_checksum_hex((dir / name).string()) == sum);
}

TEST_CASE("cli: identical seed and config give identical bytes at any worker count") {
    auto d1 = scratch("rep1");
    auto d2 = scratch("rep2");
    auto d3 = scratch("rep3");
    CHECK(run("hitting --seed 5 --out " + d1.string()) == 0);
    CHECK(run("hitting --seed 5 --out " + d2.string()) == 0);
    CHECK(run("hitting --seed 5 --workers 3 --out " + d3.string()) == 0);
    std::string a = slurp((d1 / "hitting-d1-a1.csv").string());
    std::string b = slurp((d2 / "hitting-d1-a1.csv").string());
    std::string c = slurp((d3 / "hitting-d1-a1.csv").string());
    CHECK(a == b);
    CHECK(a == c);
    RunManifest m1 = load_manifest((d1 / "manifest-hitting-d1-a1.json").string());
    RunManifest m3 = load_manifest((d3 / "manifest-hitting-d1-a1.json").string());
    CHECK(m1.outputs == m3.outputs);

    // a different seed must change the sampled table
    auto d4 = scratch("rep4");
    CHECK(run("hitting --seed 6 --out " + d4.string()) == 0);
    CHECK(slurp((d4 / "hitting-d1-a1.csv").string()) != a);
}

TEST_CASE("cli: exit codes separate validation, tolerance, and runtime failures") {
    auto dir = scratch("codes");
    std::string cfg = (dir / "bad.cfg").string();
    std::string log = (dir / "log.txt").string();

    spit(cfg, "alpha = 2.5\n");
    CHECK(run("simulate --config " + cfg + " --out " + dir.string(), log) == 2);
    CHECK(slurp(log).find("(0,2)") != std::string::npos);

    spit(cfg, "[box]\ncenter_t = 0.1\n");
    CHECK(run("harnack --config " + cfg + " --out " + dir.string(), log) == 2);
    CHECK(slurp(log).find("D~_32 box leaves the half-space") != std::string::npos);

    // a resolvent whose discount barely decays trips the quadrature tail gate
    spit(cfg, "lambda = 0.05\n");
    CHECK(run("resolvent --config " + cfg + " --out " + dir.string(), log) == 3);
    CHECK(slurp(log).find("tolerance failure") != std::string::npos);

    CHECK(run("simulate --config " + (dir / "missing.cfg").string() +
              " --out " + dir.string(), log) == 2);
}

TEST_CASE("cli: report folds manifests and flags failures and incompatibility") {
    auto dir = scratch("report");
    std::string log = (dir / "log.txt").string();
    CHECK(run("kernel-check --out " + dir.string()) == 0);
    CHECK(run("hitting --out " + dir.string()) == 0);
    std::string kpath = (dir / "manifest-kernel-check-d1-a1.json").string();
    std::string hpath = (dir / "manifest-hitting-d1-a1.json").string();

    CHECK(run("report " + kpath + " " + hpath + " --out " + dir.string(), log) == 0);
    std::string text = slurp(log);
    CHECK(text.find("[pass]") != std::string::npos);
    CHECK(text.find("[not run]") != std::string::npos);
    CHECK(text.find("overall: PASS") != std::string::npos);
    CHECK(slurp((dir / "report.txt").string()) == text);

    // a manifest with a failing summary flips the exit code to 1
    RunManifest bad = load_manifest(kpath);
    bad.config_echo["d"] = "2";
    bad.summary["max_abs_err"] = 0.5;
    std::string bpath = (dir / "manifest-bad.json").string();
    save_manifest(bpath, bad);
    CHECK(run("report " + kpath + " " + bpath, log) == 1);
    CHECK(slurp(log).find("overall: FAIL") != std::string::npos);

    // the same cell re-run with a different seed is rejected
    RunManifest dup = load_manifest(kpath);
    dup.config_echo["seed"] = "999";
    std::string dpath = (dir / "manifest-dup.json").string();
    save_manifest(dpath, dup);
    CHECK(run("report " + kpath + " " + dpath, log) == 2);
    CHECK(slurp(log).find("incompatible") != std::string::npos);
}

TEST_CASE("cli: environment values apply unless an explicit flag wins") {
    auto dir = scratch("env");
    ::setenv("STABLEBM_SEED", "77", 1);
    CHECK(run("hitting --out " + dir.string()) == 0);
    RunManifest m = load_manifest((dir / "manifest-hitting-d1-a1.json").string());
    CHECK(m.config_echo.at("seed") == "77");

    CHECK(run("hitting --seed 4 --out " + dir.string()) == 0);
    m = load_manifest((dir / "manifest-hitting-d1-a1.json").string());
    CHECK(m.config_echo.at("seed") == "4");
    ::unsetenv("STABLEBM_SEED");
}
