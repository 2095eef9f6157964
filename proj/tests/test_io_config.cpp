// Serialization, configuration resolution, manifests, and the report table.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <stablebm/config.hpp>
#include <stablebm/experiments.hpp>
#include <stablebm/io.hpp>

using namespace sbm;

namespace {

std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "sbm_io_test";
    std::filesystem::create_directories(p);
    return p;
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

TEST_CASE("csv numbers survive a text round trip exactly") {
    for (double v : {1.0 / 3.0, -0.1, 1e-300, 12345.678901234567, 0.0, -2.5e17,
                     6.02214076e23}) {
        std::string s = csv_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(csv_number(1.0) == "1");
    CHECK(csv_number(0.5) == "0.5");
}

TEST_CASE("csv tables: write, read, and reject malformed input") {
    auto dir = scratch_dir();
    std::string path = (dir / "t.csv").string();

    write_csv_numeric(path, {"a", "b"}, {{1.0, 2.5}, {3.0, -4.0}});
    std::string raw = slurp(path);
    CHECK(raw == "a,b\n1,2.5\n3,-4\n"); // comma, dot decimal, LF endings
    CsvTable t = read_csv(path);
    REQUIRE(t.header == CsvRow{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == "-4");

    // carriage returns are stripped, trailing commas make an empty cell
    spit(path, "x,y\r\n1,\r\n");
    CsvTable win = read_csv(path);
    CHECK(win.rows[0][0] == "1");
    CHECK(win.rows[0][1] == "");

    CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{"1"}}), std::invalid_argument);
    spit(path, "a,b\n1,2,3\n");
    CHECK_THROWS(read_csv(path));
    spit(path, "");
    CHECK_THROWS(read_csv(path));
    CHECK_THROWS(read_csv((dir / "missing.csv").string()));
}

TEST_CASE("fnv checksums: pinned vectors and file digests") {
    CHECK(fnv1a64("", 0) == 14695981039346656037ull);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(checksum_hex(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
    auto dir = scratch_dir();
    std::string path = (dir / "sum.bin").string();
    std::string payload = "the quick brown fox";
    spit(path, payload);
    CHECK(file_checksum_hex(path) ==
          checksum_hex(fnv1a64(payload.data(), payload.size())));
}

TEST_CASE("grid functions survive binary and csv round trips") {
    auto dir = scratch_dir();
    GridFunction g = GridFunction::centered(2, 5, 0.25);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values[i] = std::sin(0.37 * static_cast<double>(i)) + 2.0;

    std::string bpath = (dir / "g.bin").string();
    write_grid_binary(bpath, g);
    GridFunction gb = read_grid_binary(bpath);
    CHECK(gb.d == 2);
    CHECK(gb.spacing == g.spacing);
    CHECK(gb.origin == g.origin);
    CHECK(gb.values == g.values); // bit-exact

    std::string cpath = (dir / "g.csv").string();
    write_grid_csv(cpath, g);
    GridFunction gc = read_grid_csv(cpath);
    REQUIRE(gc.d == 2);
    REQUIRE(gc.extent == g.extent);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(gc.values[i] == g.values[i]); // %.17g is lossless

    // stacked variant
    GridFunction s = GridFunction::centered(1, 7, 0.5);
    s.values.clear();
    s.t_slices = {0.5, 1.0, 1.5};
    for (int k = 0; k < 3; ++k)
        s.slice_values.push_back(std::vector<double>(7, 1.0 + k));
    std::string spath = (dir / "s.bin").string();
    write_grid_binary(spath, s);
    GridFunction sb = read_grid_binary(spath);
    CHECK(sb.t_slices == s.t_slices);
    CHECK(sb.slice_values == s.slice_values);

    // corrupted magic is rejected
    std::string junk = slurp(bpath);
    junk[0] = 'X';
    spit(bpath, junk);
    CHECK_THROWS(read_grid_binary(bpath));
}

TEST_CASE("config parser: sections, comments, and errors that name the line") {
    ConfigDoc doc = parse_config_text(
        "# comment\n"
        "alpha = 1.5\n"
        "\n"
        "[grid]\n"
        "spacing = 0.1\n"
        "extent = 401\n"
        "; another comment\n"
        "[sweep]\n"
        "radii = 1, 2, 4\n");
    CHECK(doc.get("alpha") == std::string("1.5"));
    CHECK(doc.get("grid.spacing") == std::string("0.1"));
    CHECK(doc.get("sweep.radii") == std::string("1, 2, 4"));
    CHECK(!doc.has("spacing"));
    CHECK(doc.order.front() == "alpha");

    CHECK_THROWS_MATCHES(parse_config_text("alpha\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 1")));
    CHECK_THROWS_MATCHES(parse_config_text("a = 1\na = 2\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("duplicate")));
    CHECK_THROWS_AS(parse_config_text("[oops\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
}

TEST_CASE("config typed accessors parse and reject with the key name") {
    CHECK(config_parse_double("k", "2.5e-3") == 2.5e-3);
    CHECK(config_parse_int("k", "-7") == -7);
    CHECK(config_parse_u64("k", "18446744073709551615") == 18446744073709551615ull);
    CHECK(config_parse_bool("k", "true"));
    CHECK(!config_parse_bool("k", "off"));
    CHECK(config_parse_list("k", "1, 2.5,4") == std::vector<double>{1.0, 2.5, 4.0});

    CHECK_THROWS_MATCHES(config_parse_double("alpha", "abc"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("alpha")));
    CHECK_THROWS_AS(config_parse_u64("k", "-1"), ConfigError);
    CHECK_THROWS_AS(config_parse_int("k", "1.5"), ConfigError);
    CHECK_THROWS_AS(config_parse_bool("k", "maybe"), ConfigError);
    CHECK_THROWS_AS(config_parse_list("k", "1,,2"), ConfigError);
    CHECK_THROWS_AS(config_parse_list("k", ""), ConfigError);
}

TEST_CASE("validate_config resolves documented defaults per experiment") {
    CliOverrides over;
    over.experiment = "simulate";
    ExperimentConfig cfg = validate_config("", over);
    CHECK(cfg.params.d == 1);
    CHECK(cfg.params.alpha == 1.0);
    CHECK(cfg.seed == 1);
    CHECK(cfg.n == 20000);
    CHECK(cfg.dt == 1e-3);
    CHECK(cfg.horizon == 1.0);
    CHECK(cfg.sweep.at("radii") == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.workers == 1);

    over.experiment = "lp";
    ExperimentConfig lp = validate_config("", over);
    CHECK(lp.grid_spacing == 0.1);
    CHECK(lp.grid_extent == 401);
    CHECK(lp.t_grid.t_min == 1e-2);
    CHECK(lp.t_grid.t_max == 3.0);
    CHECK(lp.t_grid.count == 25);
    CHECK(lp.sweep.at("p") == std::vector<double>{1.25, 1.5, 1.75});

    over.experiment = "resolvent";
    ExperimentConfig rv = validate_config("", over);
    CHECK(rv.lambda == 1.0);
    CHECK(rv.mu == 2.0);
    CHECK(rv.tol == 1e-2);

    over.experiment = "harnack";
    ExperimentConfig ha = validate_config("", over);
    CHECK(ha.box_center_t == 16.5);
    CHECK(ha.box_radius == 1.0);
    CHECK(ha.count == 50);

    // config file values stick, sweeps come back sorted
    over.experiment = "exit-time";
    ExperimentConfig et = validate_config(
        "seed = 9\nn = 500\n[sweep]\nradii = 4, 1, 2\n", over);
    CHECK(et.seed == 9);
    CHECK(et.n == 500);
    CHECK(et.sweep.at("radii") == std::vector<double>{1.0, 2.0, 4.0});
}

TEST_CASE("validate_config rejects bad input with named errors") {
    CliOverrides over;
    over.experiment = "simulate";
    CHECK_THROWS_MATCHES(validate_config("alpha = 2.5\n", over), std::exception,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("(0,2)")));
    CHECK_THROWS_MATCHES(validate_config("d = 4\n", over), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("{1, 2, 3}")));
    CHECK_THROWS_MATCHES(
        validate_config("lambda = 3\n", over), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
            "unknown key 'lambda' for experiment 'simulate'")));
    CHECK_THROWS_MATCHES(validate_config("experiment = lp\n", over), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("conflicts")));
    CHECK_THROWS_AS(validate_config("", CliOverrides{}), ConfigError);
    CHECK_THROWS_AS(validate_config("dt = -1\n", over), ConfigError);
    CHECK_THROWS_AS(validate_config("workers = 0\n", over), ConfigError);

    over.experiment = "harnack";
    CHECK_THROWS_MATCHES(
        validate_config("[box]\ncenter_t = 0.1\n", over), GeometryError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("D~_32 box leaves the half-space")));
    over.experiment = "hitting";
    CHECK_THROWS_MATCHES(
        validate_config("[box]\ncenter_t = 0.5\n", over), GeometryError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("D_6 box leaves the half-space")));
    over.experiment = "kernel-check";
    CHECK_THROWS_MATCHES(validate_config("alpha = 1.5\n", over), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("alpha = 1")));
    over.experiment = "lp";
    CHECK_THROWS_MATCHES(validate_config("d = 2\n", over), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("d = 1")));
}

TEST_CASE("environment overrides config values but never explicit flags") {
    ::setenv("STABLEBM_SEED", "42", 1);
    CliOverrides over;
    over.experiment = "simulate";
    ExperimentConfig from_env = validate_config("seed = 5\n", over);
    CHECK(from_env.seed == 42); // env beats the file, loudly

    over.seed = 7;
    ExperimentConfig from_flag = validate_config("seed = 5\n", over);
    CHECK(from_flag.seed == 7); // explicit flag beats the env
    ::unsetenv("STABLEBM_SEED");

    ::setenv("STABLEBM_ALPHA", "1.5", 1);
    over = CliOverrides{};
    over.experiment = "simulate";
    CHECK(validate_config("", over).params.alpha == 1.5);
    ::unsetenv("STABLEBM_ALPHA");
}

TEST_CASE("manifests round trip through json files") {
    auto dir = scratch_dir();
    RunManifest m;
    m.experiment = "simulate";
    m.config_echo = {{"seed", "1"}, {"d", "1"}, {"alpha", "1"}, {"n", "100"},
                     {"dt", "0.001"}};
    m.wall_seconds = 1.25;
    m.outputs = {{"simulate-d1-a1.csv", "00ff00ff00ff00ff"}};
    m.summary = {{"max_abs_z", 0.5}};
    std::string path = (dir / "m.json").string();
    save_manifest(path, m);
    RunManifest back = load_manifest(path);
    CHECK(back.version == std::string(kCliVersion));
    CHECK(back.experiment == "simulate");
    CHECK(back.config_echo == m.config_echo);
    CHECK(back.wall_seconds == m.wall_seconds);
    CHECK(back.outputs == m.outputs);
    CHECK(back.summary == m.summary);

    spit(path, "{ not json");
    CHECK_THROWS_AS(load_manifest(path), ConfigError);
    CHECK_THROWS(load_manifest((dir / "absent.json").string()));
}

namespace {

RunManifest fake_manifest(const std::string& exp, const std::string& d,
                          const std::string& alpha,
                          std::map<std::string, double> summary,
                          const std::string& seed = "1") {
    RunManifest m;
    m.experiment = exp;
    m.config_echo = {{"d", d}, {"alpha", alpha}, {"seed", seed},
                     {"n", "100"},  {"dt", "0.001"}};
    m.summary = std::move(summary);
    return m;
}

} // namespace

TEST_CASE("report: gated rows, recorded row, and not-run rows") {
    std::vector<RunManifest> runs;
    runs.push_back(fake_manifest("kernel-check", "1", "1", {{"max_abs_err", 1e-9}}));
    runs.push_back(fake_manifest(
        "exit-time", "1", "1",
        {{"slope", 1.99}, {"vertical_mean", 0.1251}, {"vertical_se", 0.0007}}));
    runs.push_back(fake_manifest("lp", "1", "1",
                                 {{"max_ratio_p1.5", 0.3},
                                  {"max_ratio_full", 0.8},
                                  {"meyer_c_hat", 6.0}}));
    std::string text = emit_report(runs);
    CHECK(text.find("[pass]     harmonic-extension kernel") != std::string::npos);
    CHECK(text.find("[recorded] full-range horizontal") != std::string::npos);
    CHECK(text.find("[not run]  worst-shape hitting envelope") != std::string::npos);
    CHECK(text.find("overall: PASS") != std::string::npos);
    CHECK(!report_failed(runs));

    // one failing cell flips its row and the overall verdict
    runs.push_back(fake_manifest("kernel-check", "2", "1", {{"max_abs_err", 0.5}}));
    std::string bad = emit_report(runs);
    CHECK(bad.find("[fail]") != std::string::npos);
    CHECK(bad.find("overall: FAIL") != std::string::npos);
    CHECK(report_failed(runs));
}

TEST_CASE("report rejects incompatible manifest sets") {
    std::vector<RunManifest> runs;
    runs.push_back(fake_manifest("kernel-check", "1", "1", {{"max_abs_err", 1e-9}},
                                 "1"));
    runs.push_back(fake_manifest("kernel-check", "1", "1", {{"max_abs_err", 1e-9}},
                                 "2")); // same cell, different seed
    CHECK_THROWS_MATCHES(emit_report(runs), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("incompatible")));

    runs.pop_back();
    RunManifest other =
        fake_manifest("exit-time", "1", "1",
                      {{"slope", 2.0}, {"vertical_mean", 0.125}, {"vertical_se", 1e-3}});
    other.version = "stablebm 0.0.1";
    runs.push_back(other);
    CHECK_THROWS_MATCHES(emit_report(runs), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("version")));

    // identical duplicates are allowed (idempotent re-run)
    runs.pop_back();
    runs.push_back(runs.front());
    CHECK_NOTHROW(emit_report(runs));
}
