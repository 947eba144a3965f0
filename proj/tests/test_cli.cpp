#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;  // path to the steersim executable, from argv[1]
fs::path g_root;       // scratch directory for the whole suite

int run(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = g_binary + " " + args + " >/dev/null";
    cmd += stderr_to.empty() ? " 2>/dev/null" : " 2>" + stderr_to.string();
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small config so the whole pipeline stays fast.
void write_config(const fs::path& p, uint64_t seed = 42) {
    std::ofstream out(p);
    out << R"({
  "seed": )" << seed
        << R"(,
  "flows": {"n": 1200},
  "radio": {"n": 2500},
  "forest": {"n_trees": 20, "max_depth": 8},
  "traffic_forest": {"n_trees": 40},
  "steering": {"replications": 5, "fractions": [0.05, 0.2, 1.0]},
  "trajectories": {"devices_per_route": 8},
  "mobility": {"k_routes": 3}
}
)";
}

}  // namespace

TEST_CASE("full pipeline produces every artifact") {
    fs::path out = g_root / "pipeline";
    fs::create_directories(out);
    fs::path cfg = out / "config.json";
    write_config(cfg);
    std::string common = "--config " + cfg.string() + " --out " + out.string();

    REQUIRE(run("gen-flows " + common) == 0);
    REQUIRE(run("gen-radio " + common) == 0);
    REQUIRE(run("gen-trajectories " + common) == 0);
    REQUIRE(run("train-traffic " + common) == 0);
    REQUIRE(run("train-coverage " + common) == 0);
    REQUIRE(run("steer " + common) == 0);
    REQUIRE(run("mobility " + common) == 0);
    REQUIRE(run("report " + common) == 0);

    for (const char* f :
         {"flows.jsonl", "radio_samples.jsonl", "trajectories.jsonl",
          "roc_traffic_1000.csv", "roc_traffic_10000.csv", "roc_traffic_100000.csv",
          "roc_coverage.csv", "coverage_model.json", "steering_curves.csv",
          "steering_curves.svg", "trajectory_model.json", "mobility_report.json",
          "report.md", "gen-flows_manifest.json", "steer_manifest.json"})
        CHECK_MESSAGE(fs::exists(out / f), "missing artifact: ", f);
    CHECK(fs::exists(out / "traffic_model" / "traffic_manifest.json"));

    // steering CSV lists all four strategies
    std::string csv = slurp(out / "steering_curves.csv");
    for (const char* s : {"Random", "Coverage", "Traffic", "CoverageTraffic"})
        CHECK_MESSAGE(csv.find(s) != std::string::npos, "strategy missing: ", s);
}

TEST_CASE("reruns are byte-identical, seed changes are not") {
    fs::path a = g_root / "det_a";
    fs::path b = g_root / "det_b";
    fs::path c = g_root / "det_c";
    for (const auto& d : {a, b, c}) fs::create_directories(d);
    fs::path cfg = g_root / "det_config.json";
    write_config(cfg);
    std::string base = "--config " + cfg.string();

    REQUIRE(run("gen-flows " + base + " --out " + a.string()) == 0);
    REQUIRE(run("gen-flows " + base + " --out " + b.string()) == 0);
    REQUIRE(run("gen-flows " + base + " --seed 777 --out " + c.string()) == 0);
    CHECK(slurp(a / "flows.jsonl") == slurp(b / "flows.jsonl"));
    CHECK(slurp(a / "flows.jsonl") != slurp(c / "flows.jsonl"));

    REQUIRE(run("gen-radio " + base + " --out " + a.string()) == 0);
    REQUIRE(run("gen-radio " + base + " --out " + b.string()) == 0);
    CHECK(slurp(a / "radio_samples.jsonl") == slurp(b / "radio_samples.jsonl"));
}

TEST_CASE("invalid config values name the field and fail") {
    fs::path out = g_root / "bad";
    fs::create_directories(out);
    fs::path cfg = out / "bad.json";
    std::ofstream(cfg) << R"({"env": {"shadow_correlation": 1.5}})";
    fs::path err = out / "stderr.txt";
    CHECK(run("gen-radio --config " + cfg.string() + " --out " + out.string(), err) != 0);
    std::string msg = slurp(err);
    CHECK(msg.find("shadow_correlation") != std::string::npos);

    std::ofstream(cfg) << R"({"flows": {"n": "lots"}})";
    CHECK(run("gen-flows --config " + cfg.string() + " --out " + out.string(), err) != 0);
    CHECK(slurp(err).find("flows.n") != std::string::npos);

    std::ofstream(cfg) << R"({not json)";
    CHECK(run("gen-flows --config " + cfg.string() + " --out " + out.string(), err) != 0);
}

TEST_CASE("missing inputs and unknown commands fail cleanly") {
    fs::path out = g_root / "missing";
    fs::create_directories(out);
    fs::path err = out / "stderr.txt";
    // training without generated data
    CHECK(run("train-traffic --out " + out.string(), err) != 0);
    CHECK(!slurp(err).empty());
    CHECK(run("train-coverage --out " + out.string()) != 0);
    CHECK(run("mobility --out " + out.string()) != 0);
    CHECK(run("steer --out " + out.string()) != 0);
    CHECK(run("no-such-command") != 0);
    CHECK(run("") != 0);  // a subcommand is required
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-steersim-binary> [doctest args]\n");
        return 2;
    }
    g_binary = argv[1];
    g_root = fs::temp_directory_path() / "steersim_cli_test";
    fs::remove_all(g_root);
    fs::create_directories(g_root);

    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv + 1);
    int rc = ctx.run();
    fs::remove_all(g_root);
    return rc;
}
