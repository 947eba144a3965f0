// steersim: generation, training, steering and mobility pipeline driver.
// Every subcommand is deterministic per config; rerunning a command with the
// same config produces byte-identical outputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "steersim/config.hpp"
#include "steersim/flowdata.hpp"
#include "steersim/flowgen.hpp"
#include "steersim/metrics.hpp"
#include "steersim/mobility.hpp"
#include "steersim/predictors.hpp"
#include "steersim/radioenv.hpp"
#include "steersim/steering.hpp"

namespace fs = std::filesystem;
using namespace steersim;
using nlohmann::json;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel g_log = LogLevel::Error;

LogLevel log_level_from_env() {
    const char* v = std::getenv("STEERSIM_LOG");
    if (!v) return LogLevel::Error;
    std::string s(v);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    if (s == "error" || s.empty()) return LogLevel::Error;
    std::cerr << "steersim: unknown STEERSIM_LOG value '" << s << "', using error\n";
    return LogLevel::Error;
}

void log_info(const std::string& msg) {
    if (g_log >= LogLevel::Info) std::cerr << "[info] " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (g_log >= LogLevel::Debug) std::cerr << "[debug] " << msg << '\n';
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed_override;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run config path");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed_override, "override the config seed");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) {
        cfg = RunConfig::load(args.config_path);
    } else {
        cfg = RunConfig::from_json(json::object());
        log_info("no --config given, using built-in defaults");
    }
    if (args.seed_override) {
        json j = cfg.to_json();
        j["seed"] = *args.seed_override;
        cfg = RunConfig::from_json(j);
    }
    log_debug("config hash " + cfg.hash());
    return cfg;
}

fs::path prepare_out(const CommonArgs& args) {
    fs::path out(args.out_dir);
    fs::create_directories(out);
    return out;
}

int cmd_gen_flows(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    auto flows = gen_flows(cfg.flowgen, cfg.n_flows);
    write_flows(flows, out / "flows.jsonl");
    write_manifest(out, "gen-flows", cfg, {{"records", flows.size()}});
    log_info("wrote " + std::to_string(flows.size()) + " flows");
    return 0;
}

int cmd_gen_radio(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    RadioEnv env(cfg.env);
    auto samples = env.gen_samples(cfg.n_radio_samples);
    write_radio_samples(samples, out / "radio_samples.jsonl");
    write_manifest(out, "gen-radio", cfg,
                   {{"records", samples.size()},
                    {"coverage_threshold_dbm", env.coverage_threshold_dbm()}});
    log_info("wrote " + std::to_string(samples.size()) + " radio samples");
    return 0;
}

int cmd_gen_trajectories(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    RadioEnv env(cfg.env);
    auto trajs = env.gen_trajectories(cfg.trajectories);
    write_trajectories(trajs, out / "trajectories.jsonl");
    write_manifest(out, "gen-trajectories", cfg, {{"records", trajs.size()}});
    log_info("wrote " + std::to_string(trajs.size()) + " trajectories");
    return 0;
}

int cmd_train_traffic(const CommonArgs& args, const std::string& data_path) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    fs::path data = data_path.empty() ? out / "flows.jsonl" : fs::path(data_path);
    auto flows = read_flows(data);
    log_info("training on " + std::to_string(flows.size()) + " flows");
    auto res = TrafficPredictor::train(flows, cfg.traffic_forest, cfg.stage_seed("train-traffic"));
    res.predictor.save(out / "traffic_model");
    json aucs = json::object();
    for (size_t i = 0; i < 3; ++i) {
        std::string thr = std::to_string(kVolumeThresholds[i]);
        write_roc_csv(res.test_rocs[i], out / ("roc_traffic_" + thr + ".csv"));
        aucs[thr] = res.test_rocs[i].auc;
        std::printf("traffic auc @ %s B: %.3f\n", thr.c_str(), res.test_rocs[i].auc);
    }
    write_manifest(out, "train-traffic", cfg, {{"records", flows.size()}, {"auc", aucs}});
    return 0;
}

int cmd_train_coverage(const CommonArgs& args, const std::string& data_path) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    fs::path data = data_path.empty() ? out / "radio_samples.jsonl" : fs::path(data_path);
    auto samples = read_radio_samples(data);
    log_info("training on " + std::to_string(samples.size()) + " radio samples");
    // recalibrate from config: same seed, same threshold as gen-radio
    RadioEnv env(cfg.env);
    auto res = CoveragePredictor::train(samples, cfg.forest, cfg.stage_seed("train-coverage"),
                                        env.coverage_threshold_dbm());
    res.predictor.save(out / "coverage_model.json");
    write_roc_csv(res.test_roc, out / "roc_coverage.csv");
    std::printf("coverage auc: %.3f\n", res.test_roc.auc);
    write_manifest(out, "train-coverage", cfg,
                   {{"records", samples.size()},
                    {"auc", res.test_roc.auc},
                    {"coverage_threshold_dbm", env.coverage_threshold_dbm()}});
    return 0;
}

int cmd_steer(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    auto traffic = TrafficPredictor::load(out / "traffic_model");
    auto coverage = CoveragePredictor::load(out / "coverage_model.json");
    RadioEnv env(cfg.env, coverage.coverage_threshold_dbm());
    SteeringConfig scfg = cfg.steering;
    scfg.seed = cfg.stage_seed("steer");
    auto result = run_steering(env, cfg.flowgen, traffic, coverage, scfg);
    write_steering_csv(result, out / "steering_curves.csv");
    write_steering_svg(result, out / "steering_curves.svg");

    std::printf("unnecessary measurement rate (mean over fractions)\n");
    for (const auto& row : measurement_savings(result)) {
        double sum = 0.0;
        for (double r : row.unnecessary_rate) sum += r;
        double mean = row.unnecessary_rate.empty() ? 0.0 : sum / row.unnecessary_rate.size();
        std::printf("  %-16s %.3f\n", strategy_name(row.strategy).c_str(), mean);
    }
    write_manifest(out, "steer", cfg,
                   {{"strategies", result.curves.size()},
                    {"fractions", scfg.fractions},
                    {"replications", scfg.replications}});
    return 0;
}

int cmd_mobility(const CommonArgs& args, const std::string& data_path) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    fs::path data = data_path.empty() ? out / "trajectories.jsonl" : fs::path(data_path);
    auto trajs = read_trajectories(data);
    if (trajs.size() < cfg.k_routes)
        throw std::invalid_argument("mobility: " + std::to_string(trajs.size()) +
                                    " trajectories < k_routes=" + std::to_string(cfg.k_routes));

    // hold out every fourth device for evaluation
    std::vector<Trajectory> training, heldout;
    for (const auto& t : trajs)
        (t.device_id % 4 == 3 ? heldout : training).push_back(t);
    log_info("mining on " + std::to_string(training.size()) + " trajectories, " +
             std::to_string(heldout.size()) + " held out");

    MiningParams mp = cfg.mining;
    mp.seed = cfg.stage_seed("mobility");
    auto model = mine_trajectories(training, cfg.k_routes, mp);
    {
        std::ofstream mf(out / "trajectory_model.json");
        if (!mf) throw std::runtime_error("cannot write trajectory model");
        mf << model.to_json().dump(2) << '\n';
    }
    auto report = evaluate_mobility(model, training, heldout, mp);
    std::printf("cluster/route agreement: %.3f\n", report.cluster_route_agreement);
    std::printf("half-prefix top-1 route accuracy: %.3f\n", report.prefix_top1_accuracy);
    std::printf("handover step accuracy (+-1): %.3f\n", report.handover_step_accuracy);
    json jr{{"cluster_route_agreement", report.cluster_route_agreement},
            {"prefix_top1_accuracy", report.prefix_top1_accuracy},
            {"handover_step_accuracy", report.handover_step_accuracy},
            {"n_heldout", report.n_heldout}};
    {
        std::ofstream rf(out / "mobility_report.json");
        rf << jr.dump(2) << '\n';
    }
    write_manifest(out, "mobility", cfg, {{"records", trajs.size()}, {"report", jr}});
    return 0;
}

// Collect whatever artifacts earlier stages left in --out into one summary.
int cmd_report(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out = prepare_out(args);
    std::ofstream md(out / "report.md");
    if (!md) throw std::runtime_error("cannot write report.md");
    md << "# steersim run report\n\nconfig hash: `" << cfg.hash() << "`\n";

    auto section = [&](const char* title) { md << "\n## " << title << "\n\n"; };

    auto manifest_auc = [&](const fs::path& p) -> json {
        std::ifstream in(p);
        if (!in) return {};
        json j;
        in >> j;
        return j;
    };

    json jt = manifest_auc(out / "train-traffic_manifest.json");
    if (jt.contains("auc")) {
        section("traffic volume prediction");
        md << "| threshold | test AUC |\n|---|---|\n";
        for (auto& [thr, auc] : jt.at("auc").items()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "| %s B | %.3f |\n", thr.c_str(),
                          auc.get<double>());
            md << buf;
        }
    }
    json jc = manifest_auc(out / "train-coverage_manifest.json");
    if (jc.contains("auc")) {
        section("secondary-carrier coverage prediction");
        char buf[96];
        std::snprintf(buf, sizeof buf, "test AUC: %.3f (threshold %.2f dBm)\n",
                      jc.at("auc").get<double>(),
                      jc.at("coverage_threshold_dbm").get<double>());
        md << buf;
    }
    if (fs::exists(out / "steering_curves.csv")) {
        section("traffic steering");
        md << "see `steering_curves.csv` / `steering_curves.svg`\n\n```\n";
        std::ifstream csv(out / "steering_curves.csv");
        md << csv.rdbuf() << "```\n";
    }
    json jm = manifest_auc(out / "mobility_manifest.json");
    if (jm.contains("report")) {
        section("mobility prediction");
        md << "```json\n" << jm.at("report").dump(2) << "\n```\n";
    }
    std::printf("wrote %s\n", (out / "report.md").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_log = log_level_from_env();
    CLI::App app{"two-carrier traffic steering simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string data_path;

    auto* gf = app.add_subcommand("gen-flows", "generate a synthetic flow corpus");
    add_common(gf, args);
    auto* gr = app.add_subcommand("gen-radio", "generate radio samples");
    add_common(gr, args);
    auto* gt = app.add_subcommand("gen-trajectories", "generate device trajectories");
    add_common(gt, args);
    auto* tt = app.add_subcommand("train-traffic", "train the traffic volume predictor");
    add_common(tt, args);
    tt->add_option("--data", data_path, "flow JSONL (default <out>/flows.jsonl)");
    auto* tc = app.add_subcommand("train-coverage", "train the coverage predictor");
    add_common(tc, args);
    tc->add_option("--data", data_path, "radio JSONL (default <out>/radio_samples.jsonl)");
    auto* st = app.add_subcommand("steer", "run the offloading strategy comparison");
    add_common(st, args);
    auto* mo = app.add_subcommand("mobility", "mine and evaluate trajectory templates");
    add_common(mo, args);
    mo->add_option("--data", data_path, "trajectory JSONL (default <out>/trajectories.jsonl)");
    auto* rp = app.add_subcommand("report", "summarize run artifacts into report.md");
    add_common(rp, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gf->parsed()) return cmd_gen_flows(args);
        if (gr->parsed()) return cmd_gen_radio(args);
        if (gt->parsed()) return cmd_gen_trajectories(args);
        if (tt->parsed()) return cmd_train_traffic(args, data_path);
        if (tc->parsed()) return cmd_train_coverage(args, data_path);
        if (st->parsed()) return cmd_steer(args);
        if (mo->parsed()) return cmd_mobility(args, data_path);
        if (rp->parsed()) return cmd_report(args);
    } catch (const std::exception& e) {
        std::cerr << "steersim: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
