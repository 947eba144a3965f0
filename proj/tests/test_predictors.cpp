#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "steersim/flowgen.hpp"
#include "steersim/predictors.hpp"

using namespace steersim;
namespace fs = std::filesystem;

namespace {

ForestParams small_forest() {
    ForestParams p;
    p.n_trees = 30;
    p.max_depth = 8;
    return p;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / tag;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("traffic predictor learns the planted first-packet signal") {
    FlowGenConfig cfg;
    cfg.seed = 3;
    auto flows = gen_flows(cfg, 3000);
    auto res = TrafficPredictor::train(flows, small_forest(), 17);
    for (const auto& roc : res.test_rocs) CHECK(roc.auc > 0.8);
}

TEST_CASE("traffic predictor finds nothing in the signal-free corpus") {
    FlowGenConfig cfg;
    cfg.planted_signal = false;
    cfg.seed = 3;
    auto flows = gen_flows(cfg, 5000);
    auto res = TrafficPredictor::train(flows, small_forest(), 17);
    CHECK(res.test_rocs[1].auc == doctest::Approx(0.5).epsilon(0.12));
}

TEST_CASE("traffic training rejects tiny corpora and unknown thresholds") {
    FlowGenConfig cfg;
    auto flows = gen_flows(cfg, 100);
    CHECK_THROWS_AS(TrafficPredictor::train(flows, small_forest(), 1),
                    std::invalid_argument);

    auto ok = gen_flows(cfg, 1000);
    auto res = TrafficPredictor::train(ok, small_forest(), 1);
    CHECK_THROWS_AS(
        res.predictor.predict_proba(ok[0].key, ok[0].packets.front(), 5000),
        std::invalid_argument);
}

TEST_CASE("traffic training is deterministic and survives save/load") {
    TempDir tmp("steersim_traffic_model_test");
    FlowGenConfig cfg;
    cfg.seed = 5;
    auto flows = gen_flows(cfg, 1500);
    auto a = TrafficPredictor::train(flows, small_forest(), 7);
    auto b = TrafficPredictor::train(flows, small_forest(), 7);
    a.predictor.save(tmp.path);
    auto loaded = TrafficPredictor::load(tmp.path);

    FlowGenConfig probe_cfg = cfg;
    probe_cfg.seed = 99;
    auto probes = gen_flows(probe_cfg, 200);
    for (const auto& f : probes) {
        for (uint64_t thr : kVolumeThresholds) {
            double pa = a.predictor.predict_proba(f.key, f.packets.front(), thr);
            CHECK(pa == b.predictor.predict_proba(f.key, f.packets.front(), thr));
            CHECK(pa == loaded.predict_proba(f.key, f.packets.front(), thr));
            CHECK(pa >= 0.0);
            CHECK(pa <= 1.0);
        }
    }
}

TEST_CASE("the encoder never sees anything past the first packet") {
    // identical key + first packet but wildly different tails must encode equal
    FlowGenConfig cfg;
    auto flows = gen_flows(cfg, 300);
    auto enc = FlowFeatureEncoder::fit(flows);
    FlowRecord f = flows[0];
    FeatureVector before = enc.encode(f.key, f.packets.front());
    f.packets.push_back({f.duration() + 1.0, 1000000, Direction::Downlink});
    f.service_class = 2;
    FeatureVector after = enc.encode(f.key, f.packets.front());
    CHECK(before.values == after.values);
}

TEST_CASE("coverage predictor benefits from cross-carrier shadow correlation") {
    EnvConfig env_cfg = EnvConfig::defaults();
    env_cfg.seed = 11;
    RadioEnv env_corr(env_cfg);
    auto corr = CoveragePredictor::train(env_corr.gen_samples(4000), small_forest(), 3,
                                         env_corr.coverage_threshold_dbm());

    env_cfg.shadow_correlation = 0.0;
    RadioEnv env_indep(env_cfg);
    auto indep = CoveragePredictor::train(env_indep.gen_samples(4000), small_forest(), 3,
                                          env_indep.coverage_threshold_dbm());

    CHECK(corr.test_roc.auc > indep.test_roc.auc);
    CHECK(corr.test_roc.auc > 0.9);
}

TEST_CASE("coverage predictor round-trips through its JSON file") {
    TempDir tmp("steersim_coverage_model_test");
    EnvConfig env_cfg = EnvConfig::defaults();
    env_cfg.seed = 13;
    RadioEnv env(env_cfg);
    auto samples = env.gen_samples(2000);
    auto res = CoveragePredictor::train(samples, small_forest(), 5,
                                        env.coverage_threshold_dbm());
    fs::path p = tmp.path / "coverage.json";
    res.predictor.save(p);
    auto loaded = CoveragePredictor::load(p);
    CHECK(loaded.coverage_threshold_dbm() == res.predictor.coverage_threshold_dbm());
    auto probes = env.gen_samples(200, 9);
    for (const auto& s : probes)
        CHECK(loaded.predict_proba(s) == res.predictor.predict_proba(s));
}

TEST_CASE("coverage training rejects tiny or single-class corpora") {
    EnvConfig env_cfg = EnvConfig::defaults();
    RadioEnv env(env_cfg);
    auto samples = env.gen_samples(100);
    CHECK_THROWS_AS(CoveragePredictor::train(samples, small_forest(), 1, -90.0),
                    std::invalid_argument);

    auto many = env.gen_samples(600);
    for (auto& s : many) s.covered = false;
    CHECK_THROWS_AS(CoveragePredictor::train(many, small_forest(), 1, -90.0),
                    std::invalid_argument);
}

TEST_CASE("radio features expose neither position nor the secondary carrier") {
    EnvConfig env_cfg = EnvConfig::defaults();
    RadioEnv env(env_cfg, -90.0);
    auto s = env.gen_samples(1)[0];
    FeatureVector v = encode_radio_features(s);
    size_t n = s.primary_rsrp.size();
    REQUIRE(v.values.size() == 2 * n + 1);
    // sorted descending levels
    for (size_t i = 1; i < n; ++i) CHECK(v.values[i] <= v.values[i - 1]);
    // margin between the two strongest
    CHECK(v.values[n] == doctest::Approx(v.values[0] - v.values[1]));
    // one-hot of the serving cell
    double onehot_sum = 0.0;
    for (size_t i = 0; i < n; ++i) onehot_sum += v.values[n + 1 + i];
    CHECK(onehot_sum == 1.0);
    CHECK(v.values[n + 1 + s.serving_cell()] == 1.0);

    // changing the secondary level or position must not change the encoding
    RadioSample t = s;
    t.secondary_rsrp += 30.0;
    t.covered = !t.covered;
    t.x += 100.0;
    CHECK(encode_radio_features(t).values == v.values);
}
