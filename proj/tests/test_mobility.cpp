#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steersim/config.hpp"
#include "steersim/kernels.hpp"
#include "steersim/mobility.hpp"

using namespace steersim;

namespace {

RadioSample make_sample(std::vector<double> rsrp, bool covered = false) {
    RadioSample s;
    s.primary_rsrp = std::move(rsrp);
    s.covered = covered;
    return s;
}

Fingerprint fp_of(std::initializer_list<std::pair<uint32_t, double>> vals) {
    Fingerprint fp;
    for (auto& [c, v] : vals) fp.values[c] = v;
    return fp;
}

// Noise-free fixture: identical devices per route, so clustering is exact.
std::vector<Trajectory> clean_trajectories(RadioEnv& env, size_t devices_per_route) {
    TrajectoryGenConfig t;
    t.routes = 3;
    t.devices_per_route = devices_per_route;
    t.samples_per_trajectory = 20;
    t.lateral_jitter_m = 0.0;
    t.shadowing = false;
    return env.gen_trajectories(t);
}

}  // namespace

TEST_CASE("fingerprints keep detected cells and always the serving cell") {
    RadioSample s = make_sample({-70.0, -120.0, -95.0});
    Fingerprint fp = fingerprint_from_sample(s, -110.0);
    REQUIRE(fp.values.size() == 2);
    CHECK(fp.values.at(0) == -70.0);
    CHECK(fp.values.at(2) == -95.0);

    // serving cell below the floor is still reported
    RadioSample weak = make_sample({-120.0, -130.0});
    Fingerprint wfp = fingerprint_from_sample(weak, -110.0);
    REQUIRE(wfp.values.size() == 1);
    CHECK(wfp.values.at(0) == -120.0);
}

TEST_CASE("noise-free routes are recovered exactly") {
    EnvConfig cfg = EnvConfig::defaults();
    cfg.seed = 2;
    RadioEnv env(cfg, -90.0);
    auto trajs = clean_trajectories(env, 6);
    MiningParams mp;
    mp.seed = 4;
    TrajectoryModel model = mine_trajectories(trajs, 3, mp);

    auto assign = assign_routes(model, trajs, mp);
    // each ground-truth route maps to exactly one cluster
    std::map<uint32_t, size_t> route_to_cluster;
    for (size_t i = 0; i < trajs.size(); ++i) {
        auto [it, inserted] = route_to_cluster.emplace(trajs[i].route_id, assign[i]);
        CHECK(it->second == assign[i]);
    }
    CHECK(route_to_cluster.size() == 3);

    MobilityReport rep = evaluate_mobility(model, trajs, {}, mp);
    CHECK(rep.cluster_route_agreement == 1.0);
}

TEST_CASE("k=1 centroid is the mean trajectory") {
    EnvConfig cfg = EnvConfig::defaults();
    cfg.seed = 6;
    RadioEnv env(cfg, -90.0);
    auto trajs = clean_trajectories(env, 2);
    MiningParams mp;
    mp.resample_steps = 20;
    TrajectoryModel model = mine_trajectories(trajs, 1, mp);
    REQUIRE(model.routes.size() == 1);
    CHECK(model.routes[0].member_count == trajs.size());
    // centroid dims: mean over members implies values within the member range
    for (size_t s = 0; s < model.steps; ++s)
        for (double v : model.routes[0].centroid[s]) {
            CHECK(v <= 0.0);
            CHECK(v >= mp.impute_floor_dbm - 1e-9);
        }
}

TEST_CASE("a verbatim template prefix matches its own route at distance zero") {
    EnvConfig cfg = EnvConfig::defaults();
    cfg.seed = 8;
    RadioEnv env(cfg, -90.0);
    auto trajs = clean_trajectories(env, 4);
    MiningParams mp;
    mp.seed = 1;
    TrajectoryModel model = mine_trajectories(trajs, 3, mp);

    for (uint32_t k = 0; k < 3; ++k) {
        // read the first 5 centroid steps back as fingerprints
        std::vector<Fingerprint> prefix;
        for (size_t s = 0; s < 5; ++s) {
            Fingerprint fp;
            for (size_t d = 0; d < model.cell_ids.size(); ++d)
                fp.values[model.cell_ids[d]] = model.routes[k].centroid[s][d];
            prefix.push_back(std::move(fp));
        }
        auto matches = match_trajectory(model, prefix);
        REQUIRE(matches.size() == 3);
        CHECK(matches.front().route_id == k);
        CHECK(matches.front().distance == doctest::Approx(0.0).epsilon(1e-9));
        // scores are a probability vector, ranked descending
        double total = 0.0;
        for (size_t i = 0; i < matches.size(); ++i) {
            CHECK(matches[i].score >= 0.0);
            if (i > 0) CHECK(matches[i].score <= matches[i - 1].score);
            total += matches[i].score;
        }
        CHECK(total == doctest::Approx(1.0));
    }
}

TEST_CASE("matching input validation") {
    EnvConfig cfg = EnvConfig::defaults();
    cfg.seed = 8;
    RadioEnv env(cfg, -90.0);
    auto trajs = clean_trajectories(env, 2);
    MiningParams mp;
    TrajectoryModel model = mine_trajectories(trajs, 2, mp);

    CHECK_THROWS_AS(match_trajectory(model, std::vector<Fingerprint>{}),
                    std::invalid_argument);
    std::vector<Fingerprint> too_long(model.steps + 1, fp_of({{0, -80.0}}));
    CHECK_THROWS_AS(match_trajectory(model, too_long), std::invalid_argument);
    CHECK_THROWS_AS(mine_trajectories(trajs, 0, mp), std::invalid_argument);
    CHECK_THROWS_AS(mine_trajectories(trajs, trajs.size() + 1, mp), std::invalid_argument);
    CHECK_THROWS_AS(predict_coverage_ahead(model, 99, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(predict_handover(model, 99, 0, 1), std::invalid_argument);
}

TEST_CASE("dynamics classification with exact boundary behavior") {
    auto seq = [](double step_db, size_t n) {
        std::vector<Fingerprint> fps;
        for (size_t i = 0; i < n; ++i)
            fps.push_back(fp_of({{0, -80.0 + step_db * static_cast<double>(i)}}));
        return fps;
    };
    CHECK(estimate_dynamics(seq(0.0, 4)) == Dynamics::Static);
    // displacement exactly at a threshold falls in the lower class
    CHECK(estimate_dynamics(seq(0.5, 4)) == Dynamics::Static);
    CHECK(estimate_dynamics(seq(0.6, 4)) == Dynamics::Slow);
    CHECK(estimate_dynamics(seq(3.0, 4)) == Dynamics::Slow);
    CHECK(estimate_dynamics(seq(3.1, 4)) == Dynamics::Fast);
    CHECK_THROWS_AS(estimate_dynamics(seq(0.0, 1)), std::invalid_argument);
}

TEST_CASE("handover prediction on a hand-built model") {
    TrajectoryModel model;
    model.cell_ids = {0, 1, 2};
    model.steps = 5;
    RouteTemplate r;
    r.centroid.assign(5, {0.0, 0.0, 0.0});
    r.serving_cells = {0, 0, 1, 1, 2};
    r.serving_dist = {{{0, 1.0}}, {{0, 0.9}, {1, 0.1}}, {{1, 0.8}, {0, 0.2}},
                      {{1, 1.0}}, {{2, 0.15}, {1, 0.85}}};
    r.coverage_prob = {0.0, 0.1, 0.5, 0.9, 1.0};
    r.member_count = 10;
    model.routes.push_back(r);

    HandoverPrediction pred = predict_handover(model, 0, 0, 4);
    REQUIRE(pred.steps_to_handover.has_value());
    CHECK(*pred.steps_to_handover == 2);  // serving changes 0 -> 1 at step 2
    REQUIRE(pred.candidates.size() == 2);
    CHECK(pred.candidates[0].cell == 1);  // ranked by first appearance
    CHECK(pred.candidates[1].cell == 2);
    // scores are the member fractions, untouched since they sum to <= 1
    CHECK(pred.candidates[0].score == doctest::Approx(0.8));
    CHECK(pred.candidates[1].score == doctest::Approx(0.15));

    // no change within a short horizon
    HandoverPrediction none = predict_handover(model, 0, 0, 1);
    CHECK_FALSE(none.steps_to_handover.has_value());
    CHECK(none.candidates.empty());

    auto ahead = predict_coverage_ahead(model, 0, 1, 3);
    REQUIRE(ahead.size() == 3);
    CHECK(ahead[0] == doctest::Approx(0.5));
    CHECK(ahead[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(predict_coverage_ahead(model, 0, 1, 4), std::invalid_argument);
}

TEST_CASE("candidate scores are renormalized only when they exceed one") {
    TrajectoryModel model;
    model.cell_ids = {0, 1, 2};
    model.steps = 3;
    RouteTemplate r;
    r.centroid.assign(3, {0.0, 0.0, 0.0});
    r.serving_cells = {0, 1, 2};
    r.serving_dist = {{{0, 1.0}}, {{1, 0.7}, {0, 0.3}}, {{2, 0.8}, {1, 0.2}}};
    r.coverage_prob = {0.0, 0.0, 0.0};
    r.member_count = 10;
    model.routes.push_back(r);
    HandoverPrediction pred = predict_handover(model, 0, 0, 2);
    REQUIRE(pred.candidates.size() == 2);
    // 0.7 + 0.8 > 1, so scores collapse to a distribution
    double total = pred.candidates[0].score + pred.candidates[1].score;
    CHECK(total == doctest::Approx(1.0));
    CHECK(pred.candidates[0].score == doctest::Approx(0.7 / 1.5));
}

TEST_CASE("trajectory model JSON round-trip") {
    EnvConfig cfg = EnvConfig::defaults();
    cfg.seed = 15;
    RadioEnv env(cfg, -90.0);
    auto trajs = clean_trajectories(env, 3);
    MiningParams mp;
    mp.seed = 2;
    TrajectoryModel model = mine_trajectories(trajs, 3, mp);
    TrajectoryModel back = TrajectoryModel::from_json(model.to_json());
    CHECK(back.to_json() == model.to_json());
    CHECK(back.cell_ids == model.cell_ids);
    CHECK(back.steps == model.steps);

    nlohmann::json bad = model.to_json();
    bad["version"] = 9;
    CHECK_THROWS_AS(TrajectoryModel::from_json(bad), std::runtime_error);
}

TEST_CASE("default jittered fixture meets the mobility accuracy bars") {
    RunConfig cfg = RunConfig::from_json(nlohmann::json::object());
    RadioEnv env(cfg.env);
    auto trajs = env.gen_trajectories(cfg.trajectories);
    std::vector<Trajectory> training, heldout;
    for (const auto& tr : trajs)
        (tr.device_id % 4 == 3 ? heldout : training).push_back(tr);
    MiningParams mp = cfg.mining;
    mp.seed = cfg.stage_seed("mobility");
    TrajectoryModel model = mine_trajectories(training, cfg.k_routes, mp);
    MobilityReport rep = evaluate_mobility(model, training, heldout, mp);
    CHECK(rep.cluster_route_agreement >= 0.9);
    CHECK(rep.prefix_top1_accuracy >= 0.9);
    CHECK(rep.handover_step_accuracy >= 0.85);
    CHECK(rep.n_heldout == heldout.size());
}
