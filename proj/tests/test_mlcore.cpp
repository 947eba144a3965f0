#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "steersim/mlcore.hpp"
#include "steersim/rng.hpp"

using namespace steersim;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& xs,
                     const std::vector<uint8_t>& ys, uint32_t schema = 1) {
    Dataset d;
    for (const auto& x : xs) d.features.push_back({x, schema});
    d.labels = ys;
    return d;
}

// Noisy linearly separable problem: y = 1 iff x0 + x1 > 1 (plus flipped noise).
Dataset linear_dataset(size_t n, uint64_t seed, double flip = 0.05) {
    Rng rng(seed);
    Dataset d;
    for (size_t i = 0; i < n; ++i) {
        double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
        uint8_t y = (a + b > 1.0) ? 1 : 0;
        if (rng.uniform() < flip) y ^= 1;
        d.features.push_back({{a, b, c}, 1});
        d.labels.push_back(y);
    }
    return d;
}

}  // namespace

TEST_CASE("gini impurity closed forms") {
    std::vector<uint8_t> half = {0, 1, 0, 1};
    CHECK(gini(half) == doctest::Approx(0.5));
    std::vector<uint8_t> pure = {1, 1, 1};
    CHECK(gini(pure) == doctest::Approx(0.0));
    std::vector<uint8_t> quarter = {1, 0, 0, 0};
    CHECK(gini(quarter) == doctest::Approx(0.375));
    CHECK_THROWS_AS(gini(std::vector<uint8_t>{}), std::invalid_argument);
}

TEST_CASE("dataset validation") {
    Dataset ok = make_dataset({{1.0, 2.0}, {3.0, 4.0}}, {0, 1});
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.positives() == 1);

    Dataset empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    Dataset ragged = make_dataset({{1.0, 2.0}, {3.0}}, {0, 1});
    CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);

    Dataset nan = make_dataset({{1.0, std::nan("")}}, {0});
    CHECK_THROWS_AS(nan.validate(), std::invalid_argument);

    Dataset mixed = make_dataset({{1.0}, {2.0}}, {0, 1});
    mixed.features[1].schema_id = 2;
    CHECK_THROWS_AS(mixed.validate(), SchemaError);

    Dataset mismatch = make_dataset({{1.0}, {2.0}}, {0});
    CHECK_THROWS_AS(mismatch.validate(), std::invalid_argument);
}

TEST_CASE("single-class data yields a single leaf") {
    Dataset d = make_dataset({{0.0}, {1.0}, {2.0}}, {1, 1, 1});
    TreeModel t = train_tree(d, {});
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].is_leaf());
    CHECK(t.predict_proba(std::vector<double>{5.0}) == 1.0);
}

TEST_CASE("a depth-2 tree solves XOR exactly") {
    Dataset d = make_dataset({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}},
                             {0, 1, 1, 0});
    TreeParams p;
    p.max_depth = 2;
    p.min_leaf = 1;
    TreeModel t = train_tree(d, p);
    CHECK(t.predict_proba(std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(t.predict_proba(std::vector<double>{0.0, 1.0}) == 1.0);
    CHECK(t.predict_proba(std::vector<double>{1.0, 0.0}) == 1.0);
    CHECK(t.predict_proba(std::vector<double>{1.0, 1.0}) == 0.0);
}

TEST_CASE("tree splits respect min_leaf and max_depth") {
    Dataset d = linear_dataset(500, 3);
    TreeParams p;
    p.max_depth = 3;
    p.min_leaf = 40;
    TreeModel t = train_tree(d, p);
    // walk the tree: leaf sizes and depths within bounds
    std::vector<std::pair<int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, depth] = stack.back();
        stack.pop_back();
        const TreeNode& nd = t.nodes[i];
        CHECK(depth <= p.max_depth);
        if (nd.is_leaf()) {
            CHECK(nd.sample_count >= static_cast<uint32_t>(p.min_leaf));
        } else {
            stack.push_back({nd.left, depth + 1});
            stack.push_back({nd.right, depth + 1});
        }
    }
}

TEST_CASE("label flip mirrors the forest probabilities") {
    Dataset d = linear_dataset(600, 17);
    Dataset flipped = d;
    for (auto& l : flipped.labels) l ^= 1;
    ForestParams p;
    p.n_trees = 20;
    p.seed = 4;
    ForestModel a = train_forest(d, p);
    ForestModel b = train_forest(flipped, p);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform()};
        CHECK(a.predict_proba(x) + b.predict_proba(x) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("forest learns a noisy linear rule") {
    Dataset train = linear_dataset(1500, 1);
    Dataset test = linear_dataset(500, 2, 0.0);
    ForestParams p;
    p.n_trees = 30;
    p.seed = 9;
    ForestModel m = train_forest(train, p);
    size_t correct = 0;
    for (size_t i = 0; i < test.size(); ++i)
        correct += (m.predict_proba(test.features[i]) > 0.5) == (test.labels[i] != 0);
    CHECK(static_cast<double>(correct) / test.size() > 0.9);
}

TEST_CASE("training is deterministic per seed") {
    Dataset d = linear_dataset(400, 23);
    ForestParams p;
    p.n_trees = 10;
    p.seed = 5;
    ForestModel a = train_forest(d, p);
    ForestModel b = train_forest(d, p);
    CHECK(a.to_json() == b.to_json());
    p.seed = 6;
    ForestModel c = train_forest(d, p);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("model JSON round-trip preserves predictions") {
    Dataset d = linear_dataset(400, 31);
    ForestParams p;
    p.n_trees = 8;
    p.seed = 11;
    ForestModel m = train_forest(d, p);
    auto path = std::filesystem::temp_directory_path() / "steersim_model_test.json";
    m.save(path.string());
    ForestModel back = ForestModel::load(path.string());
    std::filesystem::remove(path);
    CHECK(back.to_json() == m.to_json());
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform()};
        CHECK(back.predict_proba(x) == m.predict_proba(x));
    }
}

TEST_CASE("schema and version guards") {
    Dataset d = linear_dataset(300, 41);
    ForestModel m = train_forest(d, {});
    FeatureVector wrong{{0.1, 0.2, 0.3}, 999};
    CHECK_THROWS_AS(m.predict_proba(wrong), SchemaError);

    nlohmann::json j = m.to_json();
    j["version"] = 2;
    CHECK_THROWS_AS(ForestModel::from_json(j), std::runtime_error);
}

TEST_CASE("leaf counts are conserved down every split") {
    Dataset d = linear_dataset(500, 53);
    TreeModel t = train_tree(d, {});
    for (const auto& nd : t.nodes) {
        if (nd.is_leaf()) continue;
        const TreeNode& l = t.nodes[nd.left];
        const TreeNode& r = t.nodes[nd.right];
        CHECK(l.sample_count + r.sample_count == nd.sample_count);
        CHECK(l.positive_count + r.positive_count == nd.positive_count);
    }
}
