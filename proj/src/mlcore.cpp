#include "steersim/mlcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "steersim/rng.hpp"

namespace steersim {

size_t Dataset::positives() const {
    size_t p = 0;
    for (uint8_t l : labels) p += l != 0;
    return p;
}

void Dataset::validate() const {
    if (features.empty()) throw std::invalid_argument("dataset empty");
    if (features.size() != labels.size())
        throw std::invalid_argument("dataset features/labels length mismatch");
    size_t d = features.front().values.size();
    uint32_t schema = features.front().schema_id;
    for (const auto& f : features) {
        if (f.values.size() != d) throw std::invalid_argument("dataset ragged feature vectors");
        if (f.schema_id != schema) throw SchemaError("dataset mixes feature schemas");
        for (double v : f.values)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
}

double gini(std::span<const uint8_t> labels) {
    if (labels.empty()) throw std::invalid_argument("gini: empty input");
    double n = static_cast<double>(labels.size());
    size_t pos = 0;
    for (uint8_t l : labels) pos += l != 0;
    double p = static_cast<double>(pos) / n;
    double q = static_cast<double>(labels.size() - pos) / n;
    return 1.0 - p * p - q * q;
}

namespace {

// computed from counts so that swapping pos/neg is exactly symmetric
double gini_counts(uint32_t pos, uint32_t n) {
    double p = static_cast<double>(pos) / n;
    double q = static_cast<double>(n - pos) / n;
    return 1.0 - p * p - q * q;
}

struct Builder {
    const Dataset& data;
    const TreeParams& params;
    Rng& rng;
    std::vector<TreeNode> nodes;
    std::vector<double> col;  // scratch
    std::vector<std::pair<double, uint8_t>> sorted;

    int32_t build(std::vector<uint32_t>& idx, int depth) {
        uint32_t n = static_cast<uint32_t>(idx.size());
        uint32_t pos = 0;
        for (uint32_t i : idx) pos += data.labels[i] != 0;

        int32_t me = static_cast<int32_t>(nodes.size());
        nodes.push_back({});
        nodes[me].sample_count = n;
        nodes[me].positive_count = pos;

        bool pure = pos == 0 || pos == n;
        if (pure || depth >= params.max_depth ||
            n < 2 * static_cast<uint32_t>(params.min_leaf))
            return me;

        size_t d = data.dim();
        std::vector<int> feats;
        if (params.features_per_split > 0 &&
            static_cast<size_t>(params.features_per_split) < d) {
            std::vector<int> all(d);
            std::iota(all.begin(), all.end(), 0);
            for (int i = 0; i < params.features_per_split; ++i) {
                size_t j = i + rng.uniform_int(d - i);
                std::swap(all[i], all[j]);
            }
            feats.assign(all.begin(), all.begin() + params.features_per_split);
            std::sort(feats.begin(), feats.end());
        } else {
            feats.resize(d);
            std::iota(feats.begin(), feats.end(), 0);
        }

        double best_score = std::numeric_limits<double>::infinity();
        int best_feat = -1;
        double best_thr = 0.0;
        uint32_t minl = static_cast<uint32_t>(params.min_leaf);

        for (int f : feats) {
            sorted.clear();
            for (uint32_t i : idx)
                sorted.emplace_back(data.features[i].values[f], data.labels[i]);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            uint32_t lpos = 0;
            for (uint32_t i = 0; i + 1 < n; ++i) {
                lpos += sorted[i].second != 0;
                if (sorted[i].first == sorted[i + 1].first) continue;
                uint32_t nl = i + 1;
                uint32_t nr = n - nl;
                if (nl < minl || nr < minl) continue;
                double thr = 0.5 * (sorted[i].first + sorted[i + 1].first);
                if (!(thr > sorted[i].first) || thr > sorted[i + 1].first) continue;
                double score = nl * gini_counts(lpos, nl) + nr * gini_counts(pos - lpos, nr);
                if (score < best_score) {
                    best_score = score;
                    best_feat = f;
                    best_thr = thr;
                }
            }
        }

        if (best_feat < 0) return me;

        std::vector<uint32_t> left, right;
        for (uint32_t i : idx) {
            if (data.features[i].values[best_feat] < best_thr)
                left.push_back(i);
            else
                right.push_back(i);
        }
        if (left.empty() || right.empty()) return me;
        idx.clear();
        idx.shrink_to_fit();

        nodes[me].split_feature = best_feat;
        nodes[me].split_value = best_thr;
        int32_t l = build(left, depth + 1);
        int32_t r = build(right, depth + 1);
        nodes[me].left = l;
        nodes[me].right = r;
        return me;
    }
};

TreeModel train_tree_on(const Dataset& data, std::vector<uint32_t> idx,
                        const TreeParams& params, Rng& rng) {
    Builder b{data, params, rng};
    b.build(idx, 0);
    TreeModel m;
    m.nodes = std::move(b.nodes);
    return m;
}

}  // namespace

TreeModel train_tree(const Dataset& data, const TreeParams& params) {
    data.validate();
    if (params.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    std::vector<uint32_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(params.seed);
    return train_tree_on(data, std::move(idx), params, rng);
}

double TreeModel::predict_proba(std::span<const double> x) const {
    int32_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& nd = nodes[i];
        i = x[nd.split_feature] < nd.split_value ? nd.left : nd.right;
    }
    return nodes[i].positive_fraction();
}

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
    data.validate();
    if (params.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
    size_t n = data.size();
    size_t d = data.dim();

    TreeParams tp;
    tp.max_depth = params.max_depth;
    tp.min_leaf = params.min_leaf;
    tp.features_per_split = params.features_per_split < 0
                                ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))))
                                : params.features_per_split;

    ForestModel model;
    model.params = params;
    model.schema_id = data.features.front().schema_id;
    model.trees.reserve(params.n_trees);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng = Rng(params.seed).derive("tree", static_cast<uint64_t>(t));
        std::vector<uint32_t> idx(n);
        if (params.bootstrap) {
            for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(rng.uniform_int(n));
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        model.trees.push_back(train_tree_on(data, std::move(idx), tp, rng));
    }
    return model;
}

double ForestModel::predict_proba(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& t : trees) acc += t.predict_proba(x);
    return acc / static_cast<double>(trees.size());
}

double ForestModel::predict_proba(const FeatureVector& x) const {
    if (x.schema_id != schema_id)
        throw SchemaError("feature schema " + std::to_string(x.schema_id) +
                          " does not match model schema " + std::to_string(schema_id));
    return predict_proba(std::span<const double>(x.values));
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json jtrees = nlohmann::json::array();
    for (const auto& t : trees) {
        nlohmann::json jnodes = nlohmann::json::array();
        for (const auto& nd : t.nodes)
            jnodes.push_back({nd.split_feature, nd.split_value, nd.left, nd.right,
                              nd.sample_count, nd.positive_count});
        jtrees.push_back(std::move(jnodes));
    }
    return nlohmann::json{{"version", 1},
                          {"schema_id", schema_id},
                          {"params",
                           {{"n_trees", params.n_trees},
                            {"max_depth", params.max_depth},
                            {"min_leaf", params.min_leaf},
                            {"features_per_split", params.features_per_split},
                            {"bootstrap", params.bootstrap},
                            {"seed", params.seed}}},
                          {"trees", jtrees}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
    int version = j.at("version").get<int>();
    if (version != 1)
        throw std::runtime_error("unsupported model version " + std::to_string(version));
    ForestModel m;
    m.schema_id = j.at("schema_id").get<uint32_t>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.min_leaf = p.at("min_leaf").get<int>();
    m.params.features_per_split = p.at("features_per_split").get<int>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.seed = p.at("seed").get<uint64_t>();
    for (const auto& jt : j.at("trees")) {
        TreeModel t;
        for (const auto& jn : jt) {
            TreeNode nd;
            nd.split_feature = jn.at(0).get<int32_t>();
            nd.split_value = jn.at(1).get<double>();
            nd.left = jn.at(2).get<int32_t>();
            nd.right = jn.at(3).get<int32_t>();
            nd.sample_count = jn.at(4).get<uint32_t>();
            nd.positive_count = jn.at(5).get<uint32_t>();
            t.nodes.push_back(nd);
        }
        if (t.nodes.empty()) throw std::runtime_error("model tree without nodes");
        m.trees.push_back(std::move(t));
    }
    if (m.trees.empty()) throw std::runtime_error("model without trees");
    return m;
}

void ForestModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << to_json().dump(2) << '\n';
}

ForestModel ForestModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace steersim
