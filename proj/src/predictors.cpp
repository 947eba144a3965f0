#include "steersim/predictors.hpp"

#include <fstream>

#include "steersim/rng.hpp"

namespace steersim {

TrafficTrainResult TrafficPredictor::train(std::span<const FlowRecord> flows,
                                                      const ForestParams& params,
                                                      uint64_t seed) {
    if (flows.size() < 200)
        throw std::invalid_argument("traffic predictor: need at least 200 flows");

    TrafficTrainResult res;
    res.predictor.encoder_ = FlowFeatureEncoder::fit(flows);
    const auto& enc = res.predictor.encoder_;

    std::vector<FeatureVector> feats;
    feats.reserve(flows.size());
    std::vector<VolumeLabel> labels;
    labels.reserve(flows.size());
    for (const auto& f : flows) {
        feats.push_back(enc.encode(f.key, f.packets.front()));
        labels.push_back(label_flow(f));
    }

    for (size_t ti = 0; ti < 3; ++ti) {
        Dataset data;
        data.features = feats;
        data.labels.reserve(flows.size());
        for (const auto& l : labels) {
            bool pos = ti == 0 ? l.exceeds_1kB : ti == 1 ? l.exceeds_10kB : l.exceeds_100kB;
            data.labels.push_back(pos ? 1 : 0);
        }
        size_t pos = data.positives();
        if (pos == 0 || pos == data.size())
            throw std::invalid_argument("traffic predictor: threshold " +
                                        std::to_string(kVolumeThresholds[ti]) +
                                        " B has a single class");
        Dataset train, test;
        split_dataset(data, 0.3, seed + ti, train, test);

        ForestParams fp = params;
        fp.seed = Rng(seed).derive("traffic-forest", ti).state();
        res.predictor.models_[ti] = train_forest(train, fp);

        std::vector<double> scores;
        scores.reserve(test.size());
        for (const auto& x : test.features)
            scores.push_back(res.predictor.models_[ti].predict_proba(x));
        res.test_rocs[ti] = roc_curve(scores, test.labels);
    }
    return res;
}

double TrafficPredictor::predict_proba(const FlowKey& key, const PacketMeta& first_packet,
                                       uint64_t threshold_bytes) const {
    for (size_t i = 0; i < 3; ++i)
        if (kVolumeThresholds[i] == threshold_bytes)
            return models_[i].predict_proba(encoder_.encode(key, first_packet));
    throw std::invalid_argument("unknown volume threshold " + std::to_string(threshold_bytes));
}

void TrafficPredictor::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest{{"version", 1},
                            {"encoder", encoder_.to_json()},
                            {"thresholds", {kVolumeThresholds[0], kVolumeThresholds[1],
                                            kVolumeThresholds[2]}}};
    std::ofstream mf(dir / "traffic_manifest.json");
    if (!mf) throw std::runtime_error("cannot write traffic manifest");
    mf << manifest.dump(2) << '\n';
    for (size_t i = 0; i < 3; ++i)
        models_[i].save((dir / ("traffic_model_" + std::to_string(kVolumeThresholds[i]) +
                                ".json"))
                            .string());
}

TrafficPredictor TrafficPredictor::load(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "traffic_manifest.json");
    if (!mf) throw std::runtime_error("cannot open traffic manifest in " + dir.string());
    nlohmann::json manifest;
    mf >> manifest;
    if (manifest.at("version").get<int>() != 1)
        throw std::runtime_error("unsupported traffic predictor version");
    TrafficPredictor p;
    p.encoder_ = FlowFeatureEncoder::from_json(manifest.at("encoder"));
    for (size_t i = 0; i < 3; ++i)
        p.models_[i] = ForestModel::load(
            (dir / ("traffic_model_" + std::to_string(kVolumeThresholds[i]) + ".json"))
                .string());
    return p;
}

CoverageTrainResult CoveragePredictor::train(std::span<const RadioSample> samples,
                                                        const ForestParams& params,
                                                        uint64_t seed,
                                                        double coverage_threshold_dbm) {
    if (samples.size() < 500)
        throw std::invalid_argument("coverage predictor: need at least 500 samples");

    Dataset data;
    data.features.reserve(samples.size());
    data.labels.reserve(samples.size());
    for (const auto& s : samples) {
        data.features.push_back(encode_radio_features(s));
        data.labels.push_back(s.covered ? 1 : 0);
    }
    size_t pos = data.positives();
    if (pos == 0 || pos == data.size())
        throw std::invalid_argument("coverage predictor: coverage labels are single-class");

    Dataset train, test;
    split_dataset(data, 0.3, seed, train, test);

    CoverageTrainResult res;
    ForestParams fp = params;
    fp.seed = Rng(seed).derive("coverage-forest").state();
    res.predictor.model_ = train_forest(train, fp);
    res.predictor.coverage_threshold_dbm_ = coverage_threshold_dbm;

    std::vector<double> scores;
    scores.reserve(test.size());
    for (const auto& x : test.features)
        scores.push_back(res.predictor.model_.predict_proba(x));
    res.test_roc = roc_curve(scores, test.labels);
    return res;
}

double CoveragePredictor::predict_proba(const RadioSample& sample) const {
    return model_.predict_proba(encode_radio_features(sample));
}

void CoveragePredictor::save(const std::filesystem::path& path) const {
    nlohmann::json j = model_.to_json();
    j["coverage_threshold_dbm"] = coverage_threshold_dbm_;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << j.dump(2) << '\n';
}

CoveragePredictor CoveragePredictor::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    CoveragePredictor p;
    p.model_ = ForestModel::from_json(j);
    p.coverage_threshold_dbm_ = j.at("coverage_threshold_dbm").get<double>();
    return p;
}

}  // namespace steersim
