#pragma once

#include <array>
#include <filesystem>
#include <span>

#include "steersim/features.hpp"
#include "steersim/metrics.hpp"
#include "steersim/mlcore.hpp"

namespace steersim {

struct TrafficTrainResult;
struct CoverageTrainResult;

// Three forests, one per volume threshold, all fed from the first packet only.
class TrafficPredictor {
public:
    // Stratified 70/30 split per threshold; ROCs come from the held-out part.
    // Throws if fewer than 200 flows or a threshold lacks both classes.
    static TrafficTrainResult train(std::span<const FlowRecord> flows,
                                    const ForestParams& params, uint64_t seed);

    double predict_proba(const FlowKey& key, const PacketMeta& first_packet,
                         uint64_t threshold_bytes) const;  // throws on unknown threshold

    const FlowFeatureEncoder& encoder() const { return encoder_; }
    const ForestModel& model(size_t i) const { return models_[i]; }

    void save(const std::filesystem::path& dir) const;
    static TrafficPredictor load(const std::filesystem::path& dir);

private:
    FlowFeatureEncoder encoder_;
    std::array<ForestModel, 3> models_;
};

struct TrafficTrainResult {
    TrafficPredictor predictor;
    std::array<RocCurve, 3> test_rocs;  // indexed like kVolumeThresholds
};

class CoveragePredictor {
public:
    // Trained on encode_radio_features output only. Throws if fewer than 500
    // samples or single-class coverage labels.
    static CoverageTrainResult train(std::span<const RadioSample> samples,
                                     const ForestParams& params, uint64_t seed,
                                     double coverage_threshold_dbm);

    double predict_proba(const RadioSample& sample) const;

    double coverage_threshold_dbm() const { return coverage_threshold_dbm_; }
    const ForestModel& model() const { return model_; }

    void save(const std::filesystem::path& path) const;
    static CoveragePredictor load(const std::filesystem::path& path);

private:
    ForestModel model_;
    double coverage_threshold_dbm_ = 0.0;
};

struct CoverageTrainResult {
    CoveragePredictor predictor;
    RocCurve test_roc;
};

}  // namespace steersim
