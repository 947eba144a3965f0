#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "steersim/flowgen.hpp"
#include "steersim/mlcore.hpp"
#include "steersim/mobility.hpp"
#include "steersim/radioenv.hpp"
#include "steersim/steering.hpp"

namespace steersim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One document drives a whole run; every randomized stage derives its stream
// from (seed, stage name), so the config fully determines all outputs.
struct RunConfig {
    uint64_t seed = 42;
    EnvConfig env = EnvConfig::defaults();
    FlowGenConfig flowgen;
    size_t n_flows = 10000;
    size_t n_radio_samples = 10000;
    ForestParams forest;          // coverage predictor
    ForestParams traffic_forest;  // traffic predictor (see ctor below)
    SteeringConfig steering;
    TrajectoryGenConfig trajectories;
    MiningParams mining;
    size_t k_routes = 3;

    // The first-packet feature set is small and weakly informative, so the
    // traffic forest uses many shallow, heavily randomized trees: the ensemble
    // average keeps the ranking sharp while the per-flow probabilities stay
    // smoothed rather than saturating at 0 or 1.
    RunConfig() {
        traffic_forest.n_trees = 300;
        traffic_forest.max_depth = 3;
        traffic_forest.min_leaf = 40;
        traffic_forest.features_per_split = 1;
    }

    // Stage-scoped 64-bit seed.
    uint64_t stage_seed(std::string_view stage) const;

    static RunConfig from_json(const nlohmann::json& j);  // throws ConfigError with field path
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    // FNV-1a over the canonical JSON dump; embedded in every manifest.
    std::string hash() const;
};

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const RunConfig& cfg, const nlohmann::json& extra);

}  // namespace steersim
