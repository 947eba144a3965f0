#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "steersim/radioenv.hpp"

namespace steersim {

// Radio-domain fingerprint: per-cell RSRP for the detected cells only.
// Cells below the detection floor are simply absent.
struct Fingerprint {
    std::map<uint32_t, double> values;  // cell id -> RSRP dBm
};

Fingerprint fingerprint_from_sample(const RadioSample& s, double detection_floor_dbm = -110.0);

struct MiningParams {
    size_t resample_steps = 20;
    double detection_floor_dbm = -110.0;
    double impute_floor_dbm = -140.0;  // missing-cell value in Euclidean space
    size_t max_iterations = 100;
    size_t restarts = 10;  // k-means restarts, best inertia kept
    uint64_t seed = 0;
};

struct RouteTemplate {
    // [step][cell-dimension], dense over TrajectoryModel::cell_ids
    std::vector<std::vector<double>> centroid;
    std::vector<uint32_t> serving_cells;                 // modal serving cell per step
    std::vector<std::map<uint32_t, double>> serving_dist;  // member fraction per cell, per step
    std::vector<double> coverage_prob;                   // mean member coverage per step
    size_t member_count = 0;
};

struct TrajectoryModel {
    std::vector<uint32_t> cell_ids;  // dense dimension order
    size_t steps = 0;
    double impute_floor_dbm = -140.0;
    std::vector<RouteTemplate> routes;

    nlohmann::json to_json() const;
    static TrajectoryModel from_json(const nlohmann::json& j);
};

// k-means (k-means++ init, seeded, iteration-capped) on trajectories
// resampled to a fixed step count and flattened to one vector per device.
TrajectoryModel mine_trajectories(std::span<const Trajectory> trajectories, size_t k_routes,
                                  const MiningParams& params);

// Cluster assignment for each input trajectory, in input order; computed the
// same way mining assigns members.
std::vector<size_t> assign_routes(const TrajectoryModel& model,
                                  std::span<const Trajectory> trajectories,
                                  const MiningParams& params);

struct RouteMatch {
    uint32_t route_id = 0;
    double distance = 0.0;  // mean per-step Euclidean distance, best window
    double score = 0.0;     // softmax of negative distances
};

// Ranked best-window match of an observed prefix against every template.
// Throws if the prefix is empty or longer than every template.
std::vector<RouteMatch> match_trajectory(const TrajectoryModel& model,
                                         std::span<const Fingerprint> observed_prefix);

// Template coverage probabilities for steps current_step+1 .. current_step+horizon.
std::vector<double> predict_coverage_ahead(const TrajectoryModel& model, uint32_t route_id,
                                           size_t current_step, size_t horizon_steps);

enum class Dynamics { Static, Slow, Fast };

// RMS per-dimension fingerprint change per step, classified against two
// thresholds; a displacement exactly at a threshold falls in the lower class.
Dynamics estimate_dynamics(std::span<const Fingerprint> observed_prefix,
                           double static_threshold_db = 0.5, double fast_threshold_db = 3.0);

struct HandoverPrediction {
    struct Candidate {
        uint32_t cell = 0;
        double score = 0.0;
    };
    std::vector<Candidate> candidates;          // ranked by first appearance
    std::optional<size_t> steps_to_handover;    // empty: no handover within horizon
};

HandoverPrediction predict_handover(const TrajectoryModel& model, uint32_t route_id,
                                    size_t current_step, size_t horizon_steps);

struct MobilityReport {
    double cluster_route_agreement = 0.0;  // training trajectories vs route_id ground truth
    double prefix_top1_accuracy = 0.0;     // half-prefix route matching on held-out devices
    double handover_step_accuracy = 0.0;   // predicted step within +-1 of ground truth
    size_t n_heldout = 0;
};

// Scores a mined model against generator ground truth. Clusters are mapped to
// routes by majority vote over the training set.
MobilityReport evaluate_mobility(const TrajectoryModel& model,
                                 std::span<const Trajectory> training,
                                 std::span<const Trajectory> heldout,
                                 const MiningParams& params);

}  // namespace steersim
