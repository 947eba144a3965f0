#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "steersim/rng.hpp"

namespace steersim {

struct CellSite {
    double x = 0.0;
    double y = 0.0;
};

// Two-carrier synthetic radio environment. Log-distance path loss with
// correlated log-normal shadowing between the carriers; the secondary
// coverage threshold is calibrated to hit a target coverage fraction.
struct EnvConfig {
    double area_size = 1000.0;  // square side, meters
    std::vector<CellSite> primary_cells;
    std::vector<CellSite> secondary_cells;
    double tx_power_primary_dbm = 30.0;
    double tx_power_secondary_dbm = 40.0;
    double pl0_primary_db = 38.0;
    double pl0_secondary_db = 61.0;
    double pathloss_exponent_primary = 3.0;
    double pathloss_exponent_secondary = 3.4;
    double ref_distance_m = 1.0;
    double shadow_sigma_db = 6.0;
    double shadow_correlation = 0.8;  // rho between the two carriers
    double target_secondary_coverage = 0.22;
    // Device placement: a fraction of devices cluster at hotspots around the
    // secondary sites (where the extra carrier gets deployed in the first
    // place); the rest are uniform over the area.
    double hotspot_fraction = 0.18;
    double hotspot_sigma_m = 25.0;
    uint64_t seed = 1;

    static EnvConfig defaults();
    void validate() const;  // throws std::invalid_argument naming the field
};

struct RadioSample {
    uint64_t device_id = 0;
    // generator-internal ground truth; never exposed to predictors
    double x = 0.0;
    double y = 0.0;
    std::vector<double> primary_rsrp;  // dBm, one per primary cell
    double secondary_rsrp = 0.0;       // dBm, best secondary cell
    bool covered = false;

    size_t serving_cell() const;  // index of strongest primary cell
};

struct TrajectoryPoint {
    double t = 0.0;  // seconds
    RadioSample fp;
};

struct Trajectory {
    uint64_t device_id = 0;
    uint32_t route_id = 0;
    std::vector<TrajectoryPoint> samples;
};

struct TrajectoryGenConfig {
    size_t routes = 3;
    size_t devices_per_route = 20;
    size_t samples_per_trajectory = 20;
    double speed_mps = 12.0;
    double lateral_jitter_m = 10.0;
    double sample_period_s = 10.0;
    bool shadowing = true;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Empirical (1 - target)-quantile so that the covered fraction equals the
// target within 1/n. Throws on empty or degenerate all-equal input.
double calibrate_threshold(std::span<const double> secondary_rsrp, double target_fraction);

class RadioEnv {
public:
    // Calibrates the coverage threshold on n_calibration fresh samples.
    explicit RadioEnv(EnvConfig cfg, size_t n_calibration = 10000);
    // Uses a precomputed threshold (e.g. loaded from a trained predictor).
    RadioEnv(EnvConfig cfg, double threshold_dbm);

    const EnvConfig& config() const { return cfg_; }
    double coverage_threshold_dbm() const { return threshold_dbm_; }

    // Deterministic per (cfg.seed, stream, device index); shadowing optional.
    std::vector<RadioSample> gen_samples(size_t n_devices, uint64_t stream = 0,
                                         bool shadowing = true) const;
    RadioSample sample_at(double x, double y, double shadow_primary_db,
                          double shadow_secondary_db) const;

    std::vector<Trajectory> gen_trajectories(const TrajectoryGenConfig& tcfg,
                                             uint64_t stream = 0) const;

    // Route polyline for ground-truth checks; deterministic per config seed.
    std::vector<CellSite> route_polyline(uint32_t route_id) const;

private:
    RadioSample sample_device(uint64_t device_id, uint64_t stream, bool shadowing) const;

    EnvConfig cfg_;
    double threshold_dbm_ = 0.0;
};

void write_radio_samples(std::span<const RadioSample> samples,
                         const std::filesystem::path& path);
std::vector<RadioSample> read_radio_samples(const std::filesystem::path& path);
void write_trajectories(std::span<const Trajectory> trajs, const std::filesystem::path& path);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

}  // namespace steersim
