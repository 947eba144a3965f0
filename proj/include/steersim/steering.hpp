#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "steersim/flowgen.hpp"
#include "steersim/predictors.hpp"
#include "steersim/radioenv.hpp"

namespace steersim {

enum class Strategy { Random, Coverage, Traffic, CoverageTraffic, Oracle };

inline constexpr std::array<Strategy, 4> kReportedStrategies = {
    Strategy::Random, Strategy::Coverage, Strategy::Traffic, Strategy::CoverageTraffic};

std::string strategy_name(Strategy s);

enum class CombineRule { Product, Min, WeightedSum };

struct ScenarioDevice {
    uint64_t device_id = 0;
    RadioSample radio;  // ground truth coverage
    FlowRecord flow;
};

struct Scenario {
    std::vector<ScenarioDevice> devices;
};

// Fresh device + flow draw; deterministic per (seed, replication).
Scenario draw_scenario(const RadioEnv& env, const FlowGenConfig& flowgen, size_t n_devices,
                       uint64_t seed, uint64_t replication);

struct SteeringConfig {
    std::vector<double> fractions = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    size_t replications = 50;
    size_t n_devices = 100;
    CombineRule combine = CombineRule::Product;
    double combine_weight = 0.5;  // WeightedSum only
    bool include_oracle = false;
    uint64_t seed = 1;
};

// Per-device selection scores; higher is selected first.
std::vector<double> score_devices(const Scenario& scenario, Strategy strategy,
                                  const TrafficPredictor* traffic,
                                  const CoveragePredictor* coverage, CombineRule rule,
                                  double combine_weight, Rng& random_stream);

struct CurvePoint {
    double fraction = 0.0;
    double offloaded_mean = 0.0;
    double offloaded_std = 0.0;
    double unnecessary_mean = 0.0;
};

struct SteeringCurve {
    Strategy strategy = Strategy::Random;
    std::vector<CurvePoint> points;
    size_t replications = 0;
    // raw per-replication offloaded volume, [fraction][replication]
    std::vector<std::vector<double>> offloaded_raw;
    std::vector<std::vector<double>> unnecessary_raw;
};

struct SteeringResult {
    std::vector<SteeringCurve> curves;  // reported strategies, then Oracle if enabled
};

SteeringResult run_steering(const RadioEnv& env, const FlowGenConfig& flowgen,
                            const TrafficPredictor& traffic, const CoveragePredictor& coverage,
                            const SteeringConfig& cfg);

// Unnecessary-measurement rate per strategy and fraction.
struct SavingsRow {
    Strategy strategy;
    std::vector<double> unnecessary_rate;  // one per fraction
};

std::vector<SavingsRow> measurement_savings(const SteeringResult& result);

// "strategy,fraction,offloaded_bytes_mean,offloaded_bytes_std,unnecessary_rate_mean"
void write_steering_csv(const SteeringResult& result, const std::filesystem::path& path);
// Offloaded volume vs fraction, log-scale y.
void write_steering_svg(const SteeringResult& result, const std::filesystem::path& path);

}  // namespace steersim
