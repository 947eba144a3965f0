#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "steersim/mlcore.hpp"

namespace steersim {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) to (1,1), rates nondecreasing
    double auc = 0.0;              // trapezoidal integral of the points
};

// Sweeps all distinct score values descending; tied scores collapse into one
// threshold step, which makes the trapezoid AUC equal to the Mann-Whitney
// statistic with 0.5 credit for ties.
RocCurve roc_curve(std::span<const double> scores, std::span<const uint8_t> labels);

// Independent oracle: fraction of (positive, negative) pairs ordered
// correctly, ties counted 0.5.
double auc_pairwise_oracle(std::span<const double> scores, std::span<const uint8_t> labels);

// Stratified shuffle split, deterministic per seed. Throws if either class is
// too small to appear in both parts.
void split_dataset(const Dataset& data, double test_fraction, uint64_t seed, Dataset& train,
                   Dataset& test);

// "fpr,tpr,threshold" rows plus a trailing "# auc=<value>" comment line.
void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path);

}  // namespace steersim
