#include "steersim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "steersim/rng.hpp"

namespace steersim {

RocCurve roc_curve(std::span<const double> scores, std::span<const uint8_t> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_curve: scores/labels length mismatch");
    if (scores.empty()) throw std::invalid_argument("roc_curve: empty input");
    size_t n = scores.size();
    size_t npos = 0;
    for (uint8_t l : labels) npos += l != 0;
    size_t nneg = n - npos;
    if (npos == 0 || nneg == 0)
        throw std::invalid_argument("roc_curve: both classes must be present");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    size_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < n) {
        double s = scores[order[i]];
        while (i < n && scores[order[i]] == s) {
            if (labels[order[i]] != 0)
                ++tp;
            else
                ++fp;
            ++i;
        }
        roc.points.push_back({static_cast<double>(fp) / nneg, static_cast<double>(tp) / npos, s});
    }

    double auc = 0.0;
    for (size_t k = 1; k < roc.points.size(); ++k) {
        const auto& a = roc.points[k - 1];
        const auto& b = roc.points[k];
        auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    roc.auc = auc;
    return roc;
}

double auc_pairwise_oracle(std::span<const double> scores, std::span<const uint8_t> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc_pairwise_oracle: length mismatch");
    std::vector<double> pos, neg;
    for (size_t i = 0; i < scores.size(); ++i)
        (labels[i] != 0 ? pos : neg).push_back(scores[i]);
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("auc_pairwise_oracle: both classes must be present");
    double credit = 0.0;
    for (double p : pos)
        for (double q : neg) {
            if (p > q)
                credit += 1.0;
            else if (p == q)
                credit += 0.5;
        }
    return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

void split_dataset(const Dataset& data, double test_fraction, uint64_t seed, Dataset& train,
                   Dataset& test) {
    data.validate();
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw std::invalid_argument("split: test_fraction must be in (0,1)");
    std::vector<uint32_t> pos, neg;
    for (uint32_t i = 0; i < data.size(); ++i)
        (data.labels[i] != 0 ? pos : neg).push_back(i);

    Rng rng = Rng(seed).derive("split");
    auto shuffle = [&](std::vector<uint32_t>& v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.uniform_int(i)]);
    };
    shuffle(pos);
    shuffle(neg);

    auto take = [&](const std::vector<uint32_t>& v, const char* cls) {
        size_t n_test = static_cast<size_t>(std::llround(test_fraction * v.size()));
        if (n_test == 0 || n_test == v.size())
            throw std::invalid_argument(std::string("split: class '") + cls +
                                        "' too small to stratify");
        return n_test;
    };
    size_t pos_test = take(pos, "positive");
    size_t neg_test = take(neg, "negative");

    train = Dataset{};
    test = Dataset{};
    auto emit = [&](const std::vector<uint32_t>& v, size_t n_test) {
        for (size_t i = 0; i < v.size(); ++i) {
            Dataset& dst = i < n_test ? test : train;
            dst.features.push_back(data.features[v[i]]);
            dst.labels.push_back(data.labels[v[i]]);
        }
    };
    emit(pos, pos_test);
    emit(neg, neg_test);
}

void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << "fpr,tpr,threshold\n";
    char buf[128];
    for (const auto& p : roc.points) {
        if (std::isinf(p.threshold))
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,inf\n", p.fpr, p.tpr);
        else
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.fpr, p.tpr, p.threshold);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "# auc=%.9f\n", roc.auc);
    out << buf;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace steersim
