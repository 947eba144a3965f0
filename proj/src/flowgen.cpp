#include "steersim/flowgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steersim/rng.hpp"

namespace steersim {

std::vector<FlowClassConfig> FlowGenConfig::default_classes() {
    std::vector<FlowClassConfig> c(3);
    // body: web browsing, wide spread reaching past 10 kB
    c[0].weight = 0.726;
    c[0].log_mu = std::log(500.0);
    c[0].log_sigma = 1.7;
    c[0].ports = {443, 80, 53, 5223};
    c[0].dst_prefixes = {0x1710, 0x1711, 0x2f08};
    // mid: downloads straddling 10 kB
    c[1].weight = 0.270;
    c[1].log_mu = std::log(6500.0);
    c[1].log_sigma = 1.1;
    c[1].ports = {8080, 8443, 9000, 21};
    c[1].dst_prefixes = {0x2d20, 0x2d21, 0x3c14};
    // elephants: rare bulk transfers, Pareto tail
    c[2].weight = 0.004;
    c[2].pareto_xm = 3.0e6;
    c[2].pareto_alpha = 1.5;
    c[2].ports = {2049, 873};
    c[2].dst_prefixes = {0x5b00, 0x5b01};
    return c;
}

void FlowGenConfig::validate() const {
    const auto& cls = classes.empty() ? default_classes() : classes;
    double wsum = 0.0;
    for (const auto& c : cls) {
        if (c.weight <= 0.0) throw std::invalid_argument("flowgen: class weight must be > 0");
        if (c.ports.empty()) throw std::invalid_argument("flowgen: class needs ports");
        if (c.dst_prefixes.empty())
            throw std::invalid_argument("flowgen: class needs dst_prefixes");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-6)
        throw std::invalid_argument("flowgen: class weights must sum to 1");
}

namespace {

FlowRecord draw_flow(const FlowGenConfig& cfg, const std::vector<FlowClassConfig>& classes,
                     uint64_t flow_id, Rng& rng) {
    // class pick
    double u = rng.uniform();
    size_t ci = 0;
    double acc = 0.0;
    for (size_t i = 0; i < classes.size(); ++i) {
        acc += classes[i].weight;
        if (u < acc || i + 1 == classes.size()) {
            ci = i;
            break;
        }
    }
    const auto& cls = classes[ci];

    double vol = cls.pareto_alpha > 0.0 ? rng.pareto(cls.pareto_xm, cls.pareto_alpha)
                                        : rng.lognormal(cls.log_mu, cls.log_sigma);
    uint64_t volume = static_cast<uint64_t>(
        std::min(static_cast<double>(cfg.max_volume), std::max(64.0, std::round(vol))));

    FlowRecord f;
    f.flow_id = flow_id;
    f.service_class = static_cast<int>(ci);

    if (cfg.planted_signal) {
        f.key.dst_port = cls.ports[rng.uniform_int(cls.ports.size())];
        uint32_t prefix = cls.dst_prefixes[rng.uniform_int(cls.dst_prefixes.size())];
        f.key.dst_addr = (prefix << 16) | static_cast<uint32_t>(rng.uniform_int(65536));
    } else {
        f.key.dst_port = static_cast<uint16_t>(1 + rng.uniform_int(65535));
        f.key.dst_addr = static_cast<uint32_t>(rng.next_u64());
    }
    f.key.src_addr = 0x0a000000u | static_cast<uint32_t>(rng.uniform_int(1u << 24));
    f.key.src_port = static_cast<uint16_t>(20000 + rng.uniform_int(45000));
    f.key.protocol = f.key.dst_port == 53 ? 17 : 6;

    // first packet size tracks log volume in planted mode
    uint64_t first_size;
    if (cfg.planted_signal) {
        double s = 120.0 * (std::log10(static_cast<double>(volume)) - 2.0) +
                   rng.normal(0.0, cfg.first_size_noise);
        first_size = static_cast<uint64_t>(std::clamp(s, 40.0, 1500.0));
        first_size = std::min(first_size, volume);
    } else {
        // Diagnostic corpus: the first-packet size must carry no information
        // about the volume label, so grow tiny flows to fit the first packet
        // rather than clipping it (clipping would leak small volumes).
        first_size = 40 + rng.uniform_int(1461);
        volume = std::max(volume, first_size);
    }

    f.packets.push_back({0.0, first_size, Direction::Uplink});
    uint64_t rest = volume - first_size;
    if (rest > 0) {
        size_t n_rest = static_cast<size_t>(std::min<uint64_t>(199, rest / 1400 + 1));
        uint64_t base = rest / n_rest;
        uint64_t extra = rest % n_rest;
        double t = 0.0;
        for (size_t i = 0; i < n_rest; ++i) {
            t += rng.exponential(0.05);
            uint64_t sz = base + (i < extra ? 1 : 0);
            Direction d = (i % 10 == 9) ? Direction::Uplink : Direction::Downlink;
            f.packets.push_back({t, sz, d});
        }
    }
    return f;
}

}  // namespace

FlowRecord gen_flow(const FlowGenConfig& cfg, uint64_t flow_id) {
    cfg.validate();
    const auto classes = cfg.classes.empty() ? FlowGenConfig::default_classes() : cfg.classes;
    Rng rng = Rng(cfg.seed).derive("flow", flow_id);
    return draw_flow(cfg, classes, flow_id, rng);
}

std::vector<FlowRecord> gen_flows(const FlowGenConfig& cfg, size_t n_flows) {
    cfg.validate();
    const auto classes = cfg.classes.empty() ? FlowGenConfig::default_classes() : cfg.classes;
    std::vector<FlowRecord> out;
    out.reserve(n_flows);
    for (size_t i = 0; i < n_flows; ++i) {
        Rng rng = Rng(cfg.seed).derive("flow", i);
        out.push_back(draw_flow(cfg, classes, i, rng));
    }
    return out;
}

}  // namespace steersim
