#pragma once

#include <cstdint>
#include <vector>

#include "steersim/flowdata.hpp"

namespace steersim {

// Synthetic flow corpus: a lognormal body, a lognormal "download" class that
// straddles the 10 kB threshold, and a rare Pareto-tailed elephant class. The
// mixture is calibrated so P(total_volume > 10 kB) = 0.125. In planted mode
// the destination port / address prefix identify the service class and the
// first-packet size tracks log volume; in signal-free mode all first-packet
// metadata is independent of the volume.
struct FlowClassConfig {
    double weight;
    // lognormal when pareto_alpha == 0, otherwise Pareto(pareto_xm, pareto_alpha)
    double log_mu = 0.0;
    double log_sigma = 0.0;
    double pareto_xm = 0.0;
    double pareto_alpha = 0.0;
    std::vector<uint16_t> ports;
    std::vector<uint16_t> dst_prefixes;  // /16 prefixes, high 16 bits of dst_addr
};

struct FlowGenConfig {
    bool planted_signal = true;
    std::vector<FlowClassConfig> classes;  // empty -> defaults()
    double first_size_noise = 30.0;
    uint64_t max_volume = 100000000;  // truncates the Pareto tail
    uint64_t seed = 1;

    static std::vector<FlowClassConfig> default_classes();
    void validate() const;
};

std::vector<FlowRecord> gen_flows(const FlowGenConfig& cfg, size_t n_flows);

// Single flow draw on an explicit per-device stream; used by the steering
// scenario generator so that results are independent of draw order.
FlowRecord gen_flow(const FlowGenConfig& cfg, uint64_t flow_id);

}  // namespace steersim
