#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "steersim/flowdata.hpp"
#include "steersim/mlcore.hpp"
#include "steersim/radioenv.hpp"

namespace steersim {

inline constexpr uint32_t kFlowSchemaId = 1001;
inline constexpr size_t kTopPorts = 16;

// First-packet flow features. The API deliberately accepts only the flow key
// and the first packet, so nothing downstream of the first packet (volume,
// service_class, later packets) can leak into the encoding.
//
// Layout: [src_port, dst_port, dst_port<1024, protocol,
//          16 top-port indicators,
//          8 src/16, 8 src/24, 8 dst/16, 8 dst/24 hash-bucket one-hots,
//          first_packet_size, direction]
class FlowFeatureEncoder {
public:
    // Learns the 16 most frequent destination ports of the training corpus.
    static FlowFeatureEncoder fit(std::span<const FlowRecord> training_flows);

    FeatureVector encode(const FlowKey& key, const PacketMeta& first_packet) const;

    static constexpr size_t dim() { return 4 + kTopPorts + 32 + 2; }
    const std::vector<uint16_t>& top_ports() const { return top_ports_; }

    nlohmann::json to_json() const;
    static FlowFeatureEncoder from_json(const nlohmann::json& j);

private:
    std::vector<uint16_t> top_ports_;
};

inline uint32_t radio_schema_id(size_t n_primary_cells) {
    return 2000 + static_cast<uint32_t>(n_primary_cells);
}

// Primary-carrier-only radio features: RSRPs sorted descending, the margin
// between the two strongest, and a one-hot of the strongest cell. Position,
// secondary RSRP and the coverage label never enter.
FeatureVector encode_radio_features(const RadioSample& sample);

}  // namespace steersim
