#include "steersim/features.hpp"

#include <algorithm>
#include <map>

namespace steersim {

namespace {

uint64_t fnv1a64(uint64_t v) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void one_hot_bucket(std::vector<double>& out, uint32_t prefix) {
    size_t bucket = fnv1a64(prefix) % 8;
    for (size_t i = 0; i < 8; ++i) out.push_back(i == bucket ? 1.0 : 0.0);
}

}  // namespace

FlowFeatureEncoder FlowFeatureEncoder::fit(std::span<const FlowRecord> training_flows) {
    std::map<uint16_t, size_t> counts;
    for (const auto& f : training_flows) ++counts[f.key.dst_port];
    std::vector<std::pair<uint16_t, size_t>> by_freq(counts.begin(), counts.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    FlowFeatureEncoder enc;
    for (size_t i = 0; i < std::min(kTopPorts, by_freq.size()); ++i)
        enc.top_ports_.push_back(by_freq[i].first);
    return enc;
}

FeatureVector FlowFeatureEncoder::encode(const FlowKey& key,
                                         const PacketMeta& first_packet) const {
    FeatureVector v;
    v.schema_id = kFlowSchemaId;
    auto& out = v.values;
    out.reserve(dim());
    out.push_back(key.src_port);
    out.push_back(key.dst_port);
    out.push_back(key.dst_port < 1024 ? 1.0 : 0.0);
    out.push_back(key.protocol);
    for (size_t i = 0; i < kTopPorts; ++i)
        out.push_back(i < top_ports_.size() && key.dst_port == top_ports_[i] ? 1.0 : 0.0);
    one_hot_bucket(out, key.src_addr >> 16);
    one_hot_bucket(out, key.src_addr >> 8);
    one_hot_bucket(out, key.dst_addr >> 16);
    one_hot_bucket(out, key.dst_addr >> 8);
    out.push_back(static_cast<double>(first_packet.size));
    out.push_back(first_packet.dir == Direction::Uplink ? 1.0 : 0.0);
    return v;
}

nlohmann::json FlowFeatureEncoder::to_json() const {
    return nlohmann::json{{"top_ports", top_ports_}};
}

FlowFeatureEncoder FlowFeatureEncoder::from_json(const nlohmann::json& j) {
    FlowFeatureEncoder enc;
    enc.top_ports_ = j.at("top_ports").get<std::vector<uint16_t>>();
    if (enc.top_ports_.size() > kTopPorts)
        throw std::runtime_error("flow encoder: too many top ports");
    return enc;
}

FeatureVector encode_radio_features(const RadioSample& sample) {
    size_t n = sample.primary_rsrp.size();
    FeatureVector v;
    v.schema_id = radio_schema_id(n);
    auto& out = v.values;
    out.reserve(2 * n + 1);
    std::vector<double> sorted = sample.primary_rsrp;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    for (double r : sorted) out.push_back(r);
    out.push_back(n > 1 ? sorted[0] - sorted[1] : 0.0);
    size_t strongest = sample.serving_cell();
    for (size_t i = 0; i < n; ++i) out.push_back(i == strongest ? 1.0 : 0.0);
    return v;
}

}  // namespace steersim
