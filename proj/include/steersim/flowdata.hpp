#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steersim {

struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Direction : uint8_t { Uplink, Downlink };

struct PacketMeta {
    double arrival_time = 0.0;  // seconds from flow start
    uint64_t size = 0;          // bytes
    Direction dir = Direction::Downlink;
};

struct FlowKey {
    uint32_t src_addr = 0;
    uint32_t dst_addr = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint8_t protocol = 6;  // 6=TCP, 17=UDP
};

struct FlowRecord {
    uint64_t flow_id = 0;
    FlowKey key;
    std::vector<PacketMeta> packets;
    // Used only by the synthetic generator to plant learnable structure.
    // Feature extraction must never see it.
    int service_class = 0;

    uint64_t total_volume() const;
    double duration() const;
    void validate() const;  // throws InvariantError
};

struct VolumeLabel {
    bool exceeds_1kB = false;
    bool exceeds_10kB = false;
    bool exceeds_100kB = false;
};

inline constexpr uint64_t kVolumeThresholds[3] = {1000, 10000, 100000};

VolumeLabel label_flow(const FlowRecord& flow);

std::string format_addr(uint32_t addr);
uint32_t parse_addr(const std::string& s);  // throws ParseError

std::vector<FlowRecord> read_flows(const std::filesystem::path& path);
void write_flows(std::span<const FlowRecord> flows, const std::filesystem::path& path);

}  // namespace steersim
