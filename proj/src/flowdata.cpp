#include "steersim/flowdata.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace steersim {

using nlohmann::json;

uint64_t FlowRecord::total_volume() const {
    uint64_t v = 0;
    for (const auto& p : packets) v += p.size;
    return v;
}

double FlowRecord::duration() const {
    double d = 0.0;
    for (const auto& p : packets) d = std::max(d, p.arrival_time);
    return d;
}

void FlowRecord::validate() const {
    if (packets.empty())
        throw InvariantError("flow " + std::to_string(flow_id) + ": packets empty");
    if (packets.front().arrival_time != 0.0)
        throw InvariantError("flow " + std::to_string(flow_id) +
                             ": first packet arrival_time must be 0");
    double prev = 0.0;
    for (size_t i = 0; i < packets.size(); ++i) {
        const auto& p = packets[i];
        if (p.arrival_time < prev)
            throw InvariantError("flow " + std::to_string(flow_id) +
                                 ": arrival_time decreasing at packet " + std::to_string(i));
        if (p.size < 1)
            throw InvariantError("flow " + std::to_string(flow_id) + ": size < 1 at packet " +
                                 std::to_string(i));
        prev = p.arrival_time;
    }
}

VolumeLabel label_flow(const FlowRecord& flow) {
    uint64_t v = flow.total_volume();
    return VolumeLabel{v > kVolumeThresholds[0], v > kVolumeThresholds[1],
                       v > kVolumeThresholds[2]};
}

std::string format_addr(uint32_t addr) {
    std::ostringstream os;
    os << ((addr >> 24) & 0xff) << '.' << ((addr >> 16) & 0xff) << '.' << ((addr >> 8) & 0xff)
       << '.' << (addr & 0xff);
    return os.str();
}

uint32_t parse_addr(const std::string& s) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(s.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4 || a > 255 ||
        b > 255 || c > 255 || d > 255)
        throw ParseError("bad address: " + s);
    return (a << 24) | (b << 16) | (c << 8) | d;
}

namespace {

json flow_to_json(const FlowRecord& f) {
    json pkts = json::array();
    for (const auto& p : f.packets) {
        pkts.push_back({{"t", p.arrival_time},
                        {"size", p.size},
                        {"dir", p.dir == Direction::Uplink ? "ul" : "dl"}});
    }
    return json{{"flow_id", f.flow_id},
                {"src_addr", format_addr(f.key.src_addr)},
                {"dst_addr", format_addr(f.key.dst_addr)},
                {"src_port", f.key.src_port},
                {"dst_port", f.key.dst_port},
                {"protocol", f.key.protocol},
                {"service_class", f.service_class},
                {"packets", pkts}};
}

FlowRecord flow_from_json(const json& j) {
    FlowRecord f;
    f.flow_id = j.at("flow_id").get<uint64_t>();
    f.key.src_addr = parse_addr(j.at("src_addr").get<std::string>());
    f.key.dst_addr = parse_addr(j.at("dst_addr").get<std::string>());
    int sp = j.at("src_port").get<int>();
    int dp = j.at("dst_port").get<int>();
    int proto = j.at("protocol").get<int>();
    if (sp < 0 || sp > 65535) throw InvariantError("src_port out of range");
    if (dp < 0 || dp > 65535) throw InvariantError("dst_port out of range");
    if (proto < 0 || proto > 255) throw InvariantError("protocol out of range");
    f.key.src_port = static_cast<uint16_t>(sp);
    f.key.dst_port = static_cast<uint16_t>(dp);
    f.key.protocol = static_cast<uint8_t>(proto);
    f.service_class = j.at("service_class").get<int>();
    for (const auto& jp : j.at("packets")) {
        PacketMeta p;
        p.arrival_time = jp.at("t").get<double>();
        p.size = jp.at("size").get<uint64_t>();
        std::string dir = jp.at("dir").get<std::string>();
        if (dir == "ul")
            p.dir = Direction::Uplink;
        else if (dir == "dl")
            p.dir = Direction::Downlink;
        else
            throw InvariantError("bad packet dir: " + dir);
        f.packets.push_back(p);
    }
    f.validate();
    return f;
}

}  // namespace

std::vector<FlowRecord> read_flows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<FlowRecord> flows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            flows.push_back(flow_from_json(json::parse(line)));
        } catch (const InvariantError& e) {
            throw InvariantError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return flows;
}

void write_flows(std::span<const FlowRecord> flows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    for (const auto& f : flows) {
        f.validate();
        out << flow_to_json(f).dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace steersim
