#include "steersim/config.hpp"

#include <fstream>

namespace steersim {

using nlohmann::json;

namespace {

// typed fetch with a path-qualified error
template <typename T>
void get_if(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config field " + path + "." + key + ": wrong type");
    }
}

std::vector<CellSite> get_cells(const json& j, const std::string& path, const char* key,
                                std::vector<CellSite> fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<CellSite> out;
    for (const auto& jc : j.at(key)) {
        if (!jc.is_array() || jc.size() != 2)
            throw ConfigError("config field " + path + "." + key + ": expected [x,y] pairs");
        out.push_back({jc.at(0).get<double>(), jc.at(1).get<double>()});
    }
    return out;
}

CombineRule parse_combine(const std::string& s) {
    if (s == "product") return CombineRule::Product;
    if (s == "min") return CombineRule::Min;
    if (s == "weighted_sum") return CombineRule::WeightedSum;
    throw ConfigError("config field steering.combine: unknown rule '" + s + "'");
}

std::string combine_name(CombineRule r) {
    switch (r) {
        case CombineRule::Product: return "product";
        case CombineRule::Min: return "min";
        case CombineRule::WeightedSum: return "weighted_sum";
    }
    return "?";
}

}  // namespace

uint64_t RunConfig::stage_seed(std::string_view stage) const {
    return Rng(seed).derive(stage).state();
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    get_if(j, "", "seed", cfg.seed);

    if (j.contains("env")) {
        const json& je = j.at("env");
        auto& e = cfg.env;
        get_if(je, "env", "area_size", e.area_size);
        e.primary_cells = get_cells(je, "env", "primary_cells", e.primary_cells);
        e.secondary_cells = get_cells(je, "env", "secondary_cells", e.secondary_cells);
        get_if(je, "env", "tx_power_primary_dbm", e.tx_power_primary_dbm);
        get_if(je, "env", "tx_power_secondary_dbm", e.tx_power_secondary_dbm);
        get_if(je, "env", "pl0_primary_db", e.pl0_primary_db);
        get_if(je, "env", "pl0_secondary_db", e.pl0_secondary_db);
        get_if(je, "env", "pathloss_exponent_primary", e.pathloss_exponent_primary);
        get_if(je, "env", "pathloss_exponent_secondary", e.pathloss_exponent_secondary);
        get_if(je, "env", "ref_distance_m", e.ref_distance_m);
        get_if(je, "env", "shadow_sigma_db", e.shadow_sigma_db);
        get_if(je, "env", "shadow_correlation", e.shadow_correlation);
        get_if(je, "env", "target_secondary_coverage", e.target_secondary_coverage);
        get_if(je, "env", "hotspot_fraction", e.hotspot_fraction);
        get_if(je, "env", "hotspot_sigma_m", e.hotspot_sigma_m);
        try {
            e.validate();
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("config field ") + ex.what());
        }
    }

    if (j.contains("flows")) {
        const json& jf = j.at("flows");
        get_if(jf, "flows", "n", cfg.n_flows);
        get_if(jf, "flows", "planted_signal", cfg.flowgen.planted_signal);
        get_if(jf, "flows", "first_size_noise", cfg.flowgen.first_size_noise);
        get_if(jf, "flows", "max_volume", cfg.flowgen.max_volume);
    }

    if (j.contains("radio")) get_if(j.at("radio"), "radio", "n", cfg.n_radio_samples);

    auto read_forest = [&j](const char* key, ForestParams& p) {
        if (!j.contains(key)) return;
        const json& jf = j.at(key);
        get_if(jf, key, "n_trees", p.n_trees);
        get_if(jf, key, "max_depth", p.max_depth);
        get_if(jf, key, "min_leaf", p.min_leaf);
        get_if(jf, key, "features_per_split", p.features_per_split);
        get_if(jf, key, "bootstrap", p.bootstrap);
        if (p.n_trees < 1)
            throw ConfigError(std::string("config field ") + key + ".n_trees: must be >= 1");
        if (p.max_depth < 1)
            throw ConfigError(std::string("config field ") + key + ".max_depth: must be >= 1");
    };
    read_forest("forest", cfg.forest);
    read_forest("traffic_forest", cfg.traffic_forest);

    if (j.contains("steering")) {
        const json& js = j.at("steering");
        auto& s = cfg.steering;
        get_if(js, "steering", "fractions", s.fractions);
        get_if(js, "steering", "replications", s.replications);
        get_if(js, "steering", "n_devices", s.n_devices);
        get_if(js, "steering", "include_oracle", s.include_oracle);
        get_if(js, "steering", "combine_weight", s.combine_weight);
        if (js.contains("combine"))
            s.combine = parse_combine(js.at("combine").get<std::string>());
        for (double f : s.fractions)
            if (f <= 0.0 || f > 1.0)
                throw ConfigError("config field steering.fractions: values must be in (0,1]");
        if (s.replications < 1)
            throw ConfigError("config field steering.replications: must be >= 1");
        if (s.n_devices < 1) throw ConfigError("config field steering.n_devices: must be >= 1");
    }

    if (j.contains("trajectories")) {
        const json& jt = j.at("trajectories");
        auto& t = cfg.trajectories;
        get_if(jt, "trajectories", "routes", t.routes);
        get_if(jt, "trajectories", "devices_per_route", t.devices_per_route);
        get_if(jt, "trajectories", "samples_per_trajectory", t.samples_per_trajectory);
        get_if(jt, "trajectories", "speed_mps", t.speed_mps);
        get_if(jt, "trajectories", "lateral_jitter_m", t.lateral_jitter_m);
        get_if(jt, "trajectories", "sample_period_s", t.sample_period_s);
        if (t.routes < 1) throw ConfigError("config field trajectories.routes: must be >= 1");
        if (t.sample_period_s <= 0.0)
            throw ConfigError("config field trajectories.sample_period_s: must be > 0");
    }

    if (j.contains("mobility")) {
        const json& jm = j.at("mobility");
        get_if(jm, "mobility", "k_routes", cfg.k_routes);
        get_if(jm, "mobility", "resample_steps", cfg.mining.resample_steps);
        get_if(jm, "mobility", "detection_floor_dbm", cfg.mining.detection_floor_dbm);
        get_if(jm, "mobility", "impute_floor_dbm", cfg.mining.impute_floor_dbm);
        get_if(jm, "mobility", "max_iterations", cfg.mining.max_iterations);
        if (cfg.k_routes < 1) throw ConfigError("config field mobility.k_routes: must be >= 1");
        if (cfg.mining.resample_steps < 2)
            throw ConfigError("config field mobility.resample_steps: must be >= 2");
    }

    cfg.env.seed = cfg.stage_seed("env");
    cfg.flowgen.seed = cfg.stage_seed("flows");
    cfg.forest.seed = cfg.stage_seed("forest");
    cfg.traffic_forest.seed = cfg.stage_seed("traffic-forest");
    cfg.steering.seed = cfg.stage_seed("steering");
    cfg.mining.seed = cfg.stage_seed("mobility");
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

json RunConfig::to_json() const {
    auto cells = [](const std::vector<CellSite>& v) {
        json out = json::array();
        for (const auto& c : v) out.push_back({c.x, c.y});
        return out;
    };
    return json{
        {"seed", seed},
        {"env",
         {{"area_size", env.area_size},
          {"primary_cells", cells(env.primary_cells)},
          {"secondary_cells", cells(env.secondary_cells)},
          {"tx_power_primary_dbm", env.tx_power_primary_dbm},
          {"tx_power_secondary_dbm", env.tx_power_secondary_dbm},
          {"pl0_primary_db", env.pl0_primary_db},
          {"pl0_secondary_db", env.pl0_secondary_db},
          {"pathloss_exponent_primary", env.pathloss_exponent_primary},
          {"pathloss_exponent_secondary", env.pathloss_exponent_secondary},
          {"ref_distance_m", env.ref_distance_m},
          {"shadow_sigma_db", env.shadow_sigma_db},
          {"shadow_correlation", env.shadow_correlation},
          {"target_secondary_coverage", env.target_secondary_coverage},
          {"hotspot_fraction", env.hotspot_fraction},
          {"hotspot_sigma_m", env.hotspot_sigma_m}}},
        {"flows",
         {{"n", n_flows},
          {"planted_signal", flowgen.planted_signal},
          {"first_size_noise", flowgen.first_size_noise},
          {"max_volume", flowgen.max_volume}}},
        {"radio", {{"n", n_radio_samples}}},
        {"forest",
         {{"n_trees", forest.n_trees},
          {"max_depth", forest.max_depth},
          {"min_leaf", forest.min_leaf},
          {"features_per_split", forest.features_per_split},
          {"bootstrap", forest.bootstrap}}},
        {"traffic_forest",
         {{"n_trees", traffic_forest.n_trees},
          {"max_depth", traffic_forest.max_depth},
          {"min_leaf", traffic_forest.min_leaf},
          {"features_per_split", traffic_forest.features_per_split},
          {"bootstrap", traffic_forest.bootstrap}}},
        {"steering",
         {{"fractions", steering.fractions},
          {"replications", steering.replications},
          {"n_devices", steering.n_devices},
          {"combine", combine_name(steering.combine)},
          {"combine_weight", steering.combine_weight},
          {"include_oracle", steering.include_oracle}}},
        {"trajectories",
         {{"routes", trajectories.routes},
          {"devices_per_route", trajectories.devices_per_route},
          {"samples_per_trajectory", trajectories.samples_per_trajectory},
          {"speed_mps", trajectories.speed_mps},
          {"lateral_jitter_m", trajectories.lateral_jitter_m},
          {"sample_period_s", trajectories.sample_period_s}}},
        {"mobility",
         {{"k_routes", k_routes},
          {"resample_steps", mining.resample_steps},
          {"detection_floor_dbm", mining.detection_floor_dbm},
          {"impute_floor_dbm", mining.impute_floor_dbm},
          {"max_iterations", mining.max_iterations}}}};
}

std::string RunConfig::hash() const {
    std::string dump = to_json().dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : dump) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const RunConfig& cfg, const json& extra) {
    json m{{"command", command}, {"config_hash", cfg.hash()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream out(out_dir / (command + "_manifest.json"));
    if (!out) throw std::runtime_error("cannot write manifest for " + command);
    out << m.dump(2) << '\n';
}

}  // namespace steersim
