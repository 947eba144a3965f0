#include "steersim/radioenv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace steersim {

using nlohmann::json;

namespace {
constexpr uint64_t kCalibrationStream = 0xca11b7a7e0000001ULL;
}

EnvConfig EnvConfig::defaults() {
    EnvConfig cfg;
    cfg.primary_cells.push_back({500.0, 500.0});
    for (int i = 0; i < 6; ++i) {
        double a = i * M_PI / 3.0;
        cfg.primary_cells.push_back({500.0 + 350.0 * std::cos(a), 500.0 + 350.0 * std::sin(a)});
    }
    // secondary carrier deployed on three of the primary sites
    cfg.secondary_cells = {cfg.primary_cells[1], cfg.primary_cells[3], cfg.primary_cells[5]};
    return cfg;
}

void EnvConfig::validate() const {
    if (area_size <= 0.0) throw std::invalid_argument("env.area_size must be > 0");
    if (primary_cells.empty()) throw std::invalid_argument("env.primary_cells must be nonempty");
    if (secondary_cells.empty())
        throw std::invalid_argument("env.secondary_cells must be nonempty");
    if (shadow_correlation < 0.0 || shadow_correlation > 1.0)
        throw std::invalid_argument("env.shadow_correlation must be in [0,1]");
    if (shadow_sigma_db < 0.0) throw std::invalid_argument("env.shadow_sigma_db must be >= 0");
    if (target_secondary_coverage <= 0.0 || target_secondary_coverage >= 1.0)
        throw std::invalid_argument("env.target_secondary_coverage must be in (0,1)");
    if (ref_distance_m <= 0.0) throw std::invalid_argument("env.ref_distance_m must be > 0");
    if (hotspot_fraction < 0.0 || hotspot_fraction > 1.0)
        throw std::invalid_argument("env.hotspot_fraction must be in [0,1]");
    if (hotspot_sigma_m < 0.0)
        throw std::invalid_argument("env.hotspot_sigma_m must be >= 0");
}

size_t RadioSample::serving_cell() const {
    return static_cast<size_t>(
        std::max_element(primary_rsrp.begin(), primary_rsrp.end()) - primary_rsrp.begin());
}

double calibrate_threshold(std::span<const double> secondary_rsrp, double target_fraction) {
    if (secondary_rsrp.empty()) throw CalibrationError("calibrate_threshold: empty input");
    if (target_fraction <= 0.0 || target_fraction >= 1.0)
        throw CalibrationError("calibrate_threshold: target_fraction must be in (0,1)");
    std::vector<double> sorted(secondary_rsrp.begin(), secondary_rsrp.end());
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    // k samples covered
    size_t k = static_cast<size_t>(std::clamp<long long>(
        std::llround(target_fraction * static_cast<double>(n)), 1, static_cast<long long>(n) - 1));
    size_t lo = n - k - 1;
    size_t hi = n - k;
    // degenerate plateaus: widen until the straddle is strict
    while (lo > 0 && sorted[lo] == sorted[hi]) --lo;
    while (hi + 1 < n && sorted[lo] == sorted[hi]) ++hi;
    if (sorted[lo] == sorted[hi])
        throw CalibrationError("calibrate_threshold: degenerate all-equal RSRP");
    return 0.5 * (sorted[lo] + sorted[hi]);
}

RadioEnv::RadioEnv(EnvConfig cfg, size_t n_calibration) : cfg_(std::move(cfg)) {
    cfg_.validate();
    threshold_dbm_ = -1e9;
    auto cal = gen_samples(n_calibration, kCalibrationStream);
    std::vector<double> rsrp;
    rsrp.reserve(cal.size());
    for (const auto& s : cal) rsrp.push_back(s.secondary_rsrp);
    threshold_dbm_ = calibrate_threshold(rsrp, cfg_.target_secondary_coverage);
}

RadioEnv::RadioEnv(EnvConfig cfg, double threshold_dbm)
    : cfg_(std::move(cfg)), threshold_dbm_(threshold_dbm) {
    cfg_.validate();
}

namespace {

double pathloss_db(double pl0, double exponent, double d, double d0) {
    return pl0 + 10.0 * exponent * std::log10(std::max(d, d0) / d0);
}

double dist(double x0, double y0, const CellSite& c) {
    return std::hypot(x0 - c.x, y0 - c.y);
}

}  // namespace

RadioSample RadioEnv::sample_at(double x, double y, double shadow_primary_db,
                                double shadow_secondary_db) const {
    RadioSample s;
    s.x = x;
    s.y = y;
    s.primary_rsrp.reserve(cfg_.primary_cells.size());
    for (const auto& c : cfg_.primary_cells) {
        double pl = pathloss_db(cfg_.pl0_primary_db, cfg_.pathloss_exponent_primary,
                                dist(x, y, c), cfg_.ref_distance_m);
        s.primary_rsrp.push_back(cfg_.tx_power_primary_dbm - pl + shadow_primary_db);
    }
    double best = -1e12;
    for (const auto& c : cfg_.secondary_cells) {
        double pl = pathloss_db(cfg_.pl0_secondary_db, cfg_.pathloss_exponent_secondary,
                                dist(x, y, c), cfg_.ref_distance_m);
        best = std::max(best, cfg_.tx_power_secondary_dbm - pl + shadow_secondary_db);
    }
    s.secondary_rsrp = best;
    s.covered = s.secondary_rsrp >= threshold_dbm_;
    return s;
}

RadioSample RadioEnv::sample_device(uint64_t device_id, uint64_t stream, bool shadowing) const {
    Rng rng = Rng(cfg_.seed).derive("radio-samples", stream).derive("device", device_id);
    double x, y;
    if (rng.uniform() < cfg_.hotspot_fraction) {
        const auto& site =
            cfg_.secondary_cells[rng.uniform_int(cfg_.secondary_cells.size())];
        x = std::clamp(site.x + rng.normal(0.0, cfg_.hotspot_sigma_m), 0.0, cfg_.area_size);
        y = std::clamp(site.y + rng.normal(0.0, cfg_.hotspot_sigma_m), 0.0, cfg_.area_size);
    } else {
        x = rng.uniform(0.0, cfg_.area_size);
        y = rng.uniform(0.0, cfg_.area_size);
    }
    double sp = 0.0, ss = 0.0;
    if (shadowing && cfg_.shadow_sigma_db > 0.0) {
        rng.normal_pair(cfg_.shadow_correlation, sp, ss);
        sp *= cfg_.shadow_sigma_db;
        ss *= cfg_.shadow_sigma_db;
    }
    RadioSample s = sample_at(x, y, sp, ss);
    s.device_id = device_id;
    return s;
}

std::vector<RadioSample> RadioEnv::gen_samples(size_t n_devices, uint64_t stream,
                                               bool shadowing) const {
    std::vector<RadioSample> out;
    out.reserve(n_devices);
    for (size_t i = 0; i < n_devices; ++i) out.push_back(sample_device(i, stream, shadowing));
    return out;
}

std::vector<CellSite> RadioEnv::route_polyline(uint32_t route_id) const {
    Rng rng = Rng(cfg_.seed).derive("route", route_id);
    double a = cfg_.area_size;
    auto edge_point = [&](int edge, double frac) -> CellSite {
        double p = (0.1 + 0.8 * frac) * a;
        switch (edge & 3) {
            case 0: return {p, 0.0};
            case 1: return {a, p};
            case 2: return {p, a};
            default: return {0.0, p};
        }
    };
    int e = static_cast<int>(rng.uniform_int(4));
    CellSite start = edge_point(e, rng.uniform());
    CellSite end = edge_point(e + 2, rng.uniform());
    CellSite mid{a * rng.uniform(0.3, 0.7), a * rng.uniform(0.3, 0.7)};
    return {start, mid, end};
}

std::vector<Trajectory> RadioEnv::gen_trajectories(const TrajectoryGenConfig& tcfg,
                                                   uint64_t stream) const {
    if (tcfg.routes < 1) throw std::invalid_argument("trajectories.routes must be >= 1");
    std::vector<Trajectory> out;
    for (uint32_t r = 0; r < tcfg.routes; ++r) {
        auto poly = route_polyline(r);
        std::vector<double> seg_len;
        double total = 0.0;
        for (size_t i = 0; i + 1 < poly.size(); ++i) {
            double l = std::hypot(poly[i + 1].x - poly[i].x, poly[i + 1].y - poly[i].y);
            seg_len.push_back(l);
            total += l;
        }
        auto at_arclen = [&](double s, double lateral, double& px, double& py) {
            s = std::clamp(s, 0.0, total);
            size_t i = 0;
            while (i + 1 < seg_len.size() && s > seg_len[i]) s -= seg_len[i++];
            double f = seg_len[i] > 0.0 ? s / seg_len[i] : 0.0;
            f = std::min(f, 1.0);
            double dx = poly[i + 1].x - poly[i].x;
            double dy = poly[i + 1].y - poly[i].y;
            double inv = seg_len[i] > 0.0 ? 1.0 / seg_len[i] : 0.0;
            px = poly[i].x + f * dx - lateral * dy * inv;
            py = poly[i].y + f * dy + lateral * dx * inv;
            px = std::clamp(px, 0.0, cfg_.area_size);
            py = std::clamp(py, 0.0, cfg_.area_size);
        };
        for (size_t d = 0; d < tcfg.devices_per_route; ++d) {
            uint64_t device_id = static_cast<uint64_t>(r) * tcfg.devices_per_route + d;
            Rng rng = Rng(cfg_.seed).derive("trajectory", stream).derive("device", device_id);
            double lateral = tcfg.lateral_jitter_m > 0.0 ? rng.normal(0.0, tcfg.lateral_jitter_m)
                                                         : 0.0;
            Trajectory traj;
            traj.device_id = device_id;
            traj.route_id = r;
            for (size_t k = 0; k < tcfg.samples_per_trajectory; ++k) {
                double t = static_cast<double>(k) * tcfg.sample_period_s;
                double px, py;
                at_arclen(tcfg.speed_mps * t, lateral, px, py);
                // shadowing redrawn per sample: successive positions are far
                // apart relative to typical shadow decorrelation distances
                double sp = 0.0, ss = 0.0;
                if (tcfg.shadowing && cfg_.shadow_sigma_db > 0.0) {
                    rng.normal_pair(cfg_.shadow_correlation, sp, ss);
                    sp *= cfg_.shadow_sigma_db;
                    ss *= cfg_.shadow_sigma_db;
                }
                RadioSample fp = sample_at(px, py, sp, ss);
                fp.device_id = device_id;
                traj.samples.push_back({t, fp});
            }
            out.push_back(std::move(traj));
        }
    }
    return out;
}

namespace {

json sample_to_json(const RadioSample& s) {
    return json{{"device_id", s.device_id},    {"x", s.x},
                {"y", s.y},                    {"primary_rsrp", s.primary_rsrp},
                {"secondary_rsrp", s.secondary_rsrp}, {"covered", s.covered}};
}

RadioSample sample_from_json(const json& j) {
    RadioSample s;
    s.device_id = j.at("device_id").get<uint64_t>();
    s.x = j.at("x").get<double>();
    s.y = j.at("y").get<double>();
    s.primary_rsrp = j.at("primary_rsrp").get<std::vector<double>>();
    s.secondary_rsrp = j.at("secondary_rsrp").get<double>();
    s.covered = j.at("covered").get<bool>();
    if (s.primary_rsrp.empty()) throw std::runtime_error("radio sample without primary_rsrp");
    return s;
}

}  // namespace

void write_radio_samples(std::span<const RadioSample> samples,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<RadioSample> read_radio_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<RadioSample> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(sample_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    return out;
}

void write_trajectories(std::span<const Trajectory> trajs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    for (const auto& tr : trajs) {
        json samples = json::array();
        for (const auto& p : tr.samples) {
            json js = sample_to_json(p.fp);
            js["t"] = p.t;
            samples.push_back(std::move(js));
        }
        out << json{{"device_id", tr.device_id}, {"route_id", tr.route_id},
                    {"samples", samples}}
                   .dump()
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<Trajectory> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            Trajectory tr;
            tr.device_id = j.at("device_id").get<uint64_t>();
            tr.route_id = j.at("route_id").get<uint32_t>();
            double prev_t = -1.0;
            for (const auto& js : j.at("samples")) {
                TrajectoryPoint p;
                p.t = js.at("t").get<double>();
                p.fp = sample_from_json(js);
                if (p.t <= prev_t)
                    throw std::runtime_error("trajectory timestamps not strictly increasing");
                prev_t = p.t;
                tr.samples.push_back(std::move(p));
            }
            out.push_back(std::move(tr));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    return out;
}

}  // namespace steersim
