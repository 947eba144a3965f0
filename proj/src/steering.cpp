#include "steersim/steering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace steersim {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Random: return "Random";
        case Strategy::Coverage: return "Coverage";
        case Strategy::Traffic: return "Traffic";
        case Strategy::CoverageTraffic: return "CoverageTraffic";
        case Strategy::Oracle: return "Oracle";
    }
    return "?";
}

Scenario draw_scenario(const RadioEnv& env, const FlowGenConfig& flowgen, size_t n_devices,
                       uint64_t seed, uint64_t replication) {
    Scenario sc;
    uint64_t radio_stream = Rng(seed).derive("scenario-radio", replication).state();
    auto samples = env.gen_samples(n_devices, radio_stream);
    FlowGenConfig fg = flowgen;
    fg.seed = Rng(seed).derive("scenario-flows", replication).state();
    auto flows = gen_flows(fg, n_devices);
    sc.devices.reserve(n_devices);
    for (size_t i = 0; i < n_devices; ++i)
        sc.devices.push_back({static_cast<uint64_t>(i), std::move(samples[i]),
                              std::move(flows[i])});
    return sc;
}

namespace {

double combine_scores(CombineRule rule, double w, double p_cov, double p_traffic) {
    switch (rule) {
        case CombineRule::Product: return p_cov * p_traffic;
        case CombineRule::Min: return std::min(p_cov, p_traffic);
        case CombineRule::WeightedSum: return w * p_cov + (1.0 - w) * p_traffic;
    }
    return 0.0;
}

}  // namespace

std::vector<double> score_devices(const Scenario& scenario, Strategy strategy,
                                  const TrafficPredictor* traffic,
                                  const CoveragePredictor* coverage, CombineRule rule,
                                  double combine_weight, Rng& random_stream) {
    if (strategy != Strategy::Random && strategy != Strategy::Oracle) {
        if ((strategy != Strategy::Coverage && traffic == nullptr) ||
            (strategy != Strategy::Traffic && coverage == nullptr))
            throw std::invalid_argument("score_devices: missing predictor for strategy " +
                                        strategy_name(strategy));
    }
    std::vector<double> scores;
    scores.reserve(scenario.devices.size());
    for (const auto& dev : scenario.devices) {
        double s = 0.0;
        switch (strategy) {
            case Strategy::Random:
                s = random_stream.uniform();
                break;
            case Strategy::Coverage:
                s = coverage->predict_proba(dev.radio);
                break;
            case Strategy::Traffic:
                s = traffic->predict_proba(dev.flow.key, dev.flow.packets.front(), 10000);
                break;
            case Strategy::CoverageTraffic:
                s = combine_scores(
                    rule, combine_weight, coverage->predict_proba(dev.radio),
                    traffic->predict_proba(dev.flow.key, dev.flow.packets.front(), 10000));
                break;
            case Strategy::Oracle:
                s = dev.radio.covered ? static_cast<double>(dev.flow.total_volume()) : -1.0;
                break;
        }
        scores.push_back(s);
    }
    return scores;
}

SteeringResult run_steering(const RadioEnv& env, const FlowGenConfig& flowgen,
                            const TrafficPredictor& traffic, const CoveragePredictor& coverage,
                            const SteeringConfig& cfg) {
    if (cfg.replications < 1)
        throw std::invalid_argument("steering: replications must be >= 1");
    for (double f : cfg.fractions)
        if (f <= 0.0 || f > 1.0)
            throw std::invalid_argument("steering: fractions must be in (0,1]");

    std::vector<Strategy> strategies(kReportedStrategies.begin(), kReportedStrategies.end());
    if (cfg.include_oracle) strategies.push_back(Strategy::Oracle);

    SteeringResult res;
    for (Strategy st : strategies) {
        SteeringCurve c;
        c.strategy = st;
        c.replications = cfg.replications;
        c.offloaded_raw.assign(cfg.fractions.size(), {});
        c.unnecessary_raw.assign(cfg.fractions.size(), {});
        res.curves.push_back(std::move(c));
    }

    size_t n = cfg.n_devices;
    for (size_t rep = 0; rep < cfg.replications; ++rep) {
        Scenario sc = draw_scenario(env, flowgen, n, cfg.seed, rep);
        Rng random_stream = Rng(cfg.seed).derive("random-strategy", rep);

        for (size_t si = 0; si < strategies.size(); ++si) {
            auto scores = score_devices(sc, strategies[si], &traffic, &coverage, cfg.combine,
                                        cfg.combine_weight, random_stream);
            // selection order: score descending, device_id ascending on ties
            std::vector<uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
                if (scores[a] != scores[b]) return scores[a] > scores[b];
                return a < b;
            });
            for (size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
                size_t k = static_cast<size_t>(
                    std::ceil(cfg.fractions[fi] * static_cast<double>(n)));
                if (k == 0) continue;  // skip point
                k = std::min(k, n);
                double offload = 0.0;
                size_t uncovered = 0;
                for (size_t i = 0; i < k; ++i) {
                    const auto& dev = sc.devices[order[i]];
                    if (dev.radio.covered)
                        offload += static_cast<double>(dev.flow.total_volume());
                    else
                        ++uncovered;
                }
                res.curves[si].offloaded_raw[fi].push_back(offload);
                res.curves[si].unnecessary_raw[fi].push_back(
                    static_cast<double>(uncovered) / static_cast<double>(k));
            }
        }
    }

    for (auto& c : res.curves) {
        for (size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
            const auto& off = c.offloaded_raw[fi];
            if (off.empty()) continue;
            double mean = std::accumulate(off.begin(), off.end(), 0.0) / off.size();
            double var = 0.0;
            for (double v : off) var += (v - mean) * (v - mean);
            var /= off.size();
            const auto& unc = c.unnecessary_raw[fi];
            double umean = std::accumulate(unc.begin(), unc.end(), 0.0) / unc.size();
            c.points.push_back({cfg.fractions[fi], mean, std::sqrt(var), umean});
        }
    }
    return res;
}

std::vector<SavingsRow> measurement_savings(const SteeringResult& result) {
    std::vector<SavingsRow> rows;
    for (const auto& c : result.curves) {
        SavingsRow r{c.strategy, {}};
        for (const auto& p : c.points) r.unnecessary_rate.push_back(p.unnecessary_mean);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_steering_csv(const SteeringResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << "strategy,fraction,offloaded_bytes_mean,offloaded_bytes_std,unnecessary_rate_mean\n";
    char buf[192];
    for (const auto& c : result.curves) {
        for (const auto& p : c.points) {
            std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%.9g\n",
                          strategy_name(c.strategy).c_str(), p.fraction, p.offloaded_mean,
                          p.offloaded_std, p.unnecessary_mean);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_steering_svg(const SteeringResult& result, const std::filesystem::path& path) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 30, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double fmin = 1.0, fmax = 0.0, vmax = 1.0;
    for (const auto& c : result.curves)
        for (const auto& p : c.points) {
            fmin = std::min(fmin, p.fraction);
            fmax = std::max(fmax, p.fraction);
            vmax = std::max(vmax, p.offloaded_mean);
        }
    double ymin = 2.0;  // log10 floor: 100 bytes
    double ymax = std::ceil(std::log10(std::max(vmax, 1000.0)));
    auto xpos = [&](double f) {
        return ml + pw * (std::log10(f) - std::log10(fmin)) /
                        (std::log10(fmax) - std::log10(fmin));
    };
    auto ypos = [&](double v) {
        double lv = std::clamp(std::log10(std::max(v, 1.0)), ymin, ymax);
        return mt + ph * (1.0 - (lv - ymin) / (ymax - ymin));
    };

    static const char* colors[] = {"#888888", "#1f77b4", "#2ca02c", "#d62728", "#9467bd"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2
        << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">Offloaded volume vs fraction "
           "of devices selected</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (double e = ymin; e <= ymax + 0.5; e += 1.0) {
        double y = ypos(std::pow(10.0, e));
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">1e" << static_cast<int>(e)
            << "</text>\n";
    }
    size_t ci = 0;
    for (const auto& c : result.curves) {
        const char* color = colors[ci % 5];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : c.points) out << xpos(p.fraction) << "," << ypos(p.offloaded_mean)
                                           << " ";
        out << "\"/>\n";
        out << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * ci
            << "\" font-size=\"12\" fill=\"" << color << "\">" << strategy_name(c.strategy)
            << "</text>\n";
        for (const auto& p : c.points) {
            out << "<circle cx=\"" << xpos(p.fraction) << "\" cy=\"" << ypos(p.offloaded_mean)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            if (ci == 0) {
                out << "<text x=\"" << xpos(p.fraction) << "\" y=\"" << mt + ph + 16
                    << "\" text-anchor=\"middle\" font-size=\"11\">" << p.fraction
                    << "</text>\n";
            }
        }
        ++ci;
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">fraction of devices selected</text>\n";
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace steersim
