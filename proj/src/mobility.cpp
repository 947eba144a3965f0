#include "steersim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "steersim/kernels.hpp"
#include "steersim/rng.hpp"

namespace steersim {

Fingerprint fingerprint_from_sample(const RadioSample& s, double detection_floor_dbm) {
    Fingerprint fp;
    size_t strongest = s.serving_cell();
    for (size_t c = 0; c < s.primary_rsrp.size(); ++c) {
        // the serving cell is always detected
        if (s.primary_rsrp[c] >= detection_floor_dbm || c == strongest)
            fp.values[static_cast<uint32_t>(c)] = s.primary_rsrp[c];
    }
    return fp;
}

namespace {

// One trajectory resampled to a fixed step count in the dense imputed space,
// with per-step serving cell and coverage carried from the nearest sample.
struct ResampledTraj {
    std::vector<double> flat;  // steps * dims
    std::vector<uint32_t> serving;
    std::vector<uint8_t> covered;
};

std::vector<double> dense_fp(const Fingerprint& fp, const std::vector<uint32_t>& cell_ids,
                             double floor) {
    std::vector<double> v(cell_ids.size(), floor);
    for (size_t d = 0; d < cell_ids.size(); ++d) {
        auto it = fp.values.find(cell_ids[d]);
        if (it != fp.values.end()) v[d] = it->second;
    }
    return v;
}

ResampledTraj resample(const Trajectory& tr, const std::vector<uint32_t>& cell_ids,
                       const MiningParams& p) {
    size_t L = tr.samples.size();
    size_t R = p.resample_steps;
    size_t dims = cell_ids.size();
    std::vector<std::vector<double>> dense(L);
    for (size_t i = 0; i < L; ++i)
        dense[i] = dense_fp(fingerprint_from_sample(tr.samples[i].fp, p.detection_floor_dbm),
                            cell_ids, p.impute_floor_dbm);
    ResampledTraj out;
    out.flat.resize(R * dims);
    out.serving.resize(R);
    out.covered.resize(R);
    for (size_t s = 0; s < R; ++s) {
        double pos = L == 1 ? 0.0
                            : static_cast<double>(s) * static_cast<double>(L - 1) /
                                  static_cast<double>(R == 1 ? 1 : R - 1);
        size_t i0 = static_cast<size_t>(pos);
        size_t i1 = std::min(i0 + 1, L - 1);
        double f = pos - static_cast<double>(i0);
        for (size_t d = 0; d < dims; ++d)
            out.flat[s * dims + d] = (1.0 - f) * dense[i0][d] + f * dense[i1][d];
        size_t nearest = f < 0.5 ? i0 : i1;
        out.serving[s] = static_cast<uint32_t>(tr.samples[nearest].fp.serving_cell());
        out.covered[s] = tr.samples[nearest].fp.covered ? 1 : 0;
    }
    return out;
}

std::vector<uint32_t> collect_cells(std::span<const Trajectory> trajectories,
                                    const MiningParams& p) {
    std::set<uint32_t> cells;
    for (const auto& tr : trajectories)
        for (const auto& s : tr.samples)
            for (const auto& [c, v] : fingerprint_from_sample(s.fp, p.detection_floor_dbm).values)
                cells.insert(c);
    return {cells.begin(), cells.end()};
}

size_t nearest_centroid(const std::vector<double>& x,
                        const std::vector<std::vector<double>>& centroids) {
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < centroids.size(); ++k) {
        double d = kernels::l2sq(x.data(), centroids[k].data(), x.size());
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::vector<size_t> kmeans_once(const std::vector<ResampledTraj>& points, size_t k,
                                const MiningParams& p, Rng rng,
                                std::vector<std::vector<double>>& centroids) {
    size_t n = points.size();
    size_t dim = points.front().flat.size();

    // k-means++ seeding
    centroids.clear();
    centroids.push_back(points[rng.uniform_int(n)].flat);
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids)
                best = std::min(best, kernels::l2sq(points[i].flat.data(), c.data(), dim));
            d2[i] = best;
            total += best;
        }
        size_t pick = 0;
        if (total > 0.0) {
            double u = rng.uniform() * total;
            double acc = 0.0;
            for (size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc || i + 1 == n) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_int(n);
        }
        centroids.push_back(points[pick].flat);
    }

    std::vector<size_t> assign(n, 0);
    for (size_t iter = 0; iter < p.max_iterations; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            size_t a = nearest_centroid(points[i].flat, centroids);
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
        }
        std::vector<size_t> counts(k, 0);
        for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            kernels::accumulate(centroids[assign[i]].data(), points[i].flat.data(), dim);
            ++counts[assign[i]];
        }
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                kernels::scale(centroids[c].data(), 1.0 / static_cast<double>(counts[c]), dim);
            } else {
                // adopt the point farthest from its centroid
                size_t far = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    double d = kernels::l2sq(points[i].flat.data(),
                                             centroids[assign[i]].data(), dim);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[c] = points[far].flat;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
    }
    for (size_t i = 0; i < n; ++i) assign[i] = nearest_centroid(points[i].flat, centroids);
    return assign;
}

// restarted Lloyd's, keeping the lowest-inertia run
std::vector<size_t> kmeans(const std::vector<ResampledTraj>& points, size_t k,
                           const MiningParams& p,
                           std::vector<std::vector<double>>& centroids) {
    size_t dim = points.front().flat.size();
    std::vector<size_t> best_assign;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (size_t r = 0; r < p.restarts; ++r) {
        std::vector<std::vector<double>> c;
        auto assign = kmeans_once(points, k, p, Rng(p.seed).derive("kmeans", r), c);
        double inertia = 0.0;
        for (size_t i = 0; i < points.size(); ++i)
            inertia += kernels::l2sq(points[i].flat.data(), c[assign[i]].data(), dim);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_assign = std::move(assign);
            centroids = std::move(c);
        }
    }
    return best_assign;
}

}  // namespace

TrajectoryModel mine_trajectories(std::span<const Trajectory> trajectories, size_t k_routes,
                                  const MiningParams& params) {
    if (k_routes < 1) throw std::invalid_argument("mine_trajectories: k_routes must be >= 1");
    if (trajectories.size() < k_routes)
        throw std::invalid_argument("mine_trajectories: fewer trajectories than k_routes");
    for (const auto& tr : trajectories)
        if (tr.samples.empty())
            throw std::invalid_argument("mine_trajectories: empty trajectory");

    TrajectoryModel model;
    model.cell_ids = collect_cells(trajectories, params);
    model.steps = params.resample_steps;
    model.impute_floor_dbm = params.impute_floor_dbm;

    std::vector<ResampledTraj> points;
    points.reserve(trajectories.size());
    for (const auto& tr : trajectories) points.push_back(resample(tr, model.cell_ids, params));

    std::vector<std::vector<double>> centroids;
    std::vector<size_t> assign = kmeans(points, k_routes, params, centroids);

    size_t dims = model.cell_ids.size();
    model.routes.resize(k_routes);
    for (size_t k = 0; k < k_routes; ++k) {
        auto& route = model.routes[k];
        route.centroid.assign(model.steps, std::vector<double>(dims, 0.0));
        for (size_t s = 0; s < model.steps; ++s)
            for (size_t d = 0; d < dims; ++d) route.centroid[s][d] = centroids[k][s * dims + d];
        route.serving_cells.assign(model.steps, 0);
        route.serving_dist.assign(model.steps, {});
        route.coverage_prob.assign(model.steps, 0.0);
    }

    std::vector<size_t> member_count(k_routes, 0);
    for (size_t i = 0; i < points.size(); ++i) ++member_count[assign[i]];
    for (size_t k = 0; k < k_routes; ++k) model.routes[k].member_count = member_count[k];

    for (size_t s = 0; s < model.steps; ++s) {
        for (size_t i = 0; i < points.size(); ++i) {
            auto& route = model.routes[assign[i]];
            route.serving_dist[s][points[i].serving[s]] += 1.0;
            route.coverage_prob[s] += points[i].covered[s];
        }
        for (size_t k = 0; k < k_routes; ++k) {
            auto& route = model.routes[k];
            if (member_count[k] == 0) continue;
            double inv = 1.0 / static_cast<double>(member_count[k]);
            route.coverage_prob[s] *= inv;
            uint32_t modal = 0;
            double modal_n = -1.0;
            for (auto& [cell, cnt] : route.serving_dist[s]) {
                if (cnt > modal_n) {
                    modal_n = cnt;
                    modal = cell;
                }
                cnt *= inv;
            }
            route.serving_cells[s] = modal;
        }
    }
    return model;
}

std::vector<size_t> assign_routes(const TrajectoryModel& model,
                                  std::span<const Trajectory> trajectories,
                                  const MiningParams& params) {
    std::vector<size_t> out;
    out.reserve(trajectories.size());
    size_t dims = model.cell_ids.size();
    for (const auto& tr : trajectories) {
        ResampledTraj pt = resample(tr, model.cell_ids, params);
        size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < model.routes.size(); ++k) {
            double d = 0.0;
            for (size_t s = 0; s < model.steps; ++s)
                d += kernels::l2sq(pt.flat.data() + s * dims,
                                   model.routes[k].centroid[s].data(), dims);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::vector<RouteMatch> match_trajectory(const TrajectoryModel& model,
                                         std::span<const Fingerprint> observed_prefix) {
    if (observed_prefix.empty())
        throw std::invalid_argument("match_trajectory: empty prefix");
    size_t L = observed_prefix.size();
    if (L > model.steps)
        throw std::invalid_argument("match_trajectory: prefix longer than templates");
    size_t dims = model.cell_ids.size();

    std::vector<std::vector<double>> prefix;
    prefix.reserve(L);
    for (const auto& fp : observed_prefix)
        prefix.push_back(dense_fp(fp, model.cell_ids, model.impute_floor_dbm));

    std::vector<RouteMatch> matches;
    for (size_t k = 0; k < model.routes.size(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t off = 0; off + L <= model.steps; ++off) {
            double d = 0.0;
            for (size_t s = 0; s < L; ++s)
                d += std::sqrt(kernels::l2sq(prefix[s].data(),
                                             model.routes[k].centroid[off + s].data(), dims));
            best = std::min(best, d / static_cast<double>(L));
        }
        matches.push_back({static_cast<uint32_t>(k), best, 0.0});
    }

    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& m : matches) dmin = std::min(dmin, m.distance);
    double z = 0.0;
    for (auto& m : matches) {
        m.score = std::exp(-(m.distance - dmin));
        z += m.score;
    }
    for (auto& m : matches) m.score /= z;
    std::sort(matches.begin(), matches.end(), [](const RouteMatch& a, const RouteMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.route_id < b.route_id;
    });
    return matches;
}

std::vector<double> predict_coverage_ahead(const TrajectoryModel& model, uint32_t route_id,
                                           size_t current_step, size_t horizon_steps) {
    if (route_id >= model.routes.size())
        throw std::invalid_argument("predict_coverage_ahead: unknown route");
    if (current_step + horizon_steps >= model.steps && horizon_steps > 0)
        throw std::invalid_argument("predict_coverage_ahead: horizon exceeds template");
    const auto& route = model.routes[route_id];
    std::vector<double> out;
    out.reserve(horizon_steps);
    for (size_t s = 1; s <= horizon_steps; ++s)
        out.push_back(route.coverage_prob[current_step + s]);
    return out;
}

Dynamics estimate_dynamics(std::span<const Fingerprint> observed_prefix,
                           double static_threshold_db, double fast_threshold_db) {
    if (observed_prefix.size() < 2)
        throw std::invalid_argument("estimate_dynamics: need at least 2 fingerprints");
    double total = 0.0;
    for (size_t i = 1; i < observed_prefix.size(); ++i) {
        const auto& a = observed_prefix[i - 1].values;
        const auto& b = observed_prefix[i].values;
        std::set<uint32_t> keys;
        for (const auto& [c, v] : a) keys.insert(c);
        for (const auto& [c, v] : b) keys.insert(c);
        double ss = 0.0;
        for (uint32_t c : keys) {
            auto ia = a.find(c);
            auto ib = b.find(c);
            double va = ia != a.end() ? ia->second : -140.0;
            double vb = ib != b.end() ? ib->second : -140.0;
            ss += (va - vb) * (va - vb);
        }
        total += std::sqrt(ss / static_cast<double>(keys.size()));
    }
    double disp = total / static_cast<double>(observed_prefix.size() - 1);
    if (disp <= static_threshold_db) return Dynamics::Static;
    if (disp <= fast_threshold_db) return Dynamics::Slow;
    return Dynamics::Fast;
}

HandoverPrediction predict_handover(const TrajectoryModel& model, uint32_t route_id,
                                    size_t current_step, size_t horizon_steps) {
    if (route_id >= model.routes.size())
        throw std::invalid_argument("predict_handover: unknown route");
    if (current_step >= model.steps)
        throw std::invalid_argument("predict_handover: current_step beyond template");
    const auto& route = model.routes[route_id];
    size_t last = std::min(current_step + horizon_steps, model.steps - 1);
    uint32_t serving = route.serving_cells[current_step];

    HandoverPrediction pred;
    std::set<uint32_t> seen;
    for (size_t s = current_step + 1; s <= last; ++s) {
        uint32_t cell = route.serving_cells[s];
        if (cell == serving || seen.count(cell)) continue;
        seen.insert(cell);
        if (!pred.steps_to_handover) pred.steps_to_handover = s - current_step;
        double score = 0.0;
        auto it = route.serving_dist[s].find(cell);
        if (it != route.serving_dist[s].end()) score = it->second;
        pred.candidates.push_back({cell, score});
    }
    double total = 0.0;
    for (const auto& c : pred.candidates) total += c.score;
    if (total > 1.0)
        for (auto& c : pred.candidates) c.score /= total;
    return pred;
}

MobilityReport evaluate_mobility(const TrajectoryModel& model,
                                 std::span<const Trajectory> training,
                                 std::span<const Trajectory> heldout,
                                 const MiningParams& params) {
    MobilityReport rep;
    rep.n_heldout = heldout.size();

    auto assignments = assign_routes(model, training, params);
    std::vector<std::map<uint32_t, size_t>> route_votes(model.routes.size());
    for (size_t i = 0; i < training.size(); ++i)
        ++route_votes[assignments[i]][training[i].route_id];
    std::vector<uint32_t> majority(model.routes.size(), 0);
    for (size_t k = 0; k < model.routes.size(); ++k) {
        size_t best = 0;
        for (const auto& [route, cnt] : route_votes[k])
            if (cnt > best) {
                best = cnt;
                majority[k] = route;
            }
    }
    size_t agree = 0;
    for (size_t i = 0; i < training.size(); ++i)
        agree += majority[assignments[i]] == training[i].route_id;
    rep.cluster_route_agreement =
        training.empty() ? 0.0 : static_cast<double>(agree) / training.size();

    if (heldout.empty()) return rep;

    size_t top1 = 0, ho_correct = 0;
    size_t current_step = model.steps / 2;
    for (const auto& tr : heldout) {
        std::vector<Fingerprint> prefix;
        size_t half = std::max<size_t>(1, tr.samples.size() / 2);
        for (size_t i = 0; i < half; ++i)
            prefix.push_back(fingerprint_from_sample(tr.samples[i].fp,
                                                     params.detection_floor_dbm));
        auto matches = match_trajectory(model, prefix);
        uint32_t cluster = matches.front().route_id;
        top1 += majority[cluster] == tr.route_id;

        // ground-truth serving change on the device's own resampled sequence
        ResampledTraj rs = resample(tr, model.cell_ids, params);
        std::optional<size_t> truth;
        for (size_t s = current_step + 1; s < model.steps; ++s)
            if (rs.serving[s] != rs.serving[current_step]) {
                truth = s - current_step;
                break;
            }
        auto pred = predict_handover(model, cluster, current_step,
                                     model.steps - 1 - current_step);
        if (truth.has_value() == pred.steps_to_handover.has_value() &&
            (!truth ||
             (*truth > *pred.steps_to_handover ? *truth - *pred.steps_to_handover
                                               : *pred.steps_to_handover - *truth) <= 1))
            ++ho_correct;
    }
    rep.prefix_top1_accuracy = static_cast<double>(top1) / heldout.size();
    rep.handover_step_accuracy = static_cast<double>(ho_correct) / heldout.size();
    return rep;
}

nlohmann::json TrajectoryModel::to_json() const {
    nlohmann::json jroutes = nlohmann::json::array();
    for (const auto& r : routes) {
        nlohmann::json jdist = nlohmann::json::array();
        for (const auto& dist : r.serving_dist) {
            nlohmann::json jd = nlohmann::json::object();
            for (const auto& [cell, frac] : dist) jd[std::to_string(cell)] = frac;
            jdist.push_back(std::move(jd));
        }
        jroutes.push_back({{"centroid", r.centroid},
                           {"serving_cells", r.serving_cells},
                           {"serving_dist", jdist},
                           {"coverage_prob", r.coverage_prob},
                           {"member_count", r.member_count}});
    }
    return nlohmann::json{{"version", 1},
                          {"cell_ids", cell_ids},
                          {"steps", steps},
                          {"impute_floor_dbm", impute_floor_dbm},
                          {"routes", jroutes}};
}

TrajectoryModel TrajectoryModel::from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error("unsupported trajectory model version");
    TrajectoryModel m;
    m.cell_ids = j.at("cell_ids").get<std::vector<uint32_t>>();
    m.steps = j.at("steps").get<size_t>();
    m.impute_floor_dbm = j.at("impute_floor_dbm").get<double>();
    for (const auto& jr : j.at("routes")) {
        RouteTemplate r;
        r.centroid = jr.at("centroid").get<std::vector<std::vector<double>>>();
        r.serving_cells = jr.at("serving_cells").get<std::vector<uint32_t>>();
        r.coverage_prob = jr.at("coverage_prob").get<std::vector<double>>();
        r.member_count = jr.at("member_count").get<size_t>();
        for (const auto& jd : jr.at("serving_dist")) {
            std::map<uint32_t, double> dist;
            for (auto it = jd.begin(); it != jd.end(); ++it)
                dist[static_cast<uint32_t>(std::stoul(it.key()))] = it.value().get<double>();
            r.serving_dist.push_back(std::move(dist));
        }
        m.routes.push_back(std::move(r));
    }
    return m;
}

}  // namespace steersim
