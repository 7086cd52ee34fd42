#include "stablescene/cem.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "stablescene/errors.hpp"
#include "stablescene/log.hpp"
#include "stablescene/rng.hpp"

namespace stablescene {

int CemConfig::elite_count() const {
    return int(std::ceil(elite_frac * samples));
}

void CemConfig::validate() const {
    auto bad = [](const std::string& what) {
        throw ValidationError(ValidationCode::BadField, "", "cem config: " + what);
    };
    if (samples < 1) bad("samples must be >= 1");
    if (iterations < 1) bad("iterations must be >= 1");
    if (!(elite_frac > 0.0 && elite_frac <= 1.0)) bad("elite_frac must be in (0,1]");
    if (elite_count() < 1) bad("elite count must be >= 1");
    if (episodes < 1) bad("episodes must be >= 1");
    const double sig[6] = {sigma0_trans.x, sigma0_trans.y, sigma0_trans.z,
                           sigma0_rot.x, sigma0_rot.y, sigma0_rot.z};
    for (double s : sig)
        if (s < 0.0) bad("sigma0 components must be >= 0");
    if (workers < 0) bad("workers must be >= 0");
}

Layout apply_adjustment(const Layout& base, const std::vector<std::string>& opt_ids,
                        const std::vector<double>& flat,
                        const std::map<std::string, std::vector<std::string>>& rigid_followers) {
    Layout out = base;
    for (size_t i = 0; i < opt_ids.size(); ++i) {
        const std::string& id = opt_ids[i];
        const Vec3 dt{flat[i * 6 + 0], flat[i * 6 + 1], flat[i * 6 + 2]};
        const Vec3 dtheta{flat[i * 6 + 3], flat[i * 6 + 4], flat[i * 6 + 5]};

        const Pose old_pose = out.at(id);
        const Pose new_pose{(old_pose.rotation * UnitQuat::exp_map(dtheta)).normalize(),
                            old_pose.translation + dt};
        out.poses[id] = new_pose;

        auto fit = rigid_followers.find(id);
        if (fit == rigid_followers.end()) continue;
        // followers keep their pose relative to the adjusted root
        const Pose delta = new_pose * old_pose.inverse();
        for (const std::string& fid : fit->second) {
            const Pose fp = out.at(fid);
            out.poses[fid] = delta * fp;
        }
    }
    return out;
}

namespace {

struct Gaussian {
    std::vector<double> mu;
    std::vector<double> var;
};

std::vector<double> sigma0_flat(const CemConfig& cem, size_t n_opt) {
    std::vector<double> v(n_opt * 6);
    const double s[6] = {cem.sigma0_trans.x, cem.sigma0_trans.y, cem.sigma0_trans.z,
                         cem.sigma0_rot.x, cem.sigma0_rot.y, cem.sigma0_rot.z};
    for (size_t i = 0; i < n_opt; ++i)
        for (int d = 0; d < 6; ++d) v[i * 6 + size_t(d)] = std::max(s[d] * s[d], kSigmaFloor * kSigmaFloor);
    return v;
}

} // namespace

CemResult cem_optimize(const Scene& scene, const Layout& base_layout,
                       const std::vector<std::string>& opt_ids,
                       const std::set<std::string>& fixed_ids, const CemConfig& cem,
                       const EnergyWeights& weights, const SimConfig& sim_config,
                       const std::vector<std::string>& include_ids,
                       const std::map<std::string, std::vector<std::string>>& rigid_followers,
                       const CandidateEvaluator& evaluator) {
    cem.validate();
    weights.validate();
    sim_config.validate();
    if (opt_ids.empty()) throw OptimizationFailed("cem_optimize: opt_ids is empty");
    for (const std::string& id : opt_ids)
        if (fixed_ids.count(id))
            throw OptimizationFailed("cem_optimize: opt id '" + id + "' is also fixed");

    const size_t dim = opt_ids.size() * 6;
    const int n_elite = cem.elite_count();
    const int n_workers = cem.workers > 0
                              ? cem.workers
                              : std::max(1u, std::thread::hardware_concurrency());

    CandidateEvaluator eval = evaluator;
    if (!eval) {
        eval = [&](const Layout& candidate, const std::vector<double>&) {
            return evaluate_candidate(scene, candidate, base_layout, fixed_ids, weights,
                                      sim_config, include_ids);
        };
    }

    CemResult result;
    result.best_energy.total = std::numeric_limits<double>::infinity();
    result.best_adjustment.assign(dim, 0.0);
    bool have_best = false;

    for (int episode = 0; episode < cem.episodes; ++episode) {
        Rng rng = Rng(cem.rng_seed).fork(uint64_t(episode));
        Gaussian g;
        g.mu = (episode == 0 || !have_best) ? std::vector<double>(dim, 0.0)
                                            : result.best_adjustment;
        g.var = sigma0_flat(cem, opt_ids.size());

        for (int t = 0; t < cem.iterations; ++t) {
            // sampling is single-threaded so results are worker-count invariant
            std::vector<std::vector<double>> samples(size_t(cem.samples));
            for (int k = 0; k < cem.samples; ++k) {
                std::vector<double>& s = samples[size_t(k)];
                s.resize(dim);
                for (size_t d = 0; d < dim; ++d)
                    s[d] = g.mu[d] + std::sqrt(g.var[d]) * rng.normal();
            }

            std::vector<double> energy(size_t(cem.samples));
            std::vector<EnergyReport> reports(size_t(cem.samples));
            std::atomic<int> next{0};
            auto work = [&]() {
                for (;;) {
                    const int k = next.fetch_add(1);
                    if (k >= cem.samples) return;
                    const Layout candidate =
                        apply_adjustment(base_layout, opt_ids, samples[size_t(k)], rigid_followers);
                    reports[size_t(k)] = eval(candidate, samples[size_t(k)]);
                    energy[size_t(k)] = reports[size_t(k)].total;
                }
            };
            if (n_workers == 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
                for (std::thread& th : pool) th.join();
            }
            result.evaluations += cem.samples;

            // elites: lowest energies, ties by candidate index
            std::vector<int> order(size_t(cem.samples));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int x, int y) {
                const double ex = energy[size_t(x)], ey = energy[size_t(y)];
                if (ex != ey) return ex < ey;
                return x < y;
            });
            std::vector<int> elites;
            for (int idx : order) {
                if (int(elites.size()) >= n_elite) break;
                if (!std::isfinite(energy[size_t(idx)])) break;
                elites.push_back(idx);
            }
            if (elites.empty())
                throw OptimizationFailed("cem iteration " + std::to_string(t + 1) + " episode " +
                                         std::to_string(episode + 1) +
                                         ": all candidates diverged");

            // moment matching over the elite adjustments (biased variance)
            std::vector<double> mu(dim, 0.0), var(dim, 0.0);
            for (int idx : elites)
                for (size_t d = 0; d < dim; ++d) mu[d] += samples[size_t(idx)][d];
            for (size_t d = 0; d < dim; ++d) mu[d] /= double(elites.size());
            for (int idx : elites) {
                for (size_t d = 0; d < dim; ++d) {
                    const double diff = samples[size_t(idx)][d] - mu[d];
                    var[d] += diff * diff;
                }
            }
            for (size_t d = 0; d < dim; ++d)
                var[d] = std::max(var[d] / double(elites.size()), kSigmaFloor * kSigmaFloor);

            const int best_idx = elites[0];
            if (energy[size_t(best_idx)] < result.best_energy.total) {
                result.best_energy = reports[size_t(best_idx)];
                result.best_adjustment = samples[size_t(best_idx)];
                have_best = true;
            }

            CemIterationLog log;
            log.episode = episode + 1;
            log.iteration = t + 1;
            log.batch_best = energy[size_t(best_idx)];
            log.best_so_far = result.best_energy.total;
            log.elite_indices = elites;
            for (int idx : elites) log.elite_samples.push_back(samples[size_t(idx)]);
            log.mu_after = mu;
            log.var_after = var;
            result.logs.push_back(std::move(log));
            result.history.push_back(result.best_energy.total);

            g.mu = std::move(mu);
            g.var = std::move(var);
        }
    }

    if (!have_best) throw OptimizationFailed("cem_optimize: no finite candidate found");
    result.best = apply_adjustment(base_layout, opt_ids, result.best_adjustment, rigid_followers);
    logging::debug("cem done: best=" + std::to_string(result.best_energy.total) +
                   " evals=" + std::to_string(result.evaluations));
    return result;
}

} // namespace stablescene
