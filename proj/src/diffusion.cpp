#include "msd/diffusion.hpp"

#include <algorithm>

#include "json.hpp"
#include "msd/errors.hpp"

namespace msd {

std::vector<int> select_seeds(const Graph& g, int k, Rng& rng) {
    std::vector<int> candidates;
    for (int u = 0; u < g.num_nodes(); ++u)
        if (g.degree(u) > 0) candidates.push_back(u);
    if (k < 1)
        throw MsdError("seed count must be at least 1");
    if (static_cast<std::size_t>(k) > candidates.size())
        throw MsdError("requested " + std::to_string(k) + " seeds but only " +
                       std::to_string(candidates.size()) + " non-isolated nodes exist");
    auto seeds = rng.sample_without_replacement(std::move(candidates), static_cast<std::size_t>(k));
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

namespace {

bool frontier_remains(const Graph& g, const std::vector<int>& infected_list,
                      const std::vector<char>& infected) {
    for (int u : infected_list)
        for (int v : g.neighbors(u))
            if (!infected[v]) return true;
    return false;
}

} // namespace

InfectionOutcome simulate(const Graph& g, const std::vector<int>& seeds,
                          const DiffusionConfig& cfg) {
    if (seeds.empty()) throw MsdError("seed set is empty");
    if (!(cfg.infection_prob >= 0.0 && cfg.infection_prob <= 1.0))
        throw MsdError("infection_prob must lie in [0, 1]");
    if (!(cfg.target_fraction > 0.0 && cfg.target_fraction <= 1.0))
        throw MsdError("target_fraction must lie in (0, 1]");
    const int n = g.num_nodes();
    std::vector<char> infected(n, 0);
    std::vector<int> infected_list;
    for (int s : seeds) {
        if (s < 0 || s >= n) throw MsdError("unknown seed index " + std::to_string(s));
        if (!infected[s]) {
            infected[s] = 1;
            infected_list.push_back(s);
        }
    }
    std::sort(infected_list.begin(), infected_list.end());

    InfectionOutcome out;
    out.seeds = infected_list;

    const std::size_t max_steps =
        cfg.max_steps > 0 ? cfg.max_steps : static_cast<std::size_t>(10) * std::max(n, 1);
    Rng rng(cfg.seed);

    auto above_target = [&] {
        return static_cast<double>(infected_list.size()) / n > cfg.target_fraction;
    };

    out.hit_target = above_target();
    std::size_t step = 0;
    while (!out.hit_target && step < max_steps) {
        // frontier frozen at round start: nodes infected this round spread next round
        std::vector<int> newly;
        for (int u : infected_list) {
            for (int v : g.neighbors(u)) {
                if (infected[v]) continue;
                if (rng.bernoulli(cfg.infection_prob)) {
                    infected[v] = 1;
                    newly.push_back(v);
                }
            }
        }
        ++step;
        std::sort(newly.begin(), newly.end());
        const std::size_t old_size = infected_list.size();
        infected_list.insert(infected_list.end(), newly.begin(), newly.end());
        std::inplace_merge(infected_list.begin(),
                           infected_list.begin() + static_cast<std::ptrdiff_t>(old_size),
                           infected_list.end());
        if (cfg.record_trace) out.trace.push_back(newly);
        out.hit_target = above_target();
        if (out.hit_target) break;
        // once no susceptible contact remains the target is unreachable
        if (!frontier_remains(g, infected_list, infected)) break;
    }
    out.steps = step;
    out.infected = std::move(infected_list);
    return out;
}

std::string snapshot_to_json(const Graph& g, const InfectionOutcome& outcome) {
    nlohmann::json j;
    auto labels = [&](const std::vector<int>& ids) {
        std::vector<std::string> out;
        out.reserve(ids.size());
        for (int u : ids) out.push_back(g.label(u));
        return out;
    };
    j["seeds"] = labels(outcome.seeds);
    j["infected"] = labels(outcome.infected);
    j["steps"] = outcome.steps;
    j["hit_target"] = outcome.hit_target;
    return j.dump();
}

InfectionOutcome snapshot_from_json(const Graph& g, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed snapshot JSON: ") + e.what());
    }
    InfectionOutcome out;
    try {
        for (const auto& s : j.at("seeds")) out.seeds.push_back(g.index_of(s.get<std::string>()));
        for (const auto& s : j.at("infected"))
            out.infected.push_back(g.index_of(s.get<std::string>()));
        out.steps = j.value("steps", std::size_t{0});
        out.hit_target = j.value("hit_target", false);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed snapshot JSON: ") + e.what());
    } catch (const MsdError& e) {
        throw ParseError(std::string("snapshot: ") + e.what());
    }
    std::sort(out.seeds.begin(), out.seeds.end());
    std::sort(out.infected.begin(), out.infected.end());
    return out;
}

} // namespace msd
