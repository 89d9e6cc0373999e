#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msd/graph.hpp"
#include "msd/rng.hpp"

namespace msd {

/// Discrete-time susceptible-infected spread. Each round, every infected
/// node independently attempts to infect each susceptible neighbor with
/// probability infection_prob; infected nodes stay infected. Rounds stop
/// once the infected share strictly exceeds target_fraction, or at
/// max_steps.
struct DiffusionConfig {
    double infection_prob = 0.2;
    double target_fraction = 0.10;
    std::size_t max_steps = 0; // 0: defaults to 10 * N
    std::uint64_t seed = 1;
    bool record_trace = false;
};

struct InfectionOutcome {
    std::vector<int> seeds;    // ascending original indices
    std::vector<int> infected; // ascending original indices
    std::size_t steps = 0;
    bool hit_target = false;
    std::vector<std::vector<int>> trace; // newly infected per round, when recorded
};

/// k distinct nodes sampled uniformly from the non-isolated nodes.
std::vector<int> select_seeds(const Graph& g, int k, Rng& rng);

InfectionOutcome simulate(const Graph& g, const std::vector<int>& seeds,
                          const DiffusionConfig& cfg);

/// Snapshot wire format: {"seeds": [...], "infected": [...], "steps": n,
/// "hit_target": b} with node labels, so snapshots replay across loads.
std::string snapshot_to_json(const Graph& g, const InfectionOutcome& outcome);
InfectionOutcome snapshot_from_json(const Graph& g, const std::string& text);

} // namespace msd
