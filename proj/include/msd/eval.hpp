#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "msd/graph.hpp"

namespace msd {

struct EvalResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Set-based precision/recall/F1. Inputs are deduplicated. Empty truth
/// throws; empty detected scores zero across the board.
EvalResult f1_score(const std::vector<int>& detected, const std::vector<int>& truth);

struct NetworkSpec {
    std::string name;
    std::string edge_list_path;
};

struct ExperimentConfig {
    std::vector<NetworkSpec> networks;
    std::vector<int> k_values = {1, 3, 5};
    int replicates = 200;
    double infection_prob = 0.2;
    double target_fraction = 0.10;
    std::vector<std::string> methods = {"link", "louvain", "eigen"};
    double alpha = 0.5;
    int min_cluster_size = 3;
    unsigned long long master_seed = 1;
    std::string output_dir = ".";
    int threads = 0;           // 0: hardware concurrency
    bool emit_err_dist = false; // extra diagnostic column in the replicate CSV
};

/// Validates every field and returns all problems at once (empty = valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

struct ReplicateRow {
    std::string network;
    std::string method;
    int k = 0;
    int replicate = 0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    int k_detected = 0;
    double runtime_ms = 0.0;
    double err_dist = 0.0; // mean distance from detected nodes to the nearest true source
    bool failed = false;
    std::string diagnostic;
};

struct SummaryRow {
    std::string network;
    std::string method;
    int k = 0;
    int n = 0; // retained replicates
    double f1_mean = 0.0;
    double f1_sd = 0.0;
    double k_detected_mean = 0.0;
    double runtime_ms_mean = 0.0;
    int failed = 0;
};

struct ExperimentSummary {
    std::vector<ReplicateRow> replicates; // network, method, K, replicate order
    std::vector<SummaryRow> summary;
    long long resamples = 0; // simulations redrawn for missing the target fraction
    int failed_cells = 0;
};

/// Monte-Carlo sweep: per (network, K, replicate) a seeded simulation is
/// scored by every method. Cells run on a worker pool; assembly order is
/// fixed, so results do not depend on the schedule. All randomness is
/// derived from master_seed (see mix_seed).
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// network,method,K,replicate,f1,precision,recall,k_detected,runtime_ms
/// (plus err_dist when requested). Failed replicates are not written.
void write_replicate_csv(const ExperimentSummary& s, std::ostream& out, bool err_dist = false);

/// network,method,K,n,f1_mean,f1_sd,k_detected_mean,runtime_ms_mean
void write_summary_csv(const ExperimentSummary& s, std::ostream& out);

/// Mean BFS distance in g from each detected node to its nearest true
/// source; diagnostic only.
double error_distance(const Graph& g, const std::vector<int>& detected,
                      const std::vector<int>& truth);

} // namespace msd
