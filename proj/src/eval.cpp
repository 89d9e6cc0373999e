#include "msd/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <queue>
#include <set>
#include <thread>

#include "msd/detection.hpp"
#include "msd/diffusion.hpp"
#include "msd/errors.hpp"
#include "msd/rng.hpp"

namespace msd {

EvalResult f1_score(const std::vector<int>& detected, const std::vector<int>& truth) {
    const std::set<int> t(truth.begin(), truth.end());
    if (t.empty()) throw MsdError("f1_score: empty truth set");
    const std::set<int> d(detected.begin(), detected.end());

    std::size_t hit = 0;
    for (int u : d) hit += t.count(u);

    EvalResult r;
    r.precision = d.empty() ? 0.0 : static_cast<double>(hit) / d.size();
    r.recall = static_cast<double>(hit) / t.size();
    r.f1 = (r.precision + r.recall > 0.0)
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

double error_distance(const Graph& g, const std::vector<int>& detected,
                      const std::vector<int>& truth) {
    std::vector<int> dist(g.num_nodes(), -1);
    std::queue<int> q;
    for (int s : truth)
        if (dist[s] < 0) {
            dist[s] = 0;
            q.push(s);
        }
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : g.neighbors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    double sum = 0.0;
    int n = 0;
    for (int u : detected)
        if (dist[u] >= 0) {
            sum += dist[u];
            ++n;
        }
    return n > 0 ? sum / n : -1.0;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errors;
    if (cfg.networks.empty()) errors.push_back("networks: at least one required");
    for (const auto& net : cfg.networks) {
        if (net.name.empty()) errors.push_back("networks: every entry needs a name");
        if (!std::filesystem::exists(net.edge_list_path))
            errors.push_back("networks: missing edge list '" + net.edge_list_path + "'");
    }
    if (cfg.k_values.empty()) errors.push_back("k_values: at least one required");
    for (int k : cfg.k_values)
        if (k < 1) errors.push_back("k_values: counts must be >= 1");
    if (cfg.replicates < 1) errors.push_back("replicates: must be >= 1");
    if (!(cfg.infection_prob >= 0.0 && cfg.infection_prob <= 1.0))
        errors.push_back("infection_prob: must lie in [0, 1]");
    if (!(cfg.target_fraction > 0.0 && cfg.target_fraction <= 1.0))
        errors.push_back("target_fraction: must lie in (0, 1]");
    if (cfg.methods.empty()) errors.push_back("methods: at least one required");
    for (const auto& m : cfg.methods)
        if (m != "link" && m != "louvain" && m != "eigen")
            errors.push_back("methods: unknown method '" + m + "'");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) errors.push_back("alpha: must lie in (0, 1)");
    if (cfg.min_cluster_size < 1) errors.push_back("min_cluster_size: must be >= 1");
    if (cfg.threads < 0) errors.push_back("threads: must be >= 0");
    return errors;
}

namespace {

constexpr int kMaxResampleAttempts = 20;

struct MethodOutcome {
    double f1 = 0.0, precision = 0.0, recall = 0.0;
    int k_detected = 0;
    double runtime_ms = 0.0;
    double err_dist = 0.0;
    bool failed = false;
    std::string diagnostic;
};

struct CellOutcome {
    std::vector<MethodOutcome> methods;
    int resamples = 0;
    bool simulation_failed = false;
    std::string diagnostic;
};

// One (network, K, replicate) cell: simulate once, score every method.
CellOutcome run_cell(const Graph& g, const ExperimentConfig& cfg, std::size_t net_idx, int k,
                     std::size_t k_idx, int replicate) {
    CellOutcome cell;
    cell.methods.resize(cfg.methods.size());

    const std::uint64_t rep_seed =
        mix_seed(mix_seed(mix_seed(cfg.master_seed, net_idx), k_idx), replicate);

    InfectionOutcome outcome;
    bool simulated = false;
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const std::uint64_t attempt_seed = mix_seed(rep_seed, attempt);
        try {
            Rng rng(attempt_seed);
            const std::vector<int> seeds = select_seeds(g, k, rng);
            DiffusionConfig dc;
            dc.infection_prob = cfg.infection_prob;
            dc.target_fraction = cfg.target_fraction;
            dc.seed = attempt_seed;
            outcome = simulate(g, seeds, dc);
        } catch (const MsdError& e) {
            cell.simulation_failed = true;
            cell.diagnostic = e.what();
            break;
        }
        if (outcome.hit_target) {
            simulated = true;
            break;
        }
        ++cell.resamples; // redraw with a fresh derived seed
    }
    if (!simulated) {
        if (!cell.simulation_failed) {
            cell.simulation_failed = true;
            cell.diagnostic = "simulation never reached the target fraction in " +
                              std::to_string(kMaxResampleAttempts) + " attempts";
        }
        for (auto& m : cell.methods) {
            m.failed = true;
            m.diagnostic = cell.diagnostic;
        }
        return cell;
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        MethodOutcome& m = cell.methods[mi];
        DetectOptions opts;
        opts.clusterer = cfg.methods[mi];
        opts.alpha = cfg.alpha;
        opts.min_cluster_size = cfg.min_cluster_size;
        opts.seed = mix_seed(rep_seed, 1000 + mi);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const DetectionResult det = detect(g, outcome.infected, opts);
            const auto t1 = std::chrono::steady_clock::now();
            m.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            const EvalResult score = f1_score(det.detected_sources, outcome.seeds);
            m.f1 = score.f1;
            m.precision = score.precision;
            m.recall = score.recall;
            m.k_detected = det.k_detected;
            m.err_dist = error_distance(g, det.detected_sources, outcome.seeds);
        } catch (const MsdError& e) {
            m.failed = true;
            m.diagnostic = e.what();
        }
    }
    return cell;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    {
        const std::vector<std::string> errors = validate_config(cfg);
        if (!errors.empty()) {
            std::string joined = "invalid experiment config:";
            for (const auto& e : errors) joined += "\n  - " + e;
            throw MsdError(joined);
        }
    }

    std::vector<Graph> graphs;
    graphs.reserve(cfg.networks.size());
    for (const auto& net : cfg.networks) graphs.push_back(load_edge_list_file(net.edge_list_path));

    struct Cell {
        std::size_t net_idx;
        std::size_t k_idx;
        int replicate;
    };
    std::vector<Cell> cells;
    for (std::size_t ni = 0; ni < cfg.networks.size(); ++ni)
        for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki)
            for (int r = 0; r < cfg.replicates; ++r) cells.push_back({ni, ki, r});

    std::vector<CellOutcome> outcomes(cells.size());
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cells.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            outcomes[i] = run_cell(graphs[c.net_idx], cfg, c.net_idx, cfg.k_values[c.k_idx],
                                   c.k_idx, c.replicate);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // deterministic assembly: network, method, K, replicate
    ExperimentSummary out;
    auto cell_index = [&](std::size_t ni, std::size_t ki, int r) {
        return (ni * cfg.k_values.size() + ki) * static_cast<std::size_t>(cfg.replicates) + r;
    };
    for (std::size_t ni = 0; ni < cfg.networks.size(); ++ni) {
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
                SummaryRow srow;
                srow.network = cfg.networks[ni].name;
                srow.method = cfg.methods[mi];
                srow.k = cfg.k_values[ki];
                double sum_f1 = 0.0, sum_k = 0.0, sum_rt = 0.0;
                std::vector<double> f1s;
                for (int r = 0; r < cfg.replicates; ++r) {
                    const CellOutcome& cell = outcomes[cell_index(ni, ki, r)];
                    const MethodOutcome& m = cell.methods[mi];
                    ReplicateRow row;
                    row.network = srow.network;
                    row.method = srow.method;
                    row.k = srow.k;
                    row.replicate = r;
                    row.failed = m.failed;
                    row.diagnostic = m.diagnostic;
                    if (!m.failed) {
                        row.f1 = m.f1;
                        row.precision = m.precision;
                        row.recall = m.recall;
                        row.k_detected = m.k_detected;
                        row.runtime_ms = m.runtime_ms;
                        row.err_dist = m.err_dist;
                        sum_f1 += m.f1;
                        sum_k += m.k_detected;
                        sum_rt += m.runtime_ms;
                        f1s.push_back(m.f1);
                        ++srow.n;
                    } else {
                        ++srow.failed;
                    }
                    out.replicates.push_back(std::move(row));
                }
                if (srow.n > 0) {
                    srow.f1_mean = sum_f1 / srow.n;
                    srow.k_detected_mean = sum_k / srow.n;
                    srow.runtime_ms_mean = sum_rt / srow.n;
                    double ss = 0.0;
                    for (double f : f1s) ss += (f - srow.f1_mean) * (f - srow.f1_mean);
                    srow.f1_sd = srow.n > 1 ? std::sqrt(ss / (srow.n - 1)) : 0.0;
                }
                out.summary.push_back(std::move(srow));
            }
        }
    }
    for (const CellOutcome& cell : outcomes) {
        out.resamples += cell.resamples;
        for (const MethodOutcome& m : cell.methods)
            if (m.failed) ++out.failed_cells;
    }
    return out;
}

namespace {

std::string fmt(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

} // namespace

void write_replicate_csv(const ExperimentSummary& s, std::ostream& out, bool err_dist) {
    out << "network,method,K,replicate,f1,precision,recall,k_detected,runtime_ms";
    if (err_dist) out << ",err_dist";
    out << "\n";
    for (const ReplicateRow& r : s.replicates) {
        if (r.failed) continue;
        out << r.network << ',' << r.method << ',' << r.k << ',' << r.replicate << ','
            << fmt(r.f1, 6) << ',' << fmt(r.precision, 6) << ',' << fmt(r.recall, 6) << ','
            << r.k_detected << ',' << fmt(r.runtime_ms, 3);
        if (err_dist) out << ',' << fmt(r.err_dist, 4);
        out << "\n";
    }
}

void write_summary_csv(const ExperimentSummary& s, std::ostream& out) {
    out << "network,method,K,n,f1_mean,f1_sd,k_detected_mean,runtime_ms_mean\n";
    for (const SummaryRow& r : s.summary)
        out << r.network << ',' << r.method << ',' << r.k << ',' << r.n << ','
            << fmt(r.f1_mean, 6) << ',' << fmt(r.f1_sd, 6) << ',' << fmt(r.k_detected_mean, 4)
            << ',' << fmt(r.runtime_ms_mean, 3) << "\n";
}

} // namespace msd
