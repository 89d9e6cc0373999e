#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "msd/detection.hpp"
#include "msd/diffusion.hpp"
#include "msd/errors.hpp"
#include "msd/eval.hpp"
#include "msd/graph.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitParse = 2;

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw msd::MsdError("cannot open output file '" + path + "'");
    out << text << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw msd::MsdError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double round_to(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

int cmd_stats(const std::string& edge_list) {
    const msd::Graph g = msd::load_edge_list_file(edge_list);
    const msd::GraphStats s = msd::stats(g);
    nlohmann::json j;
    j["nodes"] = s.n_nodes;
    j["edges"] = s.n_edges;
    j["avg_degree"] = round_to(s.avg_degree, 2);
    j["density"] = round_to(s.density, 4);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string edge_list;
    int k = 1;
    double p = 0.2;
    double fraction = 0.10;
    std::uint64_t seed = 1;
    std::size_t max_steps = 0;
    std::string output;
};

int cmd_simulate(const SimulateArgs& a) {
    const msd::Graph g = msd::load_edge_list_file(a.edge_list);
    msd::Rng rng(a.seed);
    const std::vector<int> seeds = msd::select_seeds(g, a.k, rng);
    msd::DiffusionConfig cfg;
    cfg.infection_prob = a.p;
    cfg.target_fraction = a.fraction;
    cfg.max_steps = a.max_steps;
    cfg.seed = a.seed;
    const msd::InfectionOutcome outcome = msd::simulate(g, seeds, cfg);
    write_output(msd::snapshot_to_json(g, outcome), a.output);
    return 0;
}

struct DetectArgs {
    std::string edge_list;
    std::string snapshot;
    msd::DetectOptions options;
    std::string output;
    std::string dump_clusters;
};

int cmd_detect(const DetectArgs& a) {
    const msd::Graph g = msd::load_edge_list_file(a.edge_list);
    const msd::InfectionOutcome snap = msd::snapshot_from_json(g, read_file(a.snapshot));
    msd::DetectionArtifacts artifacts;
    const bool want_dump = !a.dump_clusters.empty();
    const msd::DetectionResult result =
        msd::detect(g, snap.infected, a.options, want_dump ? &artifacts : nullptr);
    if (want_dump) {
        std::ofstream out(a.dump_clusters);
        if (!out) throw msd::MsdError("cannot open output file '" + a.dump_clusters + "'");
        if (a.options.clusterer == "link" && !artifacts.edge_clusters.labels.empty())
            msd::write_cluster_csv(g, artifacts.gi, artifacts.edge_clusters, out);
        else
            msd::write_cluster_csv(g, artifacts.gi, artifacts.node_clusters, out);
    }
    write_output(msd::detection_to_json(result, g), a.output);
    return 0;
}

// Config JSON -> ExperimentConfig, collecting every problem instead of
// stopping at the first.
msd::ExperimentConfig load_config(const std::string& path, std::vector<std::string>& errors) {
    msd::ExperimentConfig cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw msd::ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw msd::ParseError("config: top level must be an object");

    static const std::set<std::string> known = {
        "networks",  "k_values", "replicates",  "infection_prob", "target_fraction",
        "methods",   "alpha",    "min_cluster_size", "master_seed", "output_dir",
        "threads",   "emit_err_dist"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) errors.push_back("config: unknown field '" + key + "'");

    auto take = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        try {
            slot = j.at(key).template get<std::decay_t<decltype(slot)>>();
        } catch (const nlohmann::json::exception&) {
            errors.push_back(std::string("config: field '") + key + "' has the wrong type");
        }
    };
    if (j.contains("networks")) {
        if (!j["networks"].is_array()) {
            errors.push_back("config: 'networks' must be an array");
        } else {
            for (const auto& item : j["networks"]) {
                msd::NetworkSpec spec;
                if (!item.is_object() || !item.contains("name") ||
                    !item.contains("edge_list_path")) {
                    errors.push_back("config: network entries need name and edge_list_path");
                    continue;
                }
                spec.name = item["name"].get<std::string>();
                spec.edge_list_path = item["edge_list_path"].get<std::string>();
                cfg.networks.push_back(std::move(spec));
            }
        }
    }
    take("k_values", cfg.k_values);
    take("replicates", cfg.replicates);
    take("infection_prob", cfg.infection_prob);
    take("target_fraction", cfg.target_fraction);
    take("methods", cfg.methods);
    take("alpha", cfg.alpha);
    take("min_cluster_size", cfg.min_cluster_size);
    take("master_seed", cfg.master_seed);
    take("output_dir", cfg.output_dir);
    take("threads", cfg.threads);
    take("emit_err_dist", cfg.emit_err_dist);
    return cfg;
}

struct ExperimentArgs {
    std::string config_path;
    int threads = -1;          // -1: keep config value
    std::string output_dir;    // empty: keep config value
};

int cmd_experiment(const ExperimentArgs& a) {
    std::vector<std::string> errors;
    msd::ExperimentConfig cfg = load_config(a.config_path, errors);
    if (a.threads >= 0) cfg.threads = a.threads;
    if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
    if (const char* env = std::getenv("MSD_SEED")) {
        try {
            std::size_t pos = 0;
            cfg.master_seed = std::stoull(env, &pos);
            if (pos != std::string(env).size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            errors.push_back("MSD_SEED: not an unsigned integer");
        }
    }
    for (const std::string& e : msd::validate_config(cfg)) errors.push_back(e);
    if (!errors.empty()) {
        for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
        return kExitParse;
    }

    const msd::ExperimentSummary summary = msd::run_experiment(cfg);

    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream rep(std::filesystem::path(cfg.output_dir) / "replicates.csv");
        msd::write_replicate_csv(summary, rep, cfg.emit_err_dist);
        std::ofstream sum(std::filesystem::path(cfg.output_dir) / "summary.csv");
        msd::write_summary_csv(summary, sum);
    }

    std::cout << std::left << std::setw(16) << "network" << std::setw(10) << "method"
              << std::right << std::setw(4) << "K" << std::setw(6) << "n" << std::setw(10)
              << "f1_mean" << std::setw(10) << "f1_sd" << std::setw(10) << "k_mean"
              << std::setw(12) << "ms_mean" << "\n";
    for (const msd::SummaryRow& r : summary.summary) {
        std::cout << std::left << std::setw(16) << r.network << std::setw(10) << r.method
                  << std::right << std::setw(4) << r.k << std::setw(6) << r.n << std::fixed
                  << std::setprecision(4) << std::setw(10) << r.f1_mean << std::setw(10)
                  << r.f1_sd << std::setw(10) << r.k_detected_mean << std::setprecision(2)
                  << std::setw(12) << r.runtime_ms_mean << "\n";
        std::cout.unsetf(std::ios::fixed);
    }
    if (summary.resamples > 0)
        std::cout << "resampled " << summary.resamples
                  << " simulation(s) that missed the target fraction\n";
    if (summary.failed_cells > 0) {
        std::cerr << summary.failed_cells << " replicate cell(s) failed:\n";
        int shown = 0;
        for (const msd::ReplicateRow& r : summary.replicates) {
            if (!r.failed || shown >= 5) continue;
            std::cerr << "  " << r.network << "/" << r.method << "/K=" << r.k << "/rep"
                      << r.replicate << ": " << r.diagnostic << "\n";
            ++shown;
        }
        return kExitRuntime;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiple-source detection on diffusion networks"};
    app.require_subcommand(1);

    std::string stats_path;
    CLI::App* stats = app.add_subcommand("stats", "basic statistics of an edge list");
    stats->add_option("edge_list", stats_path, "edge list file")->required();

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "run one seeded SI diffusion");
    simulate->add_option("edge_list", sim.edge_list, "edge list file")->required();
    simulate->add_option("-k,--sources", sim.k, "number of seed nodes")->default_val(1);
    simulate->add_option("-p,--infection-prob", sim.p, "per-contact infection probability")
        ->default_val(0.2);
    simulate->add_option("-f,--target-fraction", sim.fraction, "stop once this fraction is exceeded")
        ->default_val(0.10);
    simulate->add_option("--seed", sim.seed, "rng seed")->default_val(1);
    simulate->add_option("--max-steps", sim.max_steps, "step cap (0: 10x node count)")
        ->default_val(0);
    simulate->add_option("-o,--output", sim.output, "snapshot path (default stdout)");

    DetectArgs det;
    CLI::App* detect = app.add_subcommand("detect", "detect sources from a snapshot");
    detect->add_option("edge_list", det.edge_list, "edge list file")->required();
    detect->add_option("snapshot", det.snapshot, "snapshot JSON from simulate")->required();
    detect->add_option("--clusterer", det.options.clusterer, "link | louvain | eigen")
        ->check(CLI::IsMember({"link", "louvain", "eigen"}))
        ->default_val("link");
    detect->add_option("--alpha", det.options.alpha, "propagation weight")->default_val(0.5);
    detect->add_option("--tol", det.options.tol, "iterative fallback tolerance")
        ->default_val(1e-10);
    detect->add_option("--min-cluster-size", det.options.min_cluster_size,
                       "edge clusters smaller than this become noise")
        ->default_val(3);
    detect->add_option("--seed", det.options.seed, "rng seed (louvain visit order)")
        ->default_val(1);
    detect->add_option("-o,--output", det.output, "report path (default stdout)");
    detect->add_option("--dump-clusters", det.dump_clusters,
                       "write the cluster assignment CSV to this path");

    ExperimentArgs exp;
    CLI::App* experiment = app.add_subcommand("experiment", "Monte-Carlo evaluation sweep");
    experiment->add_option("config", exp.config_path, "experiment config JSON")->required();
    experiment->add_option("--threads", exp.threads, "worker cap (0: all cores)");
    experiment->add_option("--output-dir", exp.output_dir, "override config output_dir");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) return cmd_stats(stats_path);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (detect->parsed()) return cmd_detect(det);
        if (experiment->parsed()) return cmd_experiment(exp);
    } catch (const msd::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
