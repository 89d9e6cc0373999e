#pragma once

#include <string>
#include <vector>

#include "msd/clustering.hpp"
#include "msd/graph.hpp"
#include "msd/linalg.hpp"

namespace msd {

/// Node ages over an extended infected network. infected[i] pairs with
/// ext row i, boundary[j] with ext row n_infected + j.
struct AgeVector {
    std::vector<double> infected; // A_u^I = (I_u/O_u)(1 + ln O_u)
    std::vector<double> boundary; // A_v^U = (Σ_{u∈N_I(v)} I_u) / I_v
};

/// Label matrix over extended-network rows; K cluster columns plus one
/// boundary (exoneration) column.
struct LabelMatrix {
    DenseMatrix l;
    double alpha = 0.5;
    int iterations = 0; // set by the iterative propagation
};

struct DetectionResult {
    int k_detected = 0;
    std::vector<int> per_cluster_source; // original node index, one per scored column
    std::vector<int> detected_sources;   // deduplicated, ascending
    std::vector<double> scores;          // normalized score at each argmax
    std::string clusterer;
    double alpha = 0.5;
};

/// Ages for every extended-network row. Natural log. Throws if an infected
/// node is isolated in g (exclude isolated nodes from seeding).
AgeVector compute_ages(const Graph& g, const ExtendedNetwork& ext);

/// L^0 per the initialization rule: infected row i gets A_i^I * B_ik in
/// cluster columns; boundary row gets max A^U - A_i^U in the last column.
/// Throws "no communities detected" when membership has zero columns.
LabelMatrix init_labels(const ExtendedNetwork& ext, const AgeVector& ages,
                        const MembershipMatrix& membership);

/// Fixed-point iteration L^{t+1} = alpha*A*L^t + (1-alpha)*L^0 from L^0.
/// Throws ConvergenceError carrying the residual when max_iter is hit.
LabelMatrix propagate_iterative(const NormalizedAdjacency& adj, const LabelMatrix& l0,
                                double alpha, double tol = 1e-10, int max_iter = 10000);

/// Closed form L* = (1-alpha)(I - alpha*A)^{-1} L^0 via conjugate gradients
/// per column (the system is symmetric positive definite).
LabelMatrix propagate_closed_form(const NormalizedAdjacency& adj, const LabelMatrix& l0,
                                  double alpha);

/// Row-normalizes L*, takes per-column argmax over infected rows (ties to
/// the smallest node index), and deduplicates. Columns whose infected
/// entries are all zero are skipped; all-degenerate input throws.
DetectionResult identify_sources(const LabelMatrix& l_star, const ExtendedNetwork& ext);

struct DetectOptions {
    std::string clusterer = "link"; // link | louvain | eigen
    double alpha = 0.5;
    double tol = 1e-10;
    int min_cluster_size = 3;
    unsigned long long seed = 1; // louvain visit order only
};

/// Intermediate products a caller may want back (cluster dumps, debugging).
struct DetectionArtifacts {
    InfectedSubnetwork gi;
    EdgeClusterAssignment edge_clusters; // populated for the link clusterer
    NodeClusterAssignment node_clusters; // populated for louvain / eigen
};

/// Full pipeline: extended network, clustering on the infected subnetwork,
/// membership, ages, label initialization, propagation (closed form with
/// iterative fallback), source identification. Stage failures are reported
/// with the stage name prefixed.
DetectionResult detect(const Graph& g, const std::vector<int>& infected,
                       const DetectOptions& options = {},
                       DetectionArtifacts* artifacts = nullptr);

/// Report JSON: {k_detected, per_cluster_source, detected_sources, scores,
/// clusterer, alpha} with node labels, not indices.
std::string detection_to_json(const DetectionResult& result, const Graph& g);

} // namespace msd
