#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "msd/graph.hpp"
#include "msd/rng.hpp"

namespace msd {

/// Edge labels are 1..K for retained clusters, kNoiseLabel for edges that
/// ended up in clusters smaller than min_cluster_size.
inline constexpr int kNoiseLabel = 0;

struct EdgeClusterAssignment {
    std::vector<int> labels; // one per edge of the subnetwork, indexed as its edge list
    int k = 0;               // retained clusters
    std::string method;
};

struct NodeClusterAssignment {
    std::vector<int> labels; // one per local node, 1..K
    int k = 0;
    std::string method;
};

/// Binary node-by-cluster incidence. Under edge clustering a node touches
/// every cluster one of its edges belongs to (mixed membership); under
/// node clustering rows are one-hot.
struct MembershipMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> data; // row-major

    bool at(int i, int k) const { return data[static_cast<std::size_t>(i) * cols + k] != 0; }
    void set(int i, int k) { data[static_cast<std::size_t>(i) * cols + k] = 1; }
};

/// Jaccard similarity of the inclusive neighborhoods {a} ∪ adj(a) of the
/// two non-shared endpoints of a pair of adjacent edges. Defined only for
/// edge pairs sharing exactly one endpoint.
double edge_similarity(const InfectedSubnetwork& gi, std::size_t m1, std::size_t m2);

/// Link-communities edge clustering: single-linkage agglomeration of
/// adjacent edges under edge_similarity, dendrogram cut at the level of
/// maximal partition density (ties resolved toward fewer clusters).
/// Clusters smaller than min_cluster_size become noise; retained clusters
/// are renumbered 1..K by decreasing size. Throws AllNoiseError when
/// nothing survives the size filter.
EdgeClusterAssignment link_communities(const InfectedSubnetwork& gi, int min_cluster_size = 3);

/// D = (2/M) Σ_c m_c (m_c - n_c + 1) / ((n_c - 2)(n_c - 1)) over retained
/// clusters; clusters spanning ≤ 2 nodes and noise edges contribute 0.
double partition_density(const InfectedSubnetwork& gi, const EdgeClusterAssignment& assignment);

/// Greedy modularity optimization with graph aggregation. Node visit order
/// is shuffled by rng; a fixed seed makes the run reproducible.
NodeClusterAssignment louvain(const std::vector<std::vector<int>>& adj, Rng& rng);
NodeClusterAssignment louvain(const Graph& g, Rng& rng);

/// Recursive spectral bisection on the leading eigenvector of the
/// (generalized) modularity matrix; a branch stops when the leading
/// eigenvalue is non-positive or the split does not increase modularity.
NodeClusterAssignment leading_eigenvector(const std::vector<std::vector<int>>& adj);
NodeClusterAssignment leading_eigenvector(const Graph& g);

MembershipMatrix membership(const InfectedSubnetwork& gi, const EdgeClusterAssignment& assignment);
MembershipMatrix membership(const InfectedSubnetwork& gi, const NodeClusterAssignment& assignment);

/// Cluster dump CSVs: edge_src,edge_dst,cluster (noise = 0) for edge
/// assignments; node,cluster for node assignments. Labels, not indices.
void write_cluster_csv(const Graph& g, const InfectedSubnetwork& gi,
                       const EdgeClusterAssignment& assignment, std::ostream& out);
void write_cluster_csv(const Graph& g, const InfectedSubnetwork& gi,
                       const NodeClusterAssignment& assignment, std::ostream& out);

} // namespace msd
