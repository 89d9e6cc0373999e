#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msd/linalg.hpp"

namespace msd {

/// Undirected simple graph. Node labels are arbitrary strings mapped to
/// dense indices 0..N-1 in sorted label order, so the same input always
/// produces the same indexing. No self-loops, no duplicate edges,
/// adjacency lists sorted and symmetric.
class Graph {
public:
    Graph() = default;

    int num_nodes() const { return static_cast<int>(adj_.size()); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<int>& neighbors(int u) const { return adj_[u]; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    int degree(int u) const { return static_cast<int>(adj_[u].size()); }
    bool has_edge(int u, int v) const;

    /// Edges as (u, v) index pairs with u < v, sorted ascending.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    const std::string& label(int u) const { return labels_[u]; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Index for a label; throws MsdError if the label is unknown.
    int index_of(const std::string& label) const;
    std::optional<int> find(const std::string& label) const;

    // Ingestion bookkeeping, kept so directed-input conventions can be
    // reported alongside the symmetrized graph.
    std::size_t self_loops_dropped() const { return self_loops_dropped_; }
    std::size_t duplicates_collapsed() const { return duplicates_collapsed_; }
    std::size_t raw_directed_edges() const { return raw_directed_edges_; }

    friend class GraphBuilder;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::pair<int, int>> edges_;
    std::size_t self_loops_dropped_ = 0;
    std::size_t duplicates_collapsed_ = 0;
    std::size_t raw_directed_edges_ = 0;
};

/// Accumulates labeled nodes and edges, then freezes them into a Graph.
/// Reciprocal directed pairs and repeats collapse to one undirected edge;
/// self-loops are dropped and counted.
class GraphBuilder {
public:
    void add_node(const std::string& label);
    void add_edge(const std::string& a, const std::string& b);
    Graph build() const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::pair<std::string, std::string>> raw_edges_;
};

struct LoadOptions {
    std::string comment_prefix = "#";
    std::optional<char> delimiter; // unset: any whitespace run
};

/// Reads an edge list (one edge per line, two node labels). Throws
/// ParseError with the offending line number on malformed lines and
/// MsdError on empty input.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {});
Graph load_edge_list_file(const std::string& path, const LoadOptions& options = {});

/// Writes one "labelA labelB" line per edge, canonical order. Loading the
/// output reproduces the graph.
void write_edge_list(const Graph& g, std::ostream& out);

/// Subgraph induced by a node subset, with edges indexed in a fixed order
/// (sorted by endpoint indices) as required by edge clustering.
struct InfectedSubnetwork {
    std::vector<int> nodes;                 // original indices, ascending
    std::vector<int> local_of;              // original index -> local, -1 if absent
    std::vector<std::pair<int, int>> edges; // local pairs, u < v, sorted
    std::vector<std::vector<int>> adj;      // local adjacency, sorted

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    std::size_t num_edges() const { return edges.size(); }
};

InfectedSubnetwork induced_subgraph(const Graph& g, const std::vector<int>& keep);

/// Uninfected nodes adjacent to at least one infected node, ascending.
std::vector<int> boundary_nodes(const Graph& g, const std::vector<int>& infected);

/// Extended infected network: infected nodes plus the uninfected boundary,
/// with the subgraph induced on their union (boundary-boundary edges
/// included). Row order is infected ascending, then boundary ascending;
/// label matrices use this row order.
struct ExtendedNetwork {
    std::vector<int> rows;   // row -> original index
    std::vector<int> row_of; // original index -> row, -1 if absent
    int n_infected = 0;      // rows [0, n_infected) are infected
    std::vector<std::vector<int>> adj; // row-space adjacency
    std::size_t num_edges = 0;

    int size() const { return static_cast<int>(rows.size()); }
};

ExtendedNetwork extended_network(const Graph& g, const std::vector<int>& infected);

/// Symmetrically normalized adjacency D^{-1/2} W D^{-1/2} in CSR form.
/// Zero-degree nodes get all-zero rows. Eigenvalues lie in [-1, 1].
struct NormalizedAdjacency {
    int n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static NormalizedAdjacency from_adjacency(const std::vector<std::vector<int>>& adj);
    static NormalizedAdjacency from_graph(const Graph& g);

    /// out = A * x (multi-column dense).
    void multiply(const DenseMatrix& x, DenseMatrix& out) const;
    double entry(int i, int j) const;
};

struct GraphStats {
    int n_nodes = 0;
    std::size_t n_edges = 0;
    double avg_degree = 0.0; // 2M / N
    double density = 0.0;    // M / (N (N - 1))
};

/// Requires N >= 2 (density undefined otherwise).
GraphStats stats(const Graph& g);

} // namespace msd
