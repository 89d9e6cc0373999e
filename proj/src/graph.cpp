#include "msd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "msd/errors.hpp"

namespace msd {

bool Graph::has_edge(int u, int v) const {
    const auto& nbrs = adj_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

int Graph::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw MsdError("unknown node '" + label + "'");
    return it->second;
}

std::optional<int> Graph::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void GraphBuilder::add_node(const std::string& label) {
    nodes_.push_back(label);
}

void GraphBuilder::add_edge(const std::string& a, const std::string& b) {
    raw_edges_.emplace_back(a, b);
}

Graph GraphBuilder::build() const {
    Graph g;

    std::set<std::string> label_set(nodes_.begin(), nodes_.end());
    for (const auto& [a, b] : raw_edges_) {
        label_set.insert(a);
        label_set.insert(b);
    }
    g.labels_.assign(label_set.begin(), label_set.end());
    for (int i = 0; i < static_cast<int>(g.labels_.size()); ++i)
        g.index_[g.labels_[i]] = i;

    std::set<std::pair<int, int>> edge_set;
    for (const auto& [a, b] : raw_edges_) {
        const int u = g.index_.at(a);
        const int v = g.index_.at(b);
        if (u == v) {
            ++g.self_loops_dropped_;
            continue;
        }
        ++g.raw_directed_edges_;
        const auto e = std::minmax(u, v);
        if (!edge_set.insert({e.first, e.second}).second)
            ++g.duplicates_collapsed_;
    }

    g.edges_.assign(edge_set.begin(), edge_set.end());
    g.adj_.resize(g.labels_.size());
    for (const auto& [u, v] : g.edges_) {
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

namespace {

std::vector<std::string> split_tokens(const std::string& line, const std::optional<char>& delim) {
    std::vector<std::string> out;
    if (!delim) {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, *delim)) {
        // trim surrounding whitespace from each field
        const auto b = tok.find_first_not_of(" \t\r");
        const auto e = tok.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : tok.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

Graph load_edge_list(std::istream& in, const LoadOptions& options) {
    GraphBuilder builder;
    std::string line;
    std::size_t line_no = 0;
    std::size_t data_lines = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue; // blank
        if (!options.comment_prefix.empty() &&
            line.compare(first, options.comment_prefix.size(), options.comment_prefix) == 0)
            continue;
        const auto tokens = split_tokens(line, options.delimiter);
        if (tokens.size() != 2 || tokens[0].empty() || tokens[1].empty())
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 node labels, got " +
                             std::to_string(tokens.size()));
        builder.add_edge(tokens[0], tokens[1]);
        ++data_lines;
    }
    if (data_lines == 0) throw MsdError("empty edge list input");
    return builder.build();
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw MsdError("cannot open edge list file '" + path + "'");
    return load_edge_list(in, options);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v] : g.edges())
        out << g.label(u) << ' ' << g.label(v) << '\n';
}

InfectedSubnetwork induced_subgraph(const Graph& g, const std::vector<int>& keep) {
    InfectedSubnetwork sub;
    sub.local_of.assign(g.num_nodes(), -1);

    std::vector<int> sorted_keep(keep);
    std::sort(sorted_keep.begin(), sorted_keep.end());
    sorted_keep.erase(std::unique(sorted_keep.begin(), sorted_keep.end()), sorted_keep.end());
    for (int u : sorted_keep) {
        if (u < 0 || u >= g.num_nodes())
            throw MsdError("unknown node index " + std::to_string(u));
        sub.local_of[u] = static_cast<int>(sub.nodes.size());
        sub.nodes.push_back(u);
    }

    sub.adj.resize(sub.nodes.size());
    for (int lu = 0; lu < sub.num_nodes(); ++lu) {
        const int u = sub.nodes[lu];
        for (int v : g.neighbors(u)) {
            const int lv = sub.local_of[v];
            if (lv < 0) continue;
            sub.adj[lu].push_back(lv);
            if (lu < lv) sub.edges.emplace_back(lu, lv);
        }
    }
    // neighbor lists arrive sorted; edges were emitted in (lu, lv) order
    // which is already the sorted-endpoint order required for indexing
    std::sort(sub.edges.begin(), sub.edges.end());
    return sub;
}

std::vector<int> boundary_nodes(const Graph& g, const std::vector<int>& infected) {
    std::vector<char> is_infected(g.num_nodes(), 0);
    for (int u : infected) {
        if (u < 0 || u >= g.num_nodes())
            throw MsdError("unknown node index " + std::to_string(u));
        is_infected[u] = 1;
    }
    std::vector<int> boundary;
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (is_infected[v]) continue;
        for (int u : g.neighbors(v)) {
            if (is_infected[u]) {
                boundary.push_back(v);
                break;
            }
        }
    }
    return boundary;
}

ExtendedNetwork extended_network(const Graph& g, const std::vector<int>& infected) {
    if (infected.empty()) throw MsdError("empty infection snapshot");

    std::vector<int> sorted_infected(infected);
    std::sort(sorted_infected.begin(), sorted_infected.end());
    sorted_infected.erase(std::unique(sorted_infected.begin(), sorted_infected.end()),
                          sorted_infected.end());

    const std::vector<int> boundary = boundary_nodes(g, sorted_infected);

    ExtendedNetwork ext;
    ext.n_infected = static_cast<int>(sorted_infected.size());
    ext.rows = sorted_infected;
    ext.rows.insert(ext.rows.end(), boundary.begin(), boundary.end());
    ext.row_of.assign(g.num_nodes(), -1);
    for (int r = 0; r < ext.size(); ++r) ext.row_of[ext.rows[r]] = r;

    ext.adj.resize(ext.rows.size());
    for (int r = 0; r < ext.size(); ++r) {
        const int u = ext.rows[r];
        for (int v : g.neighbors(u)) {
            const int rv = ext.row_of[v];
            if (rv < 0) continue;
            ext.adj[r].push_back(rv);
            if (r < rv) ++ext.num_edges;
        }
        std::sort(ext.adj[r].begin(), ext.adj[r].end());
    }
    return ext;
}

NormalizedAdjacency NormalizedAdjacency::from_adjacency(const std::vector<std::vector<int>>& adj) {
    NormalizedAdjacency a;
    a.n = static_cast<int>(adj.size());
    a.row_ptr.assign(a.n + 1, 0);
    std::size_t nnz = 0;
    for (const auto& nbrs : adj) nnz += nbrs.size();
    a.col.reserve(nnz);
    a.val.reserve(nnz);
    for (int i = 0; i < a.n; ++i) {
        const double di = static_cast<double>(adj[i].size());
        for (int j : adj[i]) {
            const double dj = static_cast<double>(adj[j].size());
            a.col.push_back(j);
            a.val.push_back(1.0 / std::sqrt(di * dj));
        }
        a.row_ptr[i + 1] = a.col.size();
    }
    return a;
}

NormalizedAdjacency NormalizedAdjacency::from_graph(const Graph& g) {
    std::vector<std::vector<int>> adj(g.num_nodes());
    for (int u = 0; u < g.num_nodes(); ++u) adj[u] = g.neighbors(u);
    return from_adjacency(adj);
}

void NormalizedAdjacency::multiply(const DenseMatrix& x, DenseMatrix& out) const {
    const int c = x.cols;
    if (out.rows != n || out.cols != c) out = DenseMatrix(n, c);
    for (int i = 0; i < n; ++i) {
        double* row_out = &out.data[static_cast<std::size_t>(i) * c];
        std::fill(row_out, row_out + c, 0.0);
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const double w = val[p];
            const double* row_in = &x.data[static_cast<std::size_t>(col[p]) * c];
            for (int k = 0; k < c; ++k) row_out[k] += w * row_in[k];
        }
    }
}

double NormalizedAdjacency::entry(int i, int j) const {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        if (col[p] == j) return val[p];
    return 0.0;
}

GraphStats stats(const Graph& g) {
    const int n = g.num_nodes();
    if (n < 2) throw MsdError("density undefined for graphs with fewer than 2 nodes");
    GraphStats s;
    s.n_nodes = n;
    s.n_edges = g.num_edges();
    const double m = static_cast<double>(s.n_edges);
    s.avg_degree = 2.0 * m / n;
    s.density = m / (static_cast<double>(n) * (n - 1));
    return s;
}

} // namespace msd
