#include "msd/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "msd/errors.hpp"

namespace msd {

namespace {

// Exact Jaccard of inclusive neighborhoods as a reduced fraction, so the
// dendrogram sweep can group equal similarities without float surprises.
struct Similarity {
    int num = 0;
    int den = 1;
};

Similarity similarity_parts(const InfectedSubnetwork& gi, std::size_t m1, std::size_t m2) {
    const auto [a1, b1] = gi.edges[m1];
    const auto [a2, b2] = gi.edges[m2];

    int shared = -1;
    int x = -1, y = -1;
    int count = 0;
    if (a1 == a2 || a1 == b2) {
        shared = a1;
        x = b1;
        ++count;
    }
    if (b1 == a2 || b1 == b2) {
        shared = b1;
        x = a1;
        ++count;
    }
    if (count != 1)
        throw MsdError("edge similarity requires edges sharing exactly one endpoint");
    y = (a2 == shared) ? b2 : a2;

    // inclusive neighborhoods {x} ∪ adj(x), {y} ∪ adj(y); both sorted
    const auto& nx = gi.adj[x];
    const auto& ny = gi.adj[y];
    int inter = 0;
    std::size_t i = 0, j = 0;
    while (i < nx.size() && j < ny.size()) {
        if (nx[i] == ny[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (nx[i] < ny[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    // account for the self elements: x ∈ n+(x) intersects n+(y) iff y~x or x==y
    // (x != y here since the edges are distinct and share only the keystone)
    if (std::binary_search(ny.begin(), ny.end(), x)) ++inter;
    if (std::binary_search(nx.begin(), nx.end(), y)) ++inter;
    const int uni = static_cast<int>(nx.size() + 1 + ny.size() + 1) - inter;
    const int g = std::gcd(inter, uni);
    return {inter / g, uni / g};
}

struct EdgePair {
    Similarity sim;
    int m1;
    int m2;
};

// descending similarity, ties by the smaller edge-index pair
bool pair_order(const EdgePair& a, const EdgePair& b) {
    const long long lhs = static_cast<long long>(a.sim.num) * b.sim.den;
    const long long rhs = static_cast<long long>(b.sim.num) * a.sim.den;
    if (lhs != rhs) return lhs > rhs;
    if (a.m1 != b.m1) return a.m1 < b.m1;
    return a.m2 < b.m2;
}

bool same_similarity(const Similarity& a, const Similarity& b) {
    return static_cast<long long>(a.num) * b.den == static_cast<long long>(b.num) * a.den;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Partition density of the edge partition given by union-find roots.
// Clusters spanning ≤ 2 nodes contribute 0.
double sweep_density(const InfectedSubnetwork& gi, UnionFind& uf, int& n_clusters,
                     std::vector<int>& root_to_cluster, std::vector<int>& node_token,
                     int& token) {
    const std::size_t m = gi.edges.size();
    std::fill(root_to_cluster.begin(), root_to_cluster.end(), -1);
    n_clusters = 0;
    std::vector<int> cluster_edges;
    for (std::size_t e = 0; e < m; ++e) {
        const int r = uf.find(static_cast<int>(e));
        if (root_to_cluster[r] < 0) root_to_cluster[r] = n_clusters++;
    }
    std::vector<int> m_c(n_clusters, 0), n_c(n_clusters, 0);
    std::vector<std::vector<int>> buckets(n_clusters);
    for (std::size_t e = 0; e < m; ++e)
        buckets[root_to_cluster[uf.find(static_cast<int>(e))]].push_back(static_cast<int>(e));
    for (int c = 0; c < n_clusters; ++c) {
        ++token;
        for (int e : buckets[c]) {
            ++m_c[c];
            for (int u : {gi.edges[e].first, gi.edges[e].second}) {
                if (node_token[u] != token) {
                    node_token[u] = token;
                    ++n_c[c];
                }
            }
        }
    }
    double d = 0.0;
    for (int c = 0; c < n_clusters; ++c) {
        if (n_c[c] <= 2) continue;
        d += m_c[c] * (m_c[c] - (n_c[c] - 1.0)) / ((n_c[c] - 2.0) * (n_c[c] - 1.0));
    }
    return 2.0 * d / static_cast<double>(m);
}

} // namespace

double edge_similarity(const InfectedSubnetwork& gi, std::size_t m1, std::size_t m2) {
    if (m1 >= gi.edges.size() || m2 >= gi.edges.size() || m1 == m2)
        throw MsdError("invalid edge index pair for similarity");
    const Similarity s = similarity_parts(gi, m1, m2);
    return static_cast<double>(s.num) / s.den;
}

EdgeClusterAssignment link_communities(const InfectedSubnetwork& gi, int min_cluster_size) {
    const std::size_t m = gi.edges.size();
    if (m == 0) throw MsdError("no infected edges");
    if (min_cluster_size < 1) throw MsdError("min_cluster_size must be at least 1");

    // incident edge lists give every adjacent edge pair exactly once
    std::vector<std::vector<int>> incident(gi.num_nodes());
    for (std::size_t e = 0; e < m; ++e) {
        incident[gi.edges[e].first].push_back(static_cast<int>(e));
        incident[gi.edges[e].second].push_back(static_cast<int>(e));
    }
    std::vector<EdgePair> pairs;
    for (int w = 0; w < gi.num_nodes(); ++w) {
        const auto& inc = incident[w];
        for (std::size_t i = 0; i < inc.size(); ++i)
            for (std::size_t j = i + 1; j < inc.size(); ++j) {
                const int lo = std::min(inc[i], inc[j]);
                const int hi = std::max(inc[i], inc[j]);
                pairs.push_back({similarity_parts(gi, lo, hi), lo, hi});
            }
    }
    std::sort(pairs.begin(), pairs.end(), pair_order);

    // sweep dendrogram levels: one level per distinct similarity value
    UnionFind uf(m);
    std::vector<int> root_to_cluster(m), node_token(gi.num_nodes(), -1);
    int token = 0;

    struct Level {
        std::size_t pairs_applied;
        double density;
        int clusters;
    };
    std::vector<Level> levels;
    int clusters = static_cast<int>(m);
    levels.push_back({0, 0.0, clusters}); // all singletons: density 0 by convention

    std::size_t p = 0;
    while (p < pairs.size()) {
        std::size_t q = p;
        while (q < pairs.size() && same_similarity(pairs[q].sim, pairs[p].sim)) {
            uf.unite(pairs[q].m1, pairs[q].m2);
            ++q;
        }
        const double d = sweep_density(gi, uf, clusters, root_to_cluster, node_token, token);
        levels.push_back({q, d, clusters});
        p = q;
    }

    double best_density = 0.0;
    for (const auto& lvl : levels) best_density = std::max(best_density, lvl.density);
    std::size_t chosen = 0;
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i].density >= best_density - 1e-12) chosen = i; // last qualifying: fewest clusters

    // replay merges up to the chosen level
    UnionFind cut(m);
    for (std::size_t i = 0; i < levels[chosen].pairs_applied; ++i)
        cut.unite(pairs[i].m1, pairs[i].m2);

    struct Cluster {
        std::vector<int> edges;
    };
    std::vector<int> root_first(m, -1);
    std::vector<Cluster> comps;
    for (std::size_t e = 0; e < m; ++e) {
        const int r = cut.find(static_cast<int>(e));
        if (root_first[r] < 0) {
            root_first[r] = static_cast<int>(comps.size());
            comps.push_back({});
        }
        comps[root_first[r]].edges.push_back(static_cast<int>(e));
    }

    std::vector<int> retained;
    for (int c = 0; c < static_cast<int>(comps.size()); ++c)
        if (static_cast<int>(comps[c].edges.size()) >= min_cluster_size) retained.push_back(c);
    if (retained.empty()) throw AllNoiseError("all edges noise; lower min_cluster_size");

    std::sort(retained.begin(), retained.end(), [&](int a, int b) {
        if (comps[a].edges.size() != comps[b].edges.size())
            return comps[a].edges.size() > comps[b].edges.size();
        return comps[a].edges.front() < comps[b].edges.front();
    });

    EdgeClusterAssignment out;
    out.method = "link";
    out.labels.assign(m, kNoiseLabel);
    out.k = static_cast<int>(retained.size());
    for (int rank = 0; rank < out.k; ++rank)
        for (int e : comps[retained[rank]].edges) out.labels[e] = rank + 1;
    return out;
}

double partition_density(const InfectedSubnetwork& gi, const EdgeClusterAssignment& assignment) {
    const std::size_t m = gi.edges.size();
    if (assignment.labels.size() != m)
        throw MsdError("assignment does not cover the edge list");
    if (m == 0) return 0.0;

    std::vector<int> m_c(assignment.k + 1, 0), n_c(assignment.k + 1, 0);
    std::vector<int> node_token(gi.num_nodes(), -1);
    for (int c = 1; c <= assignment.k; ++c) {
        for (std::size_t e = 0; e < m; ++e) {
            if (assignment.labels[e] != c) continue;
            ++m_c[c];
            for (int u : {gi.edges[e].first, gi.edges[e].second}) {
                if (node_token[u] != c) {
                    node_token[u] = c;
                    ++n_c[c];
                }
            }
        }
    }
    double d = 0.0;
    for (int c = 1; c <= assignment.k; ++c) {
        if (n_c[c] <= 2) continue;
        d += m_c[c] * (m_c[c] - (n_c[c] - 1.0)) / ((n_c[c] - 2.0) * (n_c[c] - 1.0));
    }
    return 2.0 * d / static_cast<double>(m);
}

MembershipMatrix membership(const InfectedSubnetwork& gi, const EdgeClusterAssignment& assignment) {
    if (assignment.labels.size() != gi.edges.size())
        throw MsdError("edge assignment does not match the subnetwork edge list");
    MembershipMatrix b;
    b.rows = gi.num_nodes();
    b.cols = assignment.k;
    b.data.assign(static_cast<std::size_t>(b.rows) * b.cols, 0);
    for (std::size_t e = 0; e < gi.edges.size(); ++e) {
        const int label = assignment.labels[e];
        if (label == kNoiseLabel) continue;
        b.set(gi.edges[e].first, label - 1);
        b.set(gi.edges[e].second, label - 1);
    }
    return b;
}

void write_cluster_csv(const Graph& g, const InfectedSubnetwork& gi,
                       const EdgeClusterAssignment& assignment, std::ostream& out) {
    if (assignment.labels.size() != gi.edges.size())
        throw MsdError("edge assignment does not match the subnetwork edge list");
    out << "edge_src,edge_dst,cluster\n";
    for (std::size_t e = 0; e < gi.edges.size(); ++e)
        out << g.label(gi.nodes[gi.edges[e].first]) << ','
            << g.label(gi.nodes[gi.edges[e].second]) << ',' << assignment.labels[e] << "\n";
}

void write_cluster_csv(const Graph& g, const InfectedSubnetwork& gi,
                       const NodeClusterAssignment& assignment, std::ostream& out) {
    if (static_cast<int>(assignment.labels.size()) != gi.num_nodes())
        throw MsdError("node assignment does not match the subnetwork node count");
    out << "node,cluster\n";
    for (int i = 0; i < gi.num_nodes(); ++i)
        out << g.label(gi.nodes[i]) << ',' << assignment.labels[i] << "\n";
}

MembershipMatrix membership(const InfectedSubnetwork& gi, const NodeClusterAssignment& assignment) {
    if (static_cast<int>(assignment.labels.size()) != gi.num_nodes())
        throw MsdError("node assignment does not match the subnetwork node count");
    MembershipMatrix b;
    b.rows = gi.num_nodes();
    b.cols = assignment.k;
    b.data.assign(static_cast<std::size_t>(b.rows) * b.cols, 0);
    for (int i = 0; i < b.rows; ++i) {
        const int label = assignment.labels[i];
        if (label < 1 || label > assignment.k)
            throw MsdError("node cluster label out of range");
        b.set(i, label - 1);
    }
    return b;
}

} // namespace msd
