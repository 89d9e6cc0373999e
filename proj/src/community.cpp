#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "msd/clustering.hpp"
#include "msd/errors.hpp"
#include "msd/linalg.hpp"
#include "msd/rng.hpp"

namespace msd {

namespace {

// Aggregated graph for the Louvain level loop. self[i] holds the doubled
// internal weight A_ii so strengths stay consistent across aggregation.
struct WeightedGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self;
    std::vector<double> strength;
    double total = 0.0; // 2m
};

WeightedGraph from_adjacency(const std::vector<std::vector<int>>& adj) {
    WeightedGraph g;
    g.n = static_cast<int>(adj.size());
    g.adj.resize(g.n);
    g.self.assign(g.n, 0.0);
    g.strength.assign(g.n, 0.0);
    for (int u = 0; u < g.n; ++u)
        for (int v : adj[u]) {
            if (v < 0 || v >= g.n) throw MsdError("adjacency index out of range");
            if (v == u) throw MsdError("self loop in adjacency");
            g.adj[u].push_back({v, 1.0});
            g.strength[u] += 1.0;
        }
    for (int u = 0; u < g.n; ++u) g.total += g.strength[u];
    return g;
}

double modularity(const WeightedGraph& g, const std::vector<int>& node2com) {
    std::map<int, double> in, tot;
    for (int u = 0; u < g.n; ++u) {
        tot[node2com[u]] += g.strength[u];
        in[node2com[u]] += g.self[u];
        for (const auto& [v, w] : g.adj[u])
            if (node2com[v] == node2com[u]) in[node2com[u]] += w;
    }
    double q = 0.0;
    for (const auto& [c, win] : in) {
        const double t = tot[c];
        q += win / g.total - (t / g.total) * (t / g.total);
    }
    return q;
}

// One local-move pass loop; returns true if any node changed community.
bool one_level(const WeightedGraph& g, std::vector<int>& node2com, Rng& rng) {
    std::vector<double> sum_tot(g.n, 0.0);
    std::iota(node2com.begin(), node2com.end(), 0);
    for (int u = 0; u < g.n; ++u) sum_tot[u] = g.strength[u];

    std::vector<int> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    bool any_move = false;
    bool improved = true;
    std::vector<double> k_in(g.n, 0.0);
    std::vector<int> touched;
    while (improved) {
        improved = false;
        for (int u : order) {
            const int cur = node2com[u];
            touched.clear();
            for (const auto& [v, w] : g.adj[u]) {
                const int c = node2com[v];
                if (k_in[c] == 0.0) touched.push_back(c);
                k_in[c] += w;
            }
            if (k_in[cur] == 0.0) touched.push_back(cur);

            sum_tot[cur] -= g.strength[u];
            const double base = k_in[cur] - sum_tot[cur] * g.strength[u] / g.total;
            int best = cur;
            double best_gain = 0.0;
            for (int c : touched) {
                if (c == cur) continue;
                const double gain = k_in[c] - sum_tot[c] * g.strength[u] / g.total - base;
                // 2·gain/total is the exact modularity change of the move
                if (gain > best_gain + 1e-12 ||
                    (gain > best_gain - 1e-12 && best != cur && c < best)) {
                    if (2.0 * gain / g.total > 1e-9) {
                        best = c;
                        best_gain = gain;
                    }
                }
            }
            sum_tot[best] += g.strength[u];
            if (best != cur) {
                node2com[u] = best;
                improved = true;
                any_move = true;
            }
            for (int c : touched) k_in[c] = 0.0;
        }
    }
    return any_move;
}

// Renumber communities 0..K-1 ordered by their smallest member.
int compact_labels(std::vector<int>& node2com) {
    std::map<int, int> first_seen;
    for (int u = 0; u < static_cast<int>(node2com.size()); ++u)
        first_seen.try_emplace(node2com[u], u);
    std::vector<std::pair<int, int>> order; // (smallest member, community)
    for (const auto& [c, u] : first_seen) order.push_back({u, c});
    std::sort(order.begin(), order.end());
    std::map<int, int> renum;
    for (int i = 0; i < static_cast<int>(order.size()); ++i) renum[order[i].second] = i;
    for (int& c : node2com) c = renum[c];
    return static_cast<int>(order.size());
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& node2com, int k) {
    WeightedGraph out;
    out.n = k;
    out.adj.resize(k);
    out.self.assign(k, 0.0);
    out.strength.assign(k, 0.0);
    std::vector<std::map<int, double>> w(k);
    for (int u = 0; u < g.n; ++u) {
        const int cu = node2com[u];
        out.self[cu] += g.self[u];
        for (const auto& [v, wt] : g.adj[u]) {
            const int cv = node2com[v];
            if (cv == cu)
                out.self[cu] += wt; // both directions visited: doubled as required
            else
                w[cu][cv] += wt;
        }
    }
    for (int c = 0; c < k; ++c) {
        out.strength[c] = out.self[c];
        for (const auto& [d, wt] : w[c]) {
            out.adj[c].push_back({d, wt});
            out.strength[c] += wt;
        }
        out.total += out.strength[c];
    }
    return out;
}

} // namespace

NodeClusterAssignment louvain(const std::vector<std::vector<int>>& adj, Rng& rng) {
    WeightedGraph g = from_adjacency(adj);
    if (g.total == 0.0) throw MsdError("graph has no edges");
    const int n = g.n;

    std::vector<int> final_com(n);
    std::iota(final_com.begin(), final_com.end(), 0);

    double q = modularity(g, final_com);
    while (true) {
        std::vector<int> level_com(g.n);
        const bool moved = one_level(g, level_com, rng);
        const int k = compact_labels(level_com);
        for (int u = 0; u < n; ++u) final_com[u] = level_com[final_com[u]];
        const double q_new = modularity(g, level_com);
        if (!moved || q_new - q <= 1e-9) break;
        q = q_new;
        g = aggregate(g, level_com, k);
    }

    NodeClusterAssignment out;
    out.method = "louvain";
    out.labels.assign(n, 0);
    out.k = compact_labels(final_com);
    for (int u = 0; u < n; ++u) out.labels[u] = final_com[u] + 1;
    return out;
}

NodeClusterAssignment louvain(const Graph& g, Rng& rng) {
    return louvain(g.adjacency(), rng);
}

namespace {

// Recursive spectral bisection of one vertex subset using the generalized
// modularity matrix restricted to the subset.
void bisect(const std::vector<std::vector<int>>& adj, const std::vector<double>& degree,
            double two_m, std::vector<int> subset, std::vector<std::vector<int>>& out) {
    if (subset.size() <= 1) {
        out.push_back(std::move(subset));
        return;
    }
    const int s = static_cast<int>(subset.size());
    std::vector<int> local(adj.size(), -1);
    for (int i = 0; i < s; ++i) local[subset[i]] = i;

    std::vector<double> b(static_cast<std::size_t>(s) * s, 0.0);
    for (int i = 0; i < s; ++i) {
        const int u = subset[i];
        for (int v : adj[u])
            if (local[v] >= 0) b[static_cast<std::size_t>(i) * s + local[v]] += 1.0;
        for (int j = 0; j < s; ++j)
            b[static_cast<std::size_t>(i) * s + j] -= degree[u] * degree[subset[j]] / two_m;
    }
    for (int i = 0; i < s; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < s; ++j) row_sum += b[static_cast<std::size_t>(i) * s + j];
        b[static_cast<std::size_t>(i) * s + i] -= row_sum;
    }

    const SymmetricEigen eig = jacobi_eigen(b, s, std::max(50, 10 * s));
    const double lambda = eig.values.back();
    if (lambda <= 1e-9) {
        out.push_back(std::move(subset));
        return;
    }

    std::vector<double> u(s);
    for (int i = 0; i < s; ++i) u[i] = eig.vectors(i, s - 1);
    for (int i = 0; i < s; ++i) {
        if (std::abs(u[i]) > 1e-12) {
            if (u[i] < 0.0)
                for (double& x : u) x = -x;
            break;
        }
    }

    std::vector<int> sign(s);
    int n_plus = 0;
    for (int i = 0; i < s; ++i) {
        sign[i] = (u[i] >= 0.0) ? 1 : -1;
        if (sign[i] > 0) ++n_plus;
    }
    if (n_plus == 0 || n_plus == s) {
        out.push_back(std::move(subset));
        return;
    }

    double delta_q = 0.0;
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            delta_q += b[static_cast<std::size_t>(i) * s + j] * sign[i] * sign[j];
    delta_q /= 2.0 * two_m;
    if (delta_q <= 1e-9) {
        out.push_back(std::move(subset));
        return;
    }

    std::vector<int> plus, minus;
    for (int i = 0; i < s; ++i)
        (sign[i] > 0 ? plus : minus).push_back(subset[i]);
    bisect(adj, degree, two_m, std::move(plus), out);
    bisect(adj, degree, two_m, std::move(minus), out);
}

} // namespace

NodeClusterAssignment leading_eigenvector(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<double> degree(n, 0.0);
    double two_m = 0.0;
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            if (v < 0 || v >= n) throw MsdError("adjacency index out of range");
            if (v == u) throw MsdError("self loop in adjacency");
            degree[u] += 1.0;
        }
        two_m += degree[u];
    }
    if (two_m == 0.0) throw MsdError("graph has no edges");

    // connected components first; a disconnected generalized matrix is never split
    // across components anyway, and per-component work keeps the dense solve small
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> components;
    for (int start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        const int c = static_cast<int>(components.size());
        components.push_back({});
        std::queue<int> q;
        q.push(start);
        comp[start] = c;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            components[c].push_back(u);
            for (int v : adj[u])
                if (comp[v] < 0) {
                    comp[v] = c;
                    q.push(v);
                }
        }
        std::sort(components[c].begin(), components[c].end());
    }

    std::vector<std::vector<int>> groups;
    for (auto& component : components)
        bisect(adj, degree, two_m, std::move(component), groups);

    std::sort(groups.begin(), groups.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });

    NodeClusterAssignment out;
    out.method = "eigen";
    out.labels.assign(n, 0);
    out.k = static_cast<int>(groups.size());
    for (int c = 0; c < out.k; ++c)
        for (int u : groups[c]) out.labels[u] = c + 1;
    return out;
}

NodeClusterAssignment leading_eigenvector(const Graph& g) {
    return leading_eigenvector(g.adjacency());
}

} // namespace msd
