#include "msd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

#include "msd/errors.hpp"
#include "msd/rng.hpp"

namespace msd {

namespace {

// Degree within the infected set for every infected row of ext.
std::vector<int> infected_degrees(const ExtendedNetwork& ext) {
    std::vector<int> deg(ext.n_infected, 0);
    for (int i = 0; i < ext.n_infected; ++i)
        for (int j : ext.adj[i])
            if (j < ext.n_infected) ++deg[i];
    return deg;
}

} // namespace

AgeVector compute_ages(const Graph& g, const ExtendedNetwork& ext) {
    AgeVector ages;
    const std::vector<int> i_deg = infected_degrees(ext);

    ages.infected.resize(ext.n_infected);
    for (int i = 0; i < ext.n_infected; ++i) {
        const int o = g.degree(ext.rows[i]);
        if (o == 0)
            throw MsdError("infected node '" + g.label(ext.rows[i]) +
                           "' is isolated; exclude isolated nodes from seeding");
        ages.infected[i] =
            (static_cast<double>(i_deg[i]) / o) * (1.0 + std::log(static_cast<double>(o)));
    }

    const int n_boundary = ext.size() - ext.n_infected;
    ages.boundary.resize(n_boundary);
    for (int j = 0; j < n_boundary; ++j) {
        const int row = ext.n_infected + j;
        double sum = 0.0;
        int count = 0;
        for (int i : ext.adj[row])
            if (i < ext.n_infected) {
                sum += i_deg[i];
                ++count;
            }
        if (count == 0)
            throw MsdError("boundary node '" + g.label(ext.rows[row]) +
                           "' has no infected neighbor");
        ages.boundary[j] = sum / count;
    }
    return ages;
}

LabelMatrix init_labels(const ExtendedNetwork& ext, const AgeVector& ages,
                        const MembershipMatrix& membership) {
    if (membership.cols == 0) throw MsdError("no communities detected");
    if (membership.rows != ext.n_infected)
        throw MsdError("membership rows do not match the infected node count");
    if (static_cast<int>(ages.infected.size()) != ext.n_infected ||
        static_cast<int>(ages.boundary.size()) != ext.size() - ext.n_infected)
        throw MsdError("age vector does not match the extended network");

    const int k = membership.cols;
    LabelMatrix l0;
    l0.l = DenseMatrix(ext.size(), k + 1);

    for (int i = 0; i < ext.n_infected; ++i)
        for (int c = 0; c < k; ++c)
            if (membership.at(i, c)) l0.l(i, c) = ages.infected[i];

    if (!ages.boundary.empty()) {
        const double max_age = *std::max_element(ages.boundary.begin(), ages.boundary.end());
        for (std::size_t j = 0; j < ages.boundary.size(); ++j)
            l0.l(ext.n_infected + static_cast<int>(j), k) = max_age - ages.boundary[j];
    }
    return l0;
}

LabelMatrix propagate_iterative(const NormalizedAdjacency& adj, const LabelMatrix& l0,
                                double alpha, double tol, int max_iter) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw MsdError("alpha must lie in (0, 1)");
    if (adj.n != l0.l.rows) throw MsdError("adjacency and label matrix dimensions disagree");
    if (max_iter < 1) throw MsdError("max_iter must be positive");

    LabelMatrix cur;
    cur.l = l0.l;
    cur.alpha = alpha;
    DenseMatrix next(l0.l.rows, l0.l.cols);
    double change = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        adj.multiply(cur.l, next);
        for (std::size_t i = 0; i < next.data.size(); ++i)
            next.data[i] = alpha * next.data[i] + (1.0 - alpha) * l0.l.data[i];
        change = max_abs_diff(next, cur.l);
        std::swap(cur.l.data, next.data);
        cur.iterations = it;
        if (change < tol) return cur;
    }
    std::ostringstream msg;
    msg << "label propagation did not converge in " << max_iter
        << " iterations (last change " << change << ")";
    throw ConvergenceError(msg.str());
}

LabelMatrix propagate_closed_form(const NormalizedAdjacency& adj, const LabelMatrix& l0,
                                  double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw MsdError("alpha must lie in (0, 1)");
    if (adj.n != l0.l.rows) throw MsdError("adjacency and label matrix dimensions disagree");

    const int n = adj.n;
    const int cols = l0.l.cols;
    LabelMatrix out;
    out.l = DenseMatrix(n, cols);
    out.alpha = alpha;

    // Conjugate gradients on (I - alpha*A) x = (1-alpha) b per column.
    // Eigenvalues of the system lie in [1-alpha, 1+alpha], so convergence
    // is fast and unconditional.
    const double tol = 1e-12;
    const int max_iter = 10 * n + 50;
    std::vector<double> x(n), r(n), p(n), ap(n);
    for (int c = 0; c < cols; ++c) {
        double bnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = 0.0;
            r[i] = (1.0 - alpha) * l0.l(i, c);
            p[i] = r[i];
            bnorm2 += r[i] * r[i];
        }
        double rs = bnorm2;
        if (std::sqrt(rs) <= tol) continue; // zero column stays zero
        bool done = false;
        for (int it = 0; it < max_iter && !done; ++it) {
            // ap = (I - alpha*A) p
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t idx = adj.row_ptr[i]; idx < adj.row_ptr[i + 1]; ++idx)
                    s += adj.val[idx] * p[adj.col[idx]];
                ap[i] = p[i] - alpha * s;
            }
            double pap = 0.0;
            for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
            const double step = rs / pap;
            double rs_new = 0.0;
            for (int i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
                rs_new += r[i] * r[i];
            }
            if (std::sqrt(rs_new) < tol) {
                done = true;
            } else {
                const double beta = rs_new / rs;
                for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
            }
            rs = rs_new;
        }
        if (!done) {
            std::ostringstream msg;
            msg << "linear solve for column " << c << " missed residual " << tol
                << " (got " << std::sqrt(rs) << ")";
            throw ConvergenceError(msg.str());
        }
        for (int i = 0; i < n; ++i) out.l(i, c) = x[i];
    }
    return out;
}

DetectionResult identify_sources(const LabelMatrix& l_star, const ExtendedNetwork& ext) {
    if (l_star.l.rows != ext.size())
        throw MsdError("label matrix rows do not match the extended network");
    if (l_star.l.cols < 2) throw MsdError("label matrix has no cluster columns");

    DenseMatrix norm = l_star.l;
    for (int i = 0; i < norm.rows; ++i) {
        double sum = 0.0;
        for (int c = 0; c < norm.cols; ++c) sum += norm(i, c);
        if (sum > 0.0)
            for (int c = 0; c < norm.cols; ++c) norm(i, c) /= sum;
    }

    DetectionResult result;
    result.k_detected = norm.cols - 1;
    result.alpha = l_star.alpha;
    std::set<int> seen;
    for (int c = 0; c < norm.cols - 1; ++c) {
        int best = -1;
        double best_score = 0.0;
        for (int i = 0; i < ext.n_infected; ++i) {
            if (norm(i, c) > best_score) {
                best_score = norm(i, c);
                best = i; // first strict improvement: smallest index wins ties
            }
        }
        if (best < 0) continue; // degenerate column: all infected entries zero
        result.per_cluster_source.push_back(ext.rows[best]);
        result.scores.push_back(best_score);
        seen.insert(ext.rows[best]);
    }
    if (result.per_cluster_source.empty()) throw MsdError("no identifiable sources");
    result.detected_sources.assign(seen.begin(), seen.end());
    return result;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const AllNoiseError&) {
        throw;
    } catch (const MsdError& e) {
        throw MsdError(std::string(name) + ": " + e.what());
    }
}

} // namespace

DetectionResult detect(const Graph& g, const std::vector<int>& infected,
                       const DetectOptions& options, DetectionArtifacts* artifacts) {
    if (infected.empty()) throw MsdError("detect: empty infected set");
    std::vector<int> inf = infected;
    std::sort(inf.begin(), inf.end());
    inf.erase(std::unique(inf.begin(), inf.end()), inf.end());
    for (int u : inf)
        if (u < 0 || u >= g.num_nodes()) throw MsdError("detect: unknown infected node index");

    if (inf.size() == 1) {
        // only candidate; the pipeline needs at least one infected edge
        if (artifacts) {
            artifacts->gi = induced_subgraph(g, inf);
            artifacts->node_clusters.labels = {1};
            artifacts->node_clusters.k = 1;
            artifacts->node_clusters.method = options.clusterer;
        }
        DetectionResult r;
        r.k_detected = 1;
        r.per_cluster_source = {inf.front()};
        r.detected_sources = {inf.front()};
        r.scores = {1.0};
        r.clusterer = options.clusterer;
        r.alpha = options.alpha;
        return r;
    }

    const ExtendedNetwork ext =
        stage("extended network", [&] { return extended_network(g, inf); });
    const InfectedSubnetwork gi =
        stage("infected subnetwork", [&] { return induced_subgraph(g, inf); });
    if (artifacts) artifacts->gi = gi;

    MembershipMatrix b = stage("clustering", [&]() -> MembershipMatrix {
        if (options.clusterer == "link") {
            EdgeClusterAssignment a;
            try {
                a = link_communities(gi, options.min_cluster_size);
            } catch (const AllNoiseError&) {
                a = link_communities(gi, 1);
            }
            if (artifacts) artifacts->edge_clusters = a;
            return membership(gi, a);
        }
        if (options.clusterer == "louvain" || options.clusterer == "eigen") {
            NodeClusterAssignment a;
            if (options.clusterer == "louvain") {
                Rng rng(options.seed);
                a = louvain(gi.adj, rng);
            } else {
                a = leading_eigenvector(gi.adj);
            }
            if (artifacts) artifacts->node_clusters = a;
            return membership(gi, a);
        }
        throw MsdError("unknown clusterer '" + options.clusterer + "'");
    });

    const AgeVector ages = stage("ages", [&] { return compute_ages(g, ext); });
    LabelMatrix l0 = stage("label init", [&] { return init_labels(ext, ages, b); });
    l0.alpha = options.alpha;

    const NormalizedAdjacency adj = NormalizedAdjacency::from_adjacency(ext.adj);
    LabelMatrix l_star = stage("propagation", [&] {
        try {
            return propagate_closed_form(adj, l0, options.alpha);
        } catch (const ConvergenceError&) {
            return propagate_iterative(adj, l0, options.alpha, options.tol);
        }
    });

    DetectionResult result =
        stage("source identification", [&] { return identify_sources(l_star, ext); });
    result.clusterer = options.clusterer;
    result.alpha = options.alpha;
    return result;
}

std::string detection_to_json(const DetectionResult& result, const Graph& g) {
    nlohmann::json j;
    j["k_detected"] = result.k_detected;
    auto labels = [&](const std::vector<int>& idx) {
        std::vector<std::string> out;
        out.reserve(idx.size());
        for (int u : idx) out.push_back(g.label(u));
        return out;
    };
    j["per_cluster_source"] = labels(result.per_cluster_source);
    j["detected_sources"] = labels(result.detected_sources);
    j["scores"] = result.scores;
    j["clusterer"] = result.clusterer;
    j["alpha"] = result.alpha;
    return j.dump(2);
}

} // namespace msd
