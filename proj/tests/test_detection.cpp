#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "msd/detection.hpp"
#include "msd/diffusion.hpp"
#include "msd/errors.hpp"
#include "msd/graph.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace msd;
using namespace testsup;

namespace {

// Hand-sized extended network for unit-level label tests. Only n_infected
// and the row count matter to init_labels / identify_sources.
ExtendedNetwork fake_ext(int n_infected, int n_boundary) {
    ExtendedNetwork ext;
    ext.n_infected = n_infected;
    for (int i = 0; i < n_infected + n_boundary; ++i) ext.rows.push_back(i);
    ext.row_of.assign(static_cast<std::size_t>(n_infected + n_boundary), -1);
    for (int i = 0; i < ext.size(); ++i) ext.row_of[static_cast<std::size_t>(i)] = i;
    ext.adj.resize(static_cast<std::size_t>(ext.size()));
    return ext;
}

} // namespace

TEST_CASE("node ages from first principles") {
    // infected {0..4}, boundary {5}:
    //   0: nbrs {2,3,5}  -> I=2, O=3
    //   1: nbrs {2,3,4,5}-> I=3, O=4
    //   2,3: nbrs {0,1}  -> I=2, O=2
    //   4: nbrs {1}      -> I=1, O=1
    //   5: infected nbrs {0,1} -> (I_0 + I_1) / 2
    const Graph g =
        from_edges(6, {{0, 2}, {0, 3}, {0, 5}, {1, 2}, {1, 3}, {1, 4}, {1, 5}});
    const ExtendedNetwork ext = extended_network(g, {0, 1, 2, 3, 4});
    const AgeVector ages = compute_ages(g, ext);
    REQUIRE(ages.infected.size() == 5);
    REQUIRE(ages.boundary.size() == 1);
    CHECK(ages.infected[0] == doctest::Approx((2.0 / 3.0) * (1.0 + std::log(3.0))).epsilon(1e-14));
    CHECK(ages.infected[1] == doctest::Approx((3.0 / 4.0) * (1.0 + std::log(4.0))).epsilon(1e-14));
    CHECK(ages.infected[2] == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-14));
    CHECK(ages.infected[3] == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-14));
    CHECK(ages.infected[4] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ages.boundary[0] == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("degree-one nodes with an infected neighbor have age exactly 1") {
    const Graph g = path_graph(2);
    const ExtendedNetwork ext = extended_network(g, {0, 1});
    const AgeVector ages = compute_ages(g, ext);
    CHECK(ages.infected[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ages.infected[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("isolated infected node is rejected") {
    const Graph g = from_edges(3, {{0, 1}}); // node 2 isolated
    const ExtendedNetwork ext = extended_network(g, {0, 2});
    CHECK_THROWS_WITH_AS(compute_ages(g, ext), doctest::Contains("isolated"), MsdError);
}

TEST_CASE("label initialization places ages by membership and exonerates the oldest boundary") {
    const ExtendedNetwork ext = fake_ext(2, 3);
    AgeVector ages;
    ages.infected = {2.0, 3.0};
    ages.boundary = {1.0, 2.5, 0.5};
    MembershipMatrix b;
    b.rows = 2;
    b.cols = 2;
    b.data.assign(4, 0);
    b.set(0, 0);
    b.set(1, 0);
    b.set(1, 1);
    const LabelMatrix l0 = init_labels(ext, ages, b);
    REQUIRE(l0.l.rows == 5);
    REQUIRE(l0.l.cols == 3);
    CHECK(l0.l(0, 0) == doctest::Approx(2.0));
    CHECK(l0.l(0, 1) == 0.0);
    CHECK(l0.l(0, 2) == 0.0);
    CHECK(l0.l(1, 0) == doctest::Approx(3.0));
    CHECK(l0.l(1, 1) == doctest::Approx(3.0));
    CHECK(l0.l(1, 2) == 0.0);
    // boundary column: max age 2.5 minus own age
    CHECK(l0.l(2, 2) == doctest::Approx(1.5));
    CHECK(l0.l(3, 2) == doctest::Approx(0.0));
    CHECK(l0.l(4, 2) == doctest::Approx(2.0));
    CHECK(l0.l(2, 0) == 0.0);
    CHECK(l0.l(4, 1) == 0.0);
}

TEST_CASE("label initialization with no boundary keeps the extra column zero") {
    const ExtendedNetwork ext = fake_ext(3, 0);
    AgeVector ages;
    ages.infected = {1.0, 2.0, 3.0};
    MembershipMatrix b;
    b.rows = 3;
    b.cols = 1;
    b.data.assign(3, 1);
    const LabelMatrix l0 = init_labels(ext, ages, b);
    REQUIRE(l0.l.cols == 2);
    for (int i = 0; i < 3; ++i) CHECK(l0.l(i, 1) == 0.0);
}

TEST_CASE("label initialization rejects zero communities and bad shapes") {
    const ExtendedNetwork ext = fake_ext(2, 0);
    AgeVector ages;
    ages.infected = {1.0, 1.0};
    MembershipMatrix none;
    none.rows = 2;
    none.cols = 0;
    CHECK_THROWS_WITH_AS(init_labels(ext, ages, none), doctest::Contains("no communities"),
                         MsdError);

    MembershipMatrix wrong;
    wrong.rows = 1;
    wrong.cols = 1;
    wrong.data.assign(1, 1);
    CHECK_THROWS_AS(init_labels(ext, ages, wrong), MsdError);
}

TEST_CASE("propagation fixed point for an edgeless extension is half the seed labels") {
    // two isolated infected rows: A = 0, so L* = (1 - alpha) L0
    const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency({{}, {}});
    LabelMatrix l0;
    l0.l = DenseMatrix(2, 2);
    l0.l(0, 0) = 4.0;
    l0.l(1, 1) = 2.0;
    const LabelMatrix closed = propagate_closed_form(a, l0, 0.5);
    CHECK(closed.l(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(closed.l(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    const LabelMatrix iter = propagate_iterative(a, l0, 0.5, 1e-12);
    CHECK(max_abs_diff(iter.l, closed.l) < 1e-10);
}

TEST_CASE("propagation on a single edge reaches the known fixed point") {
    // A = [[0,1],[1,0]], L0 = [1,0]^T: L* = (2/3, 1/3)
    const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency({{1}, {0}});
    LabelMatrix l0;
    l0.l = DenseMatrix(2, 1);
    l0.l(0, 0) = 1.0;
    const LabelMatrix closed = propagate_closed_form(a, l0, 0.5);
    CHECK(closed.l(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(closed.l(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const LabelMatrix iter = propagate_iterative(a, l0, 0.5, 1e-12);
    CHECK(iter.iterations > 0);
    CHECK(max_abs_diff(iter.l, closed.l) < 1e-10);
}

TEST_CASE("zero seed labels stay zero") {
    const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency({{1}, {0}});
    LabelMatrix l0;
    l0.l = DenseMatrix(2, 3);
    const LabelMatrix closed = propagate_closed_form(a, l0, 0.5);
    for (double x : closed.l.data) CHECK(x == 0.0);
}

TEST_CASE("closed form and iteration agree on random extended networks") {
    Rng gen(61);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = connected_gnm(40, 90, gen);
        std::vector<int> infected;
        for (int u = 0; u < 40; ++u)
            if (gen.uniform01() < 0.4) infected.push_back(u);
        if (infected.empty()) infected.push_back(0);
        const ExtendedNetwork ext = extended_network(g, infected);
        const AgeVector ages = compute_ages(g, ext);
        const InfectedSubnetwork gi = induced_subgraph(g, infected);
        if (gi.num_edges() == 0) continue;
        const EdgeClusterAssignment clusters = link_communities(gi, 1);
        const LabelMatrix l0 = init_labels(ext, ages, membership(gi, clusters));
        const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency(ext.adj);
        const LabelMatrix closed = propagate_closed_form(a, l0, 0.5);
        const LabelMatrix iter = propagate_iterative(a, l0, 0.5, 1e-12);
        CHECK(max_abs_diff(closed.l, iter.l) < 1e-8);
        CHECK(fixed_point_residual(a, closed.l, l0.l, 0.5) < 1e-8);
        for (double x : closed.l.data) CHECK(x >= -1e-12);
    }
}

TEST_CASE("iterative propagation reports non-convergence") {
    const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency({{1}, {0}});
    LabelMatrix l0;
    l0.l = DenseMatrix(2, 1);
    l0.l(0, 0) = 1.0;
    CHECK_THROWS_AS(propagate_iterative(a, l0, 0.5, 1e-12, 1), ConvergenceError);
}

TEST_CASE("propagation validates alpha and shapes") {
    const NormalizedAdjacency a = NormalizedAdjacency::from_adjacency({{1}, {0}});
    LabelMatrix l0;
    l0.l = DenseMatrix(2, 1);
    CHECK_THROWS_AS(propagate_closed_form(a, l0, 1.0), MsdError);
    CHECK_THROWS_AS(propagate_closed_form(a, l0, -0.1), MsdError);
    LabelMatrix wrong;
    wrong.l = DenseMatrix(3, 1);
    CHECK_THROWS_AS(propagate_closed_form(a, wrong, 0.5), MsdError);
}

TEST_CASE("source identification takes the row-normalized argmax per cluster column") {
    const ExtendedNetwork ext = fake_ext(3, 1);
    LabelMatrix l;
    l.l = DenseMatrix(4, 3); // two cluster columns + boundary column
    l.l(0, 0) = 0.6;
    l.l(0, 1) = 0.2;
    l.l(0, 2) = 0.2;
    l.l(1, 0) = 0.2;
    l.l(1, 1) = 0.6;
    l.l(1, 2) = 0.2;
    l.l(2, 0) = 0.5;
    l.l(2, 1) = 0.5;
    l.l(3, 2) = 1.0;
    const DetectionResult r = identify_sources(l, ext);
    CHECK(r.k_detected == 2);
    CHECK(r.per_cluster_source == std::vector<int>{0, 1});
    CHECK(r.detected_sources == std::vector<int>{0, 1});
    CHECK(r.scores[0] == doctest::Approx(0.6));
    CHECK(r.scores[1] == doctest::Approx(0.6));
}

TEST_CASE("row normalization outweighs raw magnitude") {
    const ExtendedNetwork ext = fake_ext(2, 0);
    LabelMatrix l;
    l.l = DenseMatrix(2, 2);
    l.l(0, 0) = 5.0; // row sum 10 -> normalized 0.5
    l.l(0, 1) = 5.0;
    l.l(1, 0) = 0.9; // row sum 1 -> normalized 0.9
    l.l(1, 1) = 0.1;
    const DetectionResult r = identify_sources(l, ext);
    CHECK(r.per_cluster_source == std::vector<int>{1});
}

TEST_CASE("argmax ties break toward the smallest node index") {
    const ExtendedNetwork ext = fake_ext(3, 0);
    LabelMatrix l;
    l.l = DenseMatrix(3, 2);
    l.l(0, 0) = 1.0;
    l.l(1, 0) = 1.0;
    l.l(2, 0) = 1.0;
    const DetectionResult r = identify_sources(l, ext);
    CHECK(r.per_cluster_source == std::vector<int>{0});
}

TEST_CASE("duplicate cluster argmaxes collapse in the detected set") {
    const ExtendedNetwork ext = fake_ext(2, 0);
    LabelMatrix l;
    l.l = DenseMatrix(2, 3);
    l.l(0, 0) = 1.0;
    l.l(0, 1) = 1.0;
    l.l(1, 0) = 0.2;
    l.l(1, 1) = 0.2;
    const DetectionResult r = identify_sources(l, ext);
    CHECK(r.k_detected == 2);
    CHECK(r.per_cluster_source == std::vector<int>{0, 0});
    CHECK(r.detected_sources == std::vector<int>{0});
}

TEST_CASE("degenerate cluster columns are skipped") {
    const ExtendedNetwork ext = fake_ext(2, 1);
    LabelMatrix l;
    l.l = DenseMatrix(3, 3);
    l.l(0, 0) = 1.0;
    l.l(1, 0) = 0.5;
    l.l(2, 1) = 7.0; // cluster column alive only on a boundary row: degenerate
    const DetectionResult r = identify_sources(l, ext);
    CHECK(r.k_detected == 2); // reported cluster count is still the column count
    CHECK(r.per_cluster_source == std::vector<int>{0});
    CHECK(r.detected_sources == std::vector<int>{0});

    LabelMatrix dead;
    dead.l = DenseMatrix(3, 2);
    dead.l(2, 0) = 1.0;
    CHECK_THROWS_WITH_AS(identify_sources(dead, ext), doctest::Contains("no identifiable"),
                         MsdError);
}

TEST_CASE("detect on a fully infected star returns the hub") {
    const Graph g = star_graph(6);
    const std::vector<int> all = {0, 1, 2, 3, 4, 5, 6};
    DetectionArtifacts artifacts;
    const DetectionResult r = detect(g, all, {}, &artifacts);
    CHECK(r.k_detected == 1);
    CHECK(r.detected_sources == std::vector<int>{0});
    CHECK(r.scores[0] == doctest::Approx(1.0));
    CHECK(r.clusterer == "link");
    CHECK(artifacts.gi.num_nodes() == 7);
    CHECK(artifacts.edge_clusters.k == 1);
}

TEST_CASE("detect short-circuits a single infected node") {
    Rng gen(67);
    const Graph g = connected_gnm(20, 40, gen);
    DetectionArtifacts artifacts;
    const DetectionResult r = detect(g, {7}, {}, &artifacts);
    CHECK(r.k_detected == 1);
    CHECK(r.detected_sources == std::vector<int>{7});
    CHECK(r.per_cluster_source == std::vector<int>{7});
    CHECK(r.scores == std::vector<double>{1.0});
    CHECK(artifacts.gi.num_nodes() == 1);
}

TEST_CASE("detect recovers two deterministic outbreak regions on a grid") {
    // p=1 with a two-round cap grows exact 2-hop balls around opposite
    // corners; the detector should place one source in each ball.
    const Graph g = grid_graph(9, 9);
    DiffusionConfig cfg;
    cfg.infection_prob = 1.0;
    cfg.target_fraction = 1.0;
    cfg.max_steps = 2;
    const std::vector<int> seeds = {0, 80};
    const InfectionOutcome out = simulate(g, seeds, cfg);
    REQUIRE(out.infected.size() == 12); // two 2-hop corner balls of 6 nodes

    for (const std::string& method : {"link", "louvain", "eigen"}) {
        DetectOptions opt;
        opt.clusterer = method;
        const DetectionResult r = detect(g, out.infected, opt);
        CHECK(r.detected_sources.size() >= 1);
        // every detected source is infected
        for (int v : r.detected_sources)
            CHECK(std::binary_search(out.infected.begin(), out.infected.end(), v));
        // each true seed's ball contains at least one detected source and
        // every detected source lies within distance 2 of a true seed
        const std::vector<int> dist = bfs_dist(g, seeds);
        bool near0 = false, near80 = false;
        for (int v : r.detected_sources) {
            CHECK(dist[v] <= 2);
            const std::vector<int> d0 = bfs_dist(g, {0});
            near0 |= d0[v] <= 2;
            near80 |= d0[v] > 2;
        }
        CHECK(near0);
        CHECK(near80);
    }
}

TEST_CASE("detect validates the infected list") {
    const Graph g = path_graph(4);
    CHECK_THROWS_AS(detect(g, {}), MsdError);
    CHECK_THROWS_AS(detect(g, {9}), MsdError);
    const DetectionResult r = detect(g, {1, 1, 2}); // duplicates collapse
    CHECK(r.detected_sources.size() >= 1);
}

TEST_CASE("detect rejects unknown clusterers and bad options") {
    const Graph g = path_graph(4);
    DetectOptions opt;
    opt.clusterer = "kmeans";
    CHECK_THROWS_AS(detect(g, {0, 1}, opt), MsdError);
    opt.clusterer = "link";
    opt.alpha = 1.0;
    CHECK_THROWS_AS(detect(g, {0, 1}, opt), MsdError);
    opt.alpha = 0.5;
    opt.min_cluster_size = 0;
    CHECK_THROWS_AS(detect(g, {0, 1}, opt), MsdError);
}

TEST_CASE("detect is independent of edge input order") {
    const Graph g1 = grid_graph(5, 5);
    std::ostringstream buf;
    write_edge_list(g1, buf);
    // reload with reversed line order
    std::vector<std::string> lines;
    {
        std::istringstream in(buf.str());
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    std::reverse(lines.begin(), lines.end());
    std::string reversed;
    for (const auto& line : lines) reversed += line + "\n";
    std::istringstream in2(reversed);
    const Graph g2 = load_edge_list(in2);

    DiffusionConfig cfg;
    cfg.infection_prob = 1.0;
    cfg.target_fraction = 1.0;
    cfg.max_steps = 2;
    const InfectionOutcome out = simulate(g1, {12}, cfg);
    const DetectionResult r1 = detect(g1, out.infected);
    const DetectionResult r2 = detect(g2, out.infected);
    CHECK(r1.detected_sources == r2.detected_sources);
    CHECK(r1.per_cluster_source == r2.per_cluster_source);
}

TEST_CASE("louvain clusterer populates node artifacts") {
    const Graph g = grid_graph(6, 6);
    DiffusionConfig cfg;
    cfg.infection_prob = 1.0;
    cfg.target_fraction = 1.0;
    cfg.max_steps = 2;
    const InfectionOutcome out = simulate(g, {0, 35}, cfg);
    DetectOptions opt;
    opt.clusterer = "louvain";
    DetectionArtifacts artifacts;
    const DetectionResult r = detect(g, out.infected, opt, &artifacts);
    CHECK(r.clusterer == "louvain");
    CHECK(artifacts.node_clusters.k >= 1);
    CHECK(artifacts.node_clusters.labels.size() == static_cast<std::size_t>(
                                                       artifacts.gi.num_nodes()));
    CHECK(r.k_detected == artifacts.node_clusters.k);
}

TEST_CASE("detection report JSON uses node labels") {
    const Graph g = star_graph(6);
    const std::vector<int> all = {0, 1, 2, 3, 4, 5, 6};
    const DetectionResult r = detect(g, all);
    const auto j = nlohmann::json::parse(detection_to_json(r, g));
    CHECK(j["k_detected"].get<int>() == 1);
    CHECK(j["detected_sources"].size() == 1);
    CHECK(j["detected_sources"][0].get<std::string>() == idlab(0));
    CHECK(j["clusterer"].get<std::string>() == "link");
    CHECK(j["alpha"].get<double>() == doctest::Approx(0.5));
    CHECK(j["scores"].size() == 1);
    CHECK(j["per_cluster_source"][0].get<std::string>() == idlab(0));
}
