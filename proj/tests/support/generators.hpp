#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "msd/graph.hpp"
#include "msd/rng.hpp"

namespace testsup {

/// Zero-padded label so lexicographic label order equals numeric order and
/// index_of(idlab(i)) == i for graphs built by these helpers.
std::string idlab(int i);

msd::Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

msd::Graph path_graph(int n);
msd::Graph cycle_graph(int n);
msd::Graph star_graph(int leaves); // node 0 is the center
msd::Graph grid_graph(int rows, int cols); // node r*cols + c
msd::Graph complete_graph(int n);
msd::Graph clique_pair(int a, int b); // cliques {0..a-1}, {a..a+b-1}, bridge (0, a)
msd::Graph two_triangles();           // disjoint triangles 0-1-2 and 3-4-5

/// Uniform simple graph with exactly n nodes and m edges (may be
/// disconnected, isolated nodes possible).
msd::Graph gnm_random(int n, std::size_t m, msd::Rng& rng);

/// Connected variant: random recursive tree plus extra random edges.
msd::Graph connected_gnm(int n, std::size_t m, msd::Rng& rng);

/// Block-structured social-network stand-in with exactly n nodes and m
/// edges: a cycle backbone inside each block (keeps every node connected
/// within its block) plus random extra edges, a `within` fraction of them
/// inside blocks.
msd::Graph school_sbm(int n, std::size_t m, int blocks, double within, msd::Rng& rng);

} // namespace testsup
