#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "wbsg/digraph.hpp"
#include "wbsg/experiment.hpp"

namespace wbsg::test {

inline DiGraph two_node() { return DiGraph(2, {{0, 1}, {1, 0}}); }

inline DiGraph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return DiGraph(n, edges);
}

inline DiGraph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j) edges.push_back({i, j});
  return DiGraph(n, edges);
}

// 1->2, 2->3, 3->1, 1->3 (0-based internally).
inline DiGraph g4() { return DiGraph(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}}); }

// Small named graphs plus seeded random ones.
inline std::vector<DiGraph> test_graphs() {
  std::vector<DiGraph> graphs{two_node(), cycle(3), g4(), cycle(5), complete(3), complete(4)};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) graphs.push_back(generate_graph(6, 0.3, seed));
  graphs.push_back(generate_graph(12, 0.1, 9));
  return graphs;
}

// All-pairs hop distances by Floyd-Warshall; independent of the BFS in the
// library.
inline std::vector<std::vector<std::size_t>> floyd_distances(const DiGraph& g) {
  const std::size_t n = g.node_count();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Edge& e : g.edges()) d[e.src][e.dst] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace wbsg::test
