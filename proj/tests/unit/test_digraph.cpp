#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "wbsg/digraph.hpp"
#include "wbsg/errors.hpp"

using namespace wbsg;
using wbsg::test::floyd_distances;

TEST_CASE("strong connectivity") {
  CHECK(validate_strongly_connected(test::cycle(3)));
  CHECK_FALSE(validate_strongly_connected(DiGraph(2, {{0, 1}})));
  CHECK_FALSE(validate_strongly_connected(DiGraph(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}})));
  CHECK_FALSE(validate_strongly_connected(DiGraph(1, {})));
  CHECK_THROWS_AS(require_strongly_connected(DiGraph(2, {{0, 1}})), ConfigError);
}

TEST_CASE("stats on named graphs") {
  CHECK(compute_stats(test::cycle(3)) == GraphStats{2, 1});
  CHECK(compute_stats(test::complete(3)) == GraphStats{1, 2});
  CHECK(compute_stats(test::g4()) == GraphStats{2, 2});
  CHECK_THROWS_AS(compute_stats(DiGraph(2, {{0, 1}})), ConfigError);
}

TEST_CASE("n-cycle has diameter n-1 and max out-degree 1") {
  for (std::size_t n = 2; n <= 40; ++n) {
    CAPTURE(n);
    CHECK(compute_stats(test::cycle(n)) == GraphStats{n - 1, 1});
  }
}

TEST_CASE("diameter matches Floyd-Warshall on random graphs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 3 + seed % 13;
    DiGraph g = generate_graph(n, 0.05 * static_cast<double>(seed % 7), seed);
    auto dist = floyd_distances(g);
    std::size_t diameter = 0;
    for (const auto& row : dist)
      for (std::size_t d : row) diameter = std::max(diameter, d);
    CAPTURE(seed);
    const GraphStats stats = compute_stats(g);
    CHECK(stats.diameter == diameter);
    CHECK(stats.diameter >= 1);
    CHECK(stats.diameter <= n - 1);
    CHECK(stats.max_out_degree >= 1);
    CHECK(stats.max_out_degree <= n - 1);
  }
}

TEST_CASE("degree bookkeeping is consistent with the edge set") {
  for (const DiGraph& g : test::test_graphs()) {
    std::size_t in_total = 0, out_total = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      CHECK(g.in_degree(i) >= 1);
      CHECK(g.out_degree(i) >= 1);
      in_total += g.in_degree(i);
      out_total += g.out_degree(i);
      CHECK(std::is_sorted(g.in_neighbors(i).begin(), g.in_neighbors(i).end()));
      for (NodeId j : g.in_neighbors(i)) CHECK(g.has_edge(j, i));
      for (NodeId j : g.out_neighbors(i)) CHECK(g.has_edge(i, j));
    }
    CHECK(in_total == g.edge_count());
    CHECK(out_total == g.edge_count());
  }
}

TEST_CASE("construction rejects self-loops and duplicates") {
  CHECK_THROWS_AS(DiGraph(2, {{0, 0}, {0, 1}}), ConfigError);
  CHECK_THROWS_AS(DiGraph(2, {{0, 1}, {0, 1}, {1, 0}}), ConfigError);
  CHECK_THROWS_AS(DiGraph(2, {{0, 2}}), ConfigError);
  CHECK_THROWS_AS(DiGraph(0, {}), ConfigError);
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# comment\n  alpha beta\n\nbeta gamma\ngamma alpha\n   # indented\n");
  DiGraph g = parse_edge_list(in);
  REQUIRE(g.node_count() == 3);
  CHECK(g.label(0) == "alpha");
  CHECK(g.label(1) == "beta");
  CHECK(g.label(2) == "gamma");
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(2, 0));
  CHECK(validate_strongly_connected(g));

  std::istringstream self_loop("a b\nb b\n");
  CHECK_THROWS_AS(parse_edge_list(self_loop), ConfigError);
  std::istringstream three_fields("a b c\n");
  CHECK_THROWS_AS(parse_edge_list(three_fields), ConfigError);
  std::istringstream duplicate("a b\nb a\na b\n");
  CHECK_THROWS_AS(parse_edge_list(duplicate), ConfigError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_edge_list(empty), ConfigError);
}

TEST_CASE("written edge lists reproduce ids and labels exactly") {
  std::istringstream in("z y\nq z\ny q\ny z\n");
  DiGraph original = parse_edge_list(in);
  for (const DiGraph& g : {original, generate_graph(15, 0.2, 3), test::g4()}) {
    std::ostringstream out;
    write_edge_list(out, g);
    std::istringstream back(out.str());
    DiGraph reread = parse_edge_list(back);
    REQUIRE(reread.node_count() == g.node_count());
    CHECK(std::equal(g.labels().begin(), g.labels().end(), reread.labels().begin()));
    CHECK(std::equal(g.edges().begin(), g.edges().end(), reread.edges().begin(),
                     reread.edges().end()));
    CHECK(graph_digest(reread) == graph_digest(g));
  }
}
