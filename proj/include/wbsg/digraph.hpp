#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wbsg/types.hpp"

namespace wbsg {

// Directed edge src -> dst: src sends, dst receives.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable directed graph on nodes 0..n-1.
//
// Edges keep their insertion order, which is what makes the label <-> id
// mapping reproducible when the graph is written back out: parsing the
// written file assigns ids in first-appearance order, the same order the
// edges were originally inserted in. Neighbor lists are sorted ascending;
// every neighbor sum in the library walks them in that order.
class DiGraph {
 public:
  // Throws ConfigError on self-loops, duplicate edges, endpoints out of
  // range, or a label count that does not match node_count. Empty labels
  // default to "1".."n".
  DiGraph(std::size_t node_count, std::vector<Edge> edges,
          std::vector<std::string> labels = {});

  std::size_t node_count() const { return in_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const NodeId> in_neighbors(NodeId i) const { return in_[i]; }
  std::span<const NodeId> out_neighbors(NodeId i) const { return out_[i]; }
  std::size_t in_degree(NodeId i) const { return in_[i].size(); }
  std::size_t out_degree(NodeId i) const { return out_[i].size(); }

  const std::string& label(NodeId i) const { return labels_[i]; }
  std::span<const std::string> labels() const { return labels_; }

  bool has_edge(NodeId src, NodeId dst) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::string> labels_;
};

// Structural quantities entering the safe-initialization bound.
struct GraphStats {
  std::size_t diameter = 0;
  std::size_t max_out_degree = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

// True iff every ordered pair has a directed path. Graphs with fewer than
// two nodes are rejected: the update rules divide by d_i^out >= 1.
bool validate_strongly_connected(const DiGraph& g);

// Throws ConfigError naming the problem when validation fails.
void require_strongly_connected(const DiGraph& g);

// Diameter by all-pairs BFS. Throws ConfigError if g is not strongly
// connected.
GraphStats compute_stats(const DiGraph& g);

// Edge-list text format: one "SRC DST" pair per line, whitespace separated,
// '#' lines and blank lines ignored. Labels are arbitrary tokens, mapped to
// ids in order of first appearance.
DiGraph parse_edge_list(std::istream& in);
DiGraph read_edge_list(const std::filesystem::path& path);

// Writes "# node <id> <label>" comment lines followed by the edges in
// insertion order. parse_edge_list on the output reproduces the ids whenever
// the insertion order introduces nodes in ascending id order, which holds
// for parsed and generated graphs.
void write_edge_list(std::ostream& out, const DiGraph& g);

// Stable FNV-1a digest of node count, labels and edge list.
std::uint64_t graph_digest(const DiGraph& g);

}  // namespace wbsg
