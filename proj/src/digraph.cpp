#include "wbsg/digraph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"

namespace wbsg {

DiGraph::DiGraph(std::size_t node_count, std::vector<Edge> edges,
                 std::vector<std::string> labels)
    : edges_(std::move(edges)), in_(node_count), out_(node_count),
      labels_(std::move(labels)) {
  if (node_count == 0) throw ConfigError("graph must have at least one node");
  if (labels_.empty()) {
    labels_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) labels_.push_back(std::to_string(i + 1));
  } else if (labels_.size() != node_count) {
    throw ConfigError(fmt::format("graph has {} nodes but {} labels", node_count,
                                  labels_.size()));
  }
  for (const Edge& e : edges_) {
    if (e.src >= node_count || e.dst >= node_count) {
      throw ConfigError(
          fmt::format("edge {} -> {} out of range for {} nodes", e.src, e.dst, node_count));
    }
    if (e.src == e.dst) {
      throw ConfigError(fmt::format("self-loop at node '{}'", labels_[e.src]));
    }
    out_[e.src].push_back(e.dst);
    in_[e.dst].push_back(e.src);
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(out_[i].begin(), out_[i].end());
    std::sort(in_[i].begin(), in_[i].end());
    auto dup = std::adjacent_find(out_[i].begin(), out_[i].end());
    if (dup != out_[i].end()) {
      throw ConfigError(
          fmt::format("duplicate edge '{}' -> '{}'", labels_[i], labels_[*dup]));
    }
  }
}

bool DiGraph::has_edge(NodeId src, NodeId dst) const {
  return std::binary_search(out_[src].begin(), out_[src].end(), dst);
}

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// BFS hop counts from source; kUnreached where no path exists.
std::vector<std::size_t> bfs_distances(const DiGraph& g, NodeId source, bool transposed) {
  std::vector<std::size_t> dist(g.node_count(), kUnreached);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    auto next = transposed ? g.in_neighbors(u) : g.out_neighbors(u);
    for (NodeId v : next) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool all_reached(const std::vector<std::size_t>& dist) {
  return std::none_of(dist.begin(), dist.end(),
                      [](std::size_t d) { return d == kUnreached; });
}

}  // namespace

bool validate_strongly_connected(const DiGraph& g) {
  if (g.node_count() < 2) return false;
  return all_reached(bfs_distances(g, 0, false)) && all_reached(bfs_distances(g, 0, true));
}

void require_strongly_connected(const DiGraph& g) {
  if (g.node_count() < 2) {
    throw ConfigError("graph must have at least two nodes");
  }
  auto forward = bfs_distances(g, 0, false);
  auto backward = bfs_distances(g, 0, true);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (forward[i] == kUnreached) {
      throw ConfigError(fmt::format("graph is not strongly connected: no path '{}' -> '{}'",
                                    g.label(0), g.label(i)));
    }
    if (backward[i] == kUnreached) {
      throw ConfigError(fmt::format("graph is not strongly connected: no path '{}' -> '{}'",
                                    g.label(i), g.label(0)));
    }
  }
}

GraphStats compute_stats(const DiGraph& g) {
  require_strongly_connected(g);
  GraphStats stats;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    auto dist = bfs_distances(g, s, false);
    stats.diameter = std::max(stats.diameter, *std::max_element(dist.begin(), dist.end()));
    stats.max_out_degree = std::max(stats.max_out_degree, g.out_degree(s));
  }
  return stats;
}

DiGraph parse_edge_list(std::istream& in) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string src, dst, extra;
    if (!(fields >> src >> dst) || (fields >> extra)) {
      throw ConfigError(fmt::format("line {}: expected 'SRC DST', got '{}'", line_no, line));
    }
    if (src == dst) {
      throw ConfigError(fmt::format("line {}: self-loop at '{}'", line_no, src));
    }
    NodeId s = intern(src);
    NodeId d = intern(dst);
    edges.push_back({s, d});
  }
  if (labels.empty()) throw ConfigError("edge list contains no edges");
  std::size_t n = labels.size();
  return DiGraph(n, std::move(edges), std::move(labels));
}

DiGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open graph file '{}'", path.string()));
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const DiGraph& g) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (NodeId i = 0; i < g.node_count(); ++i) {
    out << "# node " << i << ' ' << g.label(i) << '\n';
  }
  for (const Edge& e : g.edges()) {
    out << g.label(e.src) << ' ' << g.label(e.dst) << '\n';
  }
}

std::uint64_t graph_digest(const DiGraph& g) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(g.node_count()));
  for (const auto& label : g.labels()) {
    h.add(label);
    h.add(std::string_view("\n"));
  }
  for (const Edge& e : g.edges()) {
    h.add(static_cast<std::uint64_t>(e.src));
    h.add(static_cast<std::uint64_t>(e.dst));
  }
  return h.value();
}

}  // namespace wbsg
