#pragma once

// Node-local side of the message-passing kernel. Deliberately independent
// of digraph.hpp: an actor knows its id, its out-degree, its own objective
// and state, and nothing about n or the rest of the graph.

#include <cstddef>
#include <span>
#include <vector>

#include "wbsg/objective.hpp"
#include "wbsg/types.hpp"

namespace wbsg {

// Round-t broadcast of node `sender`. Every out-neighbor receives the same
// payload.
struct Broadcast {
  NodeId sender = 0;
  std::vector<double> weighted_estimate;  // w_j(t) x_j(t)
  double weight = 0.0;                    // w_j(t)
  std::size_t round = 0;
};

// What the link layer hands a node at the start of a round: the ids on its
// incoming links and the messages that arrived on them.
struct Inbox {
  std::span<const NodeId> ports;
  std::vector<Broadcast> messages;
};

class NodeActor {
 public:
  NodeActor(NodeId id, std::size_t out_degree, LocalObjective objective, double subgrad_bound,
            std::vector<double> estimate, double weight, std::size_t round = 0);

  NodeId id() const { return id_; }
  std::size_t out_degree() const { return out_degree_; }
  std::size_t round() const { return round_; }
  const std::vector<double>& estimate() const { return x_; }
  double weight() const { return w_; }
  const LocalObjective& objective() const { return objective_; }
  double subgrad_bound() const { return subgrad_bound_; }

  Broadcast broadcast() const;

 private:
  NodeId id_;
  std::size_t out_degree_;
  LocalObjective objective_;
  double subgrad_bound_;
  std::vector<double> x_;
  double w_;
  std::size_t round_;
};

struct NodeRoundOutput {
  NodeActor next;
  Broadcast message;                 // the round-(t+1) broadcast of `next`
  std::vector<double> subgradient;   // g_i(t), exposed for tracing only
};

// One synchronous round at a single node. Throws SynchronyError if a port
// has no message, more than one, a message from a non-port sender, or a
// message from another round; InitializationError if 1 - w d_out <= 0;
// SubgradientBoundError if the local subgradient exceeds the bound.
NodeRoundOutput node_round(const NodeActor& actor, const Inbox& inbox, double alpha);

}  // namespace wbsg
