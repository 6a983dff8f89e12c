#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "wbsg/digraph.hpp"
#include "wbsg/engine.hpp"
#include "wbsg/node_actor.hpp"
#include "wbsg/objective.hpp"

namespace wbsg {

// Synchronous network of node actors with a global round barrier: all
// round-t broadcasts are delivered before any node computes round t+1.
// No drops, delays or reordering.
class SyncNetwork {
 public:
  SyncNetwork(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
              const WeightVector& w0);

  // Runs one round with step size alpha. Returns the subgradients used,
  // one row per node.
  Matrix step(double alpha);

  std::size_t round() const { return round_; }
  const std::vector<NodeActor>& actors() const { return actors_; }
  // Messages delivered in the last completed round (equals |E|).
  std::size_t last_delivery_count() const { return last_deliveries_; }

  Matrix estimates() const;
  WeightVector weights() const;

  // Called with every broadcast as it is put on the wire.
  void set_message_observer(std::function<void(const Broadcast&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  const DiGraph* graph_;
  std::size_t dimension_;
  std::vector<NodeActor> actors_;
  std::vector<Broadcast> outgoing_;
  std::size_t round_ = 0;
  std::size_t last_deliveries_ = 0;
  std::function<void(const Broadcast&)> observer_;
};

// Message-passing execution of the joint recursion. The returned trace is
// bit-identical to run() with the same inputs.
RunTrace simulate(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                  std::size_t rounds, const StepSchedule& schedule,
                  double safety = kDefaultSafety,
                  std::function<void(const Broadcast&)> observer = {});

RunTrace simulate_from_weights(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                               WeightVector w0, std::size_t rounds,
                               const StepSchedule& schedule,
                               std::function<void(const Broadcast&)> observer = {});

// True iff both traces have the same shape and every estimate, weight,
// step and subgradient matches bit for bit.
bool traces_bit_identical(const RunTrace& a, const RunTrace& b);

// CSV message log, header "t,sender,weight,weighted_estimate" (one
// weighted_estimate_k column per component when d > 1).
class MessageLogWriter {
 public:
  MessageLogWriter(std::ostream& out, std::size_t dimension);
  void operator()(const Broadcast& message);

 private:
  std::ostream* out_;
};

}  // namespace wbsg
