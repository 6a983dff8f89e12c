#include "wbsg/simkernel.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>

#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/update_rules.hpp"

namespace wbsg {

NodeActor::NodeActor(NodeId id, std::size_t out_degree, LocalObjective objective,
                     double subgrad_bound, std::vector<double> estimate, double weight,
                     std::size_t round)
    : id_(id), out_degree_(out_degree), objective_(std::move(objective)),
      subgrad_bound_(subgrad_bound), x_(std::move(estimate)), w_(weight), round_(round) {
  if (out_degree_ == 0) throw ConfigError(fmt::format("node {} has no out-neighbors", id_));
}

Broadcast NodeActor::broadcast() const {
  Broadcast b{id_, std::vector<double>(x_.size()), w_, round_};
  for (std::size_t k = 0; k < x_.size(); ++k) {
    b.weighted_estimate[k] = rules::weighted_estimate(w_, x_[k]);
  }
  return b;
}

NodeRoundOutput node_round(const NodeActor& actor, const Inbox& inbox, double alpha) {
  const std::size_t d = actor.estimate().size();

  std::vector<const Broadcast*> ordered;
  ordered.reserve(inbox.messages.size());
  for (const Broadcast& m : inbox.messages) {
    if (m.round != actor.round()) {
      throw SynchronyError(fmt::format("node {} in round {} got a round-{} message from {}",
                                       actor.id(), actor.round(), m.round, m.sender));
    }
    if (m.weighted_estimate.size() != d) {
      throw SynchronyError(
          fmt::format("node {} got a message of dimension {} from {}", actor.id(),
                      m.weighted_estimate.size(), m.sender));
    }
    ordered.push_back(&m);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Broadcast* a, const Broadcast* b) { return a->sender < b->sender; });

  std::vector<NodeId> ports(inbox.ports.begin(), inbox.ports.end());
  std::sort(ports.begin(), ports.end());
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if (ordered[k]->sender == ordered[k - 1]->sender) {
      throw SynchronyError(fmt::format("node {} round {}: duplicate message from {}",
                                       actor.id(), actor.round(), ordered[k]->sender));
    }
  }
  for (const Broadcast* m : ordered) {
    if (!std::binary_search(ports.begin(), ports.end(), m->sender)) {
      throw SynchronyError(fmt::format("node {} round {}: message from {} on no incoming link",
                                       actor.id(), actor.round(), m->sender));
    }
  }
  if (ordered.size() != ports.size()) {
    for (std::size_t k = 0; k < ports.size(); ++k) {
      if (k >= ordered.size() || ordered[k]->sender != ports[k]) {
        throw SynchronyError(fmt::format("node {} round {}: missing message from {}",
                                         actor.id(), actor.round(), ports[k]));
      }
    }
  }

  const double out_degree = static_cast<double>(actor.out_degree());
  const double coef = rules::self_coefficient(actor.weight(), out_degree);
  if (!(coef > 0.0)) {
    throw InitializationError(fmt::format(
        "round {}: node {} has 1 - w_i d_i^out = {} (w_i = {}); initial weights too large",
        actor.round(), actor.id(), format_real(coef), format_real(actor.weight())));
  }

  std::vector<double> g(d);
  actor.objective().subgradient(actor.estimate(), g);
  const double norm = subgradient_norm(g);
  if (!(norm <= actor.subgrad_bound())) {
    throw SubgradientBoundError(
        fmt::format("round {}: node {} subgradient norm {} exceeds declared bound {}",
                    actor.round(), actor.id(), format_real(norm),
                    format_real(actor.subgrad_bound())));
  }

  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k) {
    double in_sum = 0.0;
    for (const Broadcast* m : ordered) in_sum += m->weighted_estimate[k];
    x[k] = rules::next_estimate(actor.estimate()[k], coef, in_sum, alpha, g[k]);
  }
  double in_weight = 0.0;
  for (const Broadcast* m : ordered) in_weight += m->weight;
  const double w = rules::next_weight(actor.weight(), in_weight, out_degree);

  NodeActor next(actor.id(), actor.out_degree(), actor.objective(), actor.subgrad_bound(),
                 std::move(x), w, actor.round() + 1);
  Broadcast message = next.broadcast();
  return NodeRoundOutput{std::move(next), std::move(message), std::move(g)};
}

SyncNetwork::SyncNetwork(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                         const WeightVector& w0)
    : graph_(&g), dimension_(x0.cols()) {
  require_strongly_connected(g);
  if (obj.size() != g.node_count() || x0.rows() != g.node_count() ||
      w0.size() != g.node_count() || x0.cols() != obj.dimension) {
    throw ConfigError("network inputs sized inconsistently with the graph");
  }
  actors_.reserve(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    auto row = x0.row(i);
    actors_.emplace_back(i, g.out_degree(i), obj.locals[i], obj.subgrad_bound,
                         std::vector<double>(row.begin(), row.end()), w0[i]);
    outgoing_.push_back(actors_.back().broadcast());
  }
}

Matrix SyncNetwork::step(double alpha) {
  const DiGraph& g = *graph_;
  if (observer_) {
    for (const Broadcast& b : outgoing_) observer_(b);
  }

  // Delivery phase: each broadcast is copied onto every outgoing link.
  std::vector<Inbox> inboxes(g.node_count());
  std::size_t deliveries = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) inboxes[i].ports = g.in_neighbors(i);
  for (const Broadcast& b : outgoing_) {
    for (NodeId dst : g.out_neighbors(b.sender)) {
      inboxes[dst].messages.push_back(b);
      ++deliveries;
    }
  }

  // Compute phase; barrier afterwards.
  Matrix subgrads(g.node_count(), dimension_);
  std::vector<NodeActor> next;
  std::vector<Broadcast> next_out;
  next.reserve(actors_.size());
  next_out.reserve(actors_.size());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    NodeRoundOutput out = node_round(actors_[i], inboxes[i], alpha);
    std::copy(out.subgradient.begin(), out.subgradient.end(), subgrads.row(i).begin());
    next.push_back(std::move(out.next));
    next_out.push_back(std::move(out.message));
  }
  actors_ = std::move(next);
  outgoing_ = std::move(next_out);
  last_deliveries_ = deliveries;
  ++round_;
  return subgrads;
}

Matrix SyncNetwork::estimates() const {
  Matrix x(actors_.size(), dimension_);
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    std::copy(actors_[i].estimate().begin(), actors_[i].estimate().end(), x.row(i).begin());
  }
  return x;
}

WeightVector SyncNetwork::weights() const {
  WeightVector w{std::vector<double>(actors_.size()), round_};
  for (std::size_t i = 0; i < actors_.size(); ++i) w.weights[i] = actors_[i].weight();
  return w;
}

RunTrace simulate_from_weights(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                               WeightVector w0, std::size_t rounds,
                               const StepSchedule& schedule,
                               std::function<void(const Broadcast&)> observer) {
  if (rounds < 1) throw ConfigError("a run needs at least one round");
  SyncNetwork network(g, obj, x0, w0);
  network.set_message_observer(std::move(observer));

  RunTrace trace;
  trace.config = ConfigDigest{describe_graph(g), obj.id, schedule.describe(), 0.0, 0, rounds};
  trace.states.reserve(rounds + 1);
  trace.subgrads.reserve(rounds);
  trace.states.push_back(RunState{0, network.estimates(), network.weights(), schedule(0)});
  for (std::size_t t = 0; t < rounds; ++t) {
    trace.subgrads.push_back(network.step(schedule(t)));
    trace.states.push_back(
        RunState{network.round(), network.estimates(), network.weights(), schedule(t + 1)});
  }
  return trace;
}

RunTrace simulate(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                  std::size_t rounds, const StepSchedule& schedule, double safety,
                  std::function<void(const Broadcast&)> observer) {
  const GraphStats stats = compute_stats(g);
  RunTrace trace = simulate_from_weights(g, obj, x0, init_weights(g, stats, safety), rounds,
                                         schedule, std::move(observer));
  trace.config.safety = safety;
  return trace;
}

namespace {

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

bool traces_bit_identical(const RunTrace& a, const RunTrace& b) {
  if (a.states.size() != b.states.size() || a.subgrads.size() != b.subgrads.size()) return false;
  for (std::size_t t = 0; t < a.states.size(); ++t) {
    const RunState& x = a.states[t];
    const RunState& y = b.states[t];
    if (x.round != y.round || x.estimates.rows() != y.estimates.rows() ||
        !same_bits(x.estimates.data(), y.estimates.data()) ||
        !same_bits(x.weights.weights, y.weights.weights) ||
        !same_bits(std::span(&x.step, 1), std::span(&y.step, 1))) {
      return false;
    }
  }
  for (std::size_t t = 0; t < a.subgrads.size(); ++t) {
    if (!same_bits(a.subgrads[t].data(), b.subgrads[t].data())) return false;
  }
  return true;
}

MessageLogWriter::MessageLogWriter(std::ostream& out, std::size_t dimension) : out_(&out) {
  out << "t,sender,weight";
  if (dimension == 1) {
    out << ",weighted_estimate";
  } else {
    for (std::size_t k = 0; k < dimension; ++k) out << ",weighted_estimate_" << k;
  }
  out << '\n';
}

void MessageLogWriter::operator()(const Broadcast& message) {
  *out_ << message.round << ',' << message.sender << ',' << format_real(message.weight);
  for (double v : message.weighted_estimate) *out_ << ',' << format_real(v);
  *out_ << '\n';
}

}  // namespace wbsg
