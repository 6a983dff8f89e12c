#include "wbsg/engine.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/update_rules.hpp"

namespace wbsg {

StepSchedule StepSchedule::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ConfigError(fmt::format("constant step size must be non-negative, got {}", c));
  }
  return StepSchedule(Kind::constant, c, {});
}

StepSchedule StepSchedule::custom(std::vector<double> series) {
  for (double a : series) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError(fmt::format("step sizes must be non-negative, got {}", a));
    }
  }
  return StepSchedule(Kind::custom, 0.0, std::move(series));
}

StepSchedule StepSchedule::parse(std::string_view text) {
  if (text == "sqrt") return sqrt_default();
  constexpr std::string_view prefix = "const:";
  if (text.starts_with(prefix)) {
    auto rest = text.substr(prefix.size());
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), c);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) {
      throw ConfigError(fmt::format("bad constant step size '{}'", rest));
    }
    return constant(c);
  }
  throw ConfigError(fmt::format("unknown schedule '{}' (expected sqrt or const:c)", text));
}

double StepSchedule::operator()(std::size_t t) const {
  switch (kind_) {
    case Kind::sqrt_default:
      return 1.0 / std::sqrt(static_cast<double>(t) + 1.0);
    case Kind::constant:
      return constant_;
    case Kind::custom:
      if (t >= series_.size()) {
        throw ConfigError(fmt::format("custom step series has no entry for round {}", t));
      }
      return series_[t];
  }
  return 0.0;
}

std::string StepSchedule::describe() const {
  switch (kind_) {
    case Kind::sqrt_default:
      return "sqrt";
    case Kind::constant:
      return "const:" + format_real(constant_);
    case Kind::custom: {
      Fnv1a h;
      for (double a : series_) h.add(format_real(a));
      return fmt::format("custom:{}:{:016x}", series_.size(), h.value());
    }
  }
  return {};
}

std::string ConfigDigest::to_string() const {
  return fmt::format("graph={} objective={} schedule={} safety={} seed={} rounds={}", graph,
                     objective, schedule, format_real(safety), seed, rounds);
}

std::string describe_graph(const DiGraph& g) {
  return fmt::format("n{}-m{}-{:016x}", g.node_count(), g.edge_count(), graph_digest(g));
}

PropagationMatrix build_Q(const DiGraph& g, const WeightVector& w) {
  const std::size_t n = g.node_count();
  PropagationMatrix q{Matrix(n, n), MatrixKind::estimate_Q};
  for (NodeId i = 0; i < n; ++i) {
    const double coef = rules::self_coefficient(w[i], static_cast<double>(g.out_degree(i)));
    if (!(coef > 0.0)) {
      throw InitializationError(fmt::format(
          "node '{}': 1 - w_i d_i^out = {} is not positive (w_i = {})", g.label(i),
          format_real(coef), format_real(w[i])));
    }
    q.entries(i, i) = coef;
    for (NodeId j : g.in_neighbors(i)) q.entries(i, j) = w[j];
  }
  return q;
}

StepResult estimate_step(const DiGraph& g, const RunState& state, const ObjectiveSpec& obj,
                         const StepSchedule& schedule) {
  const std::size_t n = g.node_count();
  const std::size_t d = state.estimates.cols();
  const Matrix& x = state.estimates;
  const WeightVector& w = state.weights;

  StepResult result{RunState{state.round + 1, Matrix(n, d), WeightVector{{}, w.round + 1},
                             schedule(state.round + 1)},
                    Matrix(n, d)};
  result.next.weights.weights.resize(n);

  for (NodeId i = 0; i < n; ++i) {
    const double out_degree = static_cast<double>(g.out_degree(i));
    const double coef = rules::self_coefficient(w[i], out_degree);
    if (!(coef > 0.0)) {
      throw InitializationError(fmt::format(
          "round {}: node '{}' has 1 - w_i d_i^out = {} (w_i = {}); initial weights too large",
          state.round, g.label(i), format_real(coef), format_real(w[i])));
    }

    auto gi = result.subgrads.row(i);
    obj.locals[i].subgradient(x.row(i), gi);
    const double norm = subgradient_norm(gi);
    if (!(norm <= obj.subgrad_bound)) {
      throw SubgradientBoundError(
          fmt::format("round {}: node '{}' subgradient norm {} exceeds declared bound {}",
                      state.round, g.label(i), format_real(norm), format_real(obj.subgrad_bound)));
    }

    for (std::size_t k = 0; k < d; ++k) {
      double in_sum = 0.0;
      for (NodeId j : g.in_neighbors(i)) in_sum += rules::weighted_estimate(w[j], x(j, k));
      result.next.estimates(i, k) = rules::next_estimate(x(i, k), coef, in_sum, state.step, gi[k]);
    }

    double in_weight = 0.0;
    for (NodeId j : g.in_neighbors(i)) in_weight += w[j];
    result.next.weights.weights[i] = rules::next_weight(w[i], in_weight, out_degree);
  }
  return result;
}

namespace {

void check_run_inputs(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                      std::size_t rounds) {
  require_strongly_connected(g);
  if (obj.size() != g.node_count()) {
    throw ConfigError(fmt::format("objective has {} agents but graph has {} nodes", obj.size(),
                                  g.node_count()));
  }
  if (x0.rows() != g.node_count() || x0.cols() != obj.dimension || x0.cols() == 0) {
    throw ConfigError(fmt::format("initial estimates are {}x{}, expected {}x{}", x0.rows(),
                                  x0.cols(), g.node_count(), obj.dimension));
  }
  if (rounds < 1) throw ConfigError("a run needs at least one round");
}

}  // namespace

RunTrace run_from_weights(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                          WeightVector w0, std::size_t rounds, const StepSchedule& schedule) {
  check_run_inputs(g, obj, x0, rounds);
  if (w0.size() != g.node_count()) throw ConfigError("initial weights sized wrong for graph");

  RunTrace trace;
  trace.config = ConfigDigest{describe_graph(g), obj.id, schedule.describe(), 0.0, 0, rounds};
  trace.states.reserve(rounds + 1);
  trace.subgrads.reserve(rounds);
  trace.states.push_back(RunState{0, x0, std::move(w0), schedule(0)});
  for (std::size_t t = 0; t < rounds; ++t) {
    StepResult step = estimate_step(g, trace.states.back(), obj, schedule);
    trace.subgrads.push_back(std::move(step.subgrads));
    trace.states.push_back(std::move(step.next));
  }
  return trace;
}

RunTrace run(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0, std::size_t rounds,
             const StepSchedule& schedule, double safety) {
  const GraphStats stats = compute_stats(g);
  RunTrace trace =
      run_from_weights(g, obj, x0, init_weights(g, stats, safety), rounds, schedule);
  trace.config.safety = safety;
  return trace;
}

Matrix ergodic_average(const RunTrace& trace, std::size_t T) {
  if (T > trace.rounds()) {
    throw ConfigError(fmt::format("round {} beyond trace of {} rounds", T, trace.rounds()));
  }
  const std::size_t n = trace.node_count();
  const std::size_t d = trace.dimension();
  Matrix weighted(n, d);
  double total = 0.0;
  for (std::size_t t = 0; t <= T; ++t) {
    const RunState& s = trace.states[t];
    total += s.step;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) weighted(i, k) += s.step * s.estimates(i, k);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) weighted(i, k) /= total;
  }
  return weighted;
}

AuxiliarySequence auxiliary_y(const RunTrace& trace, std::size_t T) {
  if (T > trace.rounds()) {
    throw ConfigError(fmt::format("round {} beyond trace of {} rounds", T, trace.rounds()));
  }
  const std::size_t n = trace.node_count();
  const std::size_t d = trace.dimension();
  const double inv_n = 1.0 / static_cast<double>(n);

  AuxiliarySequence aux;
  aux.y.reserve(T + 1);
  std::vector<double> y(d, 0.0);
  const Matrix& x0 = trace.states[0].estimates;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) y[k] += x0(i, k);
    y[k] *= inv_n;
  }
  aux.y.push_back(y);
  for (std::size_t t = 0; t < T; ++t) {
    const Matrix& g = trace.subgrads[t];
    const double alpha = trace.states[t].step;
    for (std::size_t k = 0; k < d; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += g(i, k);
      y[k] -= alpha * inv_n * sum;
    }
    aux.y.push_back(y);
  }

  aux.y_hat.assign(d, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t <= T; ++t) {
    const double alpha = trace.states[t].step;
    total += alpha;
    for (std::size_t k = 0; k < d; ++k) aux.y_hat[k] += alpha * aux.y[t][k];
  }
  for (double& v : aux.y_hat) v /= total;
  return aux;
}

std::vector<double> auxiliary_y_direct(const RunTrace& trace, std::size_t t) {
  if (t > trace.rounds()) {
    throw ConfigError(fmt::format("round {} beyond trace of {} rounds", t, trace.rounds()));
  }
  const std::size_t n = trace.node_count();
  const std::size_t d = trace.dimension();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> y(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double initial = 0.0;
    for (std::size_t i = 0; i < n; ++i) initial += trace.states[0].estimates(i, k);
    double drift = 0.0;
    for (std::size_t s = 0; s < t; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += trace.subgrads[s](i, k);
      drift += trace.states[s].step * sum;
    }
    y[k] = inv_n * initial - inv_n * drift;
  }
  return y;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << "# config " << trace.config.to_string() << '\n';
  out << "t,node,component,x,w,g,alpha\n";
  const std::size_t T = trace.rounds();
  for (std::size_t t = 0; t <= T; ++t) {
    if (t % stride != 0 && t != T) continue;
    const RunState& s = trace.states[t];
    const std::string alpha = format_real(s.step);
    for (std::size_t i = 0; i < trace.node_count(); ++i) {
      const std::string w = format_real(s.weights[i]);
      for (std::size_t k = 0; k < trace.dimension(); ++k) {
        out << t << ',' << i << ',' << k << ',' << format_real(s.estimates(i, k)) << ',' << w
            << ',';
        if (t < T) out << format_real(trace.subgrads[t](i, k));
        out << ',' << alpha << '\n';
      }
    }
  }
}

}  // namespace wbsg
