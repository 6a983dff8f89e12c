#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wbsg/balancing.hpp"
#include "wbsg/digraph.hpp"
#include "wbsg/matrix.hpp"
#include "wbsg/objective.hpp"

namespace wbsg {

// Step-size sequence alpha(t).
class StepSchedule {
 public:
  enum class Kind { sqrt_default, constant, custom };

  // alpha(t) = 1 / sqrt(t + 1)
  static StepSchedule sqrt_default() { return StepSchedule(Kind::sqrt_default, 0.0, {}); }
  // Throws ConfigError for negative or non-finite c.
  static StepSchedule constant(double c);
  // alpha(t) = series[t]; asking past the end throws ConfigError.
  static StepSchedule custom(std::vector<double> series);
  // "sqrt" or "const:<c>".
  static StepSchedule parse(std::string_view text);

  double operator()(std::size_t t) const;
  Kind kind() const { return kind_; }
  std::string describe() const;

 private:
  StepSchedule(Kind kind, double constant, std::vector<double> series)
      : kind_(kind), constant_(constant), series_(std::move(series)) {}

  Kind kind_;
  double constant_;
  std::vector<double> series_;
};

inline double step_size(std::size_t t, const StepSchedule& schedule) { return schedule(t); }

struct RunState {
  std::size_t round = 0;
  Matrix estimates;  // n x d, row i is x_i(t)
  WeightVector weights;
  double step = 0.0;  // alpha(t)
};

// Everything needed to replay a run exactly.
struct ConfigDigest {
  std::string graph;
  std::string objective;
  std::string schedule;
  double safety = 0.0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;

  std::string to_string() const;
};

// States for rounds 0..T and the subgradients g(0)..g(T-1) that produced
// rounds 1..T.
struct RunTrace {
  std::vector<RunState> states;
  std::vector<Matrix> subgrads;
  ConfigDigest config;

  std::size_t rounds() const { return states.empty() ? 0 : states.size() - 1; }
  std::size_t node_count() const { return states.front().estimates.rows(); }
  std::size_t dimension() const { return states.front().estimates.cols(); }
};

struct StepResult {
  RunState next;
  Matrix subgrads;  // g(t), evaluated at x(t)
};

// Applies the estimate and weight updates simultaneously from the round-t
// snapshot. Throws InitializationError when some 1 - w_i d_i^out <= 0 and
// SubgradientBoundError when a subgradient exceeds the declared bound.
StepResult estimate_step(const DiGraph& g, const RunState& state, const ObjectiveSpec& obj,
                         const StepSchedule& schedule);

// Q(t): diagonal 1 - w_i d_i^out, entry (i, j) = w_j for j in N_in(i).
// Throws InitializationError if a diagonal entry is not positive.
PropagationMatrix build_Q(const DiGraph& g, const WeightVector& w);

// Full joint recursion for `rounds` rounds, weights initialized by
// init_weights(safety). Throws ConfigError for invalid graphs or shapes.
RunTrace run(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0, std::size_t rounds,
             const StepSchedule& schedule, double safety = kDefaultSafety);

// Same recursion from explicit initial weights.
RunTrace run_from_weights(const DiGraph& g, const ObjectiveSpec& obj, const Matrix& x0,
                          WeightVector w0, std::size_t rounds, const StepSchedule& schedule);

// x_hat_i(T) = sum_{t<=T} alpha(t) x_i(t) / sum_{t<=T} alpha(t)
Matrix ergodic_average(const RunTrace& trace, std::size_t T);

struct AuxiliarySequence {
  std::vector<std::vector<double>> y;  // y(0)..y(T)
  std::vector<double> y_hat;           // alpha-weighted average of y(0..T)
};

// y(0) = mean_i x_i(0); y(t+1) = y(t) - alpha(t)/n sum_i g_i(t).
AuxiliarySequence auxiliary_y(const RunTrace& trace, std::size_t T);

// y(t) evaluated directly as mean x(0) - 1/n sum_{s<t} alpha(s) sum_i g_i(s).
std::vector<double> auxiliary_y_direct(const RunTrace& trace, std::size_t t);

// Header "t,node,component,x,w,g,alpha" preceded by a "# config" line.
// Nodes are internal ids (graph.edges carries the label mapping). Rows every
// `stride` rounds plus the final round; g is empty at t = T.
void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t stride = 1);

std::string describe_graph(const DiGraph& g);

}  // namespace wbsg
