#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "wbsg/digraph.hpp"
#include "wbsg/matrix.hpp"

namespace wbsg {

// Per-node scaling weights w_i(t).
struct WeightVector {
  std::vector<double> weights;
  std::size_t round = 0;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

enum class MatrixKind { weight_P, estimate_Q };

// Either the weight iteration P = 1/2 (I + D^-1 A), which is row-sum
// irregular but similar to the column-stochastic 1/2 (I + A D^-1), or the
// column-stochastic estimate mixing matrix Q(t).
struct PropagationMatrix {
  Matrix entries;
  MatrixKind kind = MatrixKind::weight_P;

  // max_j |sum_i M_ij - 1|
  double column_sum_error() const;
  // max_i |sum_j M_ij - 1|
  double row_sum_error() const;
};

inline constexpr double kDefaultSafety = 0.5;
inline constexpr double kDefaultBalanceTolerance = 1e-9;
inline constexpr std::size_t kDefaultBalanceMaxRounds = 1'000'000;

// (1/d*)^(2D+1): uniform initial weights at or below this keep
// w_i(t) d_i^out <= 1 for every round.
double safe_weight_bound(const GraphStats& stats);

// Uniform w_i(0) = safety * safe_weight_bound(stats). safety must lie in
// (0, 1]; the default 1/2 keeps the coefficient 1 - w_i d_i^out strictly
// positive even on directed cycles where the bound is attained.
WeightVector init_weights(const DiGraph& g, const GraphStats& stats,
                          double safety = kDefaultSafety);

// One synchronous round of the weight iteration.
WeightVector weight_step(const DiGraph& g, const WeightVector& w);

PropagationMatrix build_P(const DiGraph& g);

// max_i | w_i d_i^out - sum_{j in N_in(i)} w_j |; zero iff w balances g.
double balance_residual(const DiGraph& g, const WeightVector& w);

// max_i w_i d_i^out; must stay below 1 for the estimate update.
double max_outgoing_weight(const DiGraph& g, const WeightVector& w);

struct BalanceResult {
  WeightVector weights;
  double residual = 0.0;
  std::size_t rounds = 0;
};

// Iterates weight_step until balance_residual <= tol. Throws
// ConvergenceError after max_rounds.
BalanceResult run_to_balance(const DiGraph& g, WeightVector w0,
                             double tol = kDefaultBalanceTolerance,
                             std::size_t max_rounds = kDefaultBalanceMaxRounds);

// "label weight" lines followed by "residual <value>".
void write_balance_certificate(std::ostream& out, const DiGraph& g, const WeightVector& w);

}  // namespace wbsg
