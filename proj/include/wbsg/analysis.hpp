#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wbsg/digraph.hpp"
#include "wbsg/engine.hpp"
#include "wbsg/matrix.hpp"
#include "wbsg/objective.hpp"

namespace wbsg {

// Deviation of the transition products Phi(t:s) = Q(t)...Q(s) from the
// uniform matrix. deviations[k] = max_ij |Phi(s+k-1:s)_ij - 1/n|, so
// deviations[0] belongs to the empty product (identity) and deviations[k]
// to a product of k factors.
struct PhiSeries {
  std::size_t start = 0;
  std::vector<double> deviations;
  // Worst |column sum - 1| over every product formed.
  double max_column_sum_error = 0.0;
};

// Builds Phi(t:s) incrementally from the per-round weights recorded in the
// trace, for t = s..t_max.
PhiSeries phi_series(const DiGraph& g, const RunTrace& trace, std::size_t s, std::size_t t_max);

// Samples used by fit_geometric: product lengths k in [first, last], cut at
// the first deviation <= floor (double rounding noise lives below ~1e-15, so
// the floor keeps the fit on the geometric part).
struct FitWindow {
  std::size_t first = 1;
  std::size_t last = static_cast<std::size_t>(-1);
  double floor = 1e-12;
};

struct GeometricFit {
  double C = 0.0;
  double lambda = 0.0;
  double r_squared = 0.0;
  std::size_t first = 0;  // product lengths actually fitted
  std::size_t last = 0;

  double bound(std::size_t k) const;  // C lambda^k
};

inline constexpr std::size_t kMinFitSamples = 10;

// Least-squares line through (k, log deviation_k): lambda = exp(slope),
// C = exp(intercept). Throws ConvergenceError with fewer than
// kMinFitSamples usable samples.
GeometricFit fit_geometric(const PhiSeries& series, const FitWindow& window = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares; xs and ys must have equal length >= 2.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// max_{i,j} ||x_i - x_j||_inf over the rows of estimates.
double consensus_violation(const Matrix& estimates);

// F(point) - F(x*) with F(x) = sum_i f_i(x_i). Throws ConfigError when the
// objective carries no minimizer. Negative values are possible away from
// consensus.
double optimality_gap(const ObjectiveSpec& obj, const Matrix& points);
double optimality_gap(const ObjectiveSpec& obj, std::span<const double> point);

inline constexpr double kBoundSlack = 1.5;
inline constexpr std::size_t kMinCheckpoint = 4;

// Constants plugged into the right-hand sides of the convergence bounds.
struct BoundInputs {
  std::size_t n = 0;
  double L = 0.0;
  double C = 0.0;
  double lambda = 0.0;
  double x0_l1 = 0.0;  // ||x(0)||_1 (all components)
};

BoundInputs bound_inputs(const RunTrace& trace, const ObjectiveSpec& obj,
                         const GeometricFit& fit);

// Pointwise disagreement bound for |x_i(t) - y(t)|, evaluated for
// t = 0..T: C lambda^t ||x0||_1 + n L C sum_{s<t} lambda^(t-s-1) alpha(s).
std::vector<double> disagreement_bound_series(const RunTrace& trace, const BoundInputs& in,
                                              std::size_t T);

// Bound on max_i |x_hat_i(T) - y_hat(T)|, general step sizes.
double ergodic_disagreement_bound(const RunTrace& trace, const BoundInputs& in, std::size_t T);

// Bound on F(x_hat(T)) - F(x*), general step sizes. Uses the measured
// sum_i |y(t) - x_i(t)| from the trace.
double optimality_bound(const RunTrace& trace, const ObjectiveSpec& obj,
                        const BoundInputs& in, std::size_t T);

// Rate-form bounds for alpha(t) = 1/sqrt(t+1), T >= 4. The x(0) terms
// vanish when x(0) = 0, leaving 2 L n C 4/(1-lambda) log T / sqrt T for the
// pairwise ergodic disagreement. Both return +inf when lambda >= 1.
double consensus_rate_bound(const BoundInputs& in, std::size_t T);
double optimality_rate_bound(const BoundInputs& in, double y0_minus_xstar_sq, std::size_t T);

struct CheckpointRow {
  std::size_t T = 0;
  double ergodic_violation = 0.0;   // max_ij ||x_hat_i - x_hat_j||_inf
  double ergodic_to_y = 0.0;        // max_i ||x_hat_i - y_hat||
  double optimality_gap = 0.0;      // F(x_hat(T)) - F(x*)
  double rate_statistic = 0.0;      // gap sqrt(T) / log T
  double violation_statistic = 0.0; // ergodic_violation sqrt(T) / log T
  double bound_ergodic_general = 0.0;
  double bound_optimality_general = 0.0;
  double consensus_rate_rhs = 0.0;
  double optimality_rate_rhs = 0.0;
  bool within_bounds = true;    // every measured value <= slack * its bound
};

struct DiagnosticsReport {
  std::vector<double> consensus_violation;  // per round
  std::vector<CheckpointRow> checkpoints;
  double fitted_C = 0.0;
  double fitted_lambda = 0.0;
  double slack = kBoundSlack;
  bool within_bounds = true;
};

// Evaluates ergodic violations, gaps and all bound right-hand sides at each
// checkpoint (each must be >= 4 and within the trace). The rate-form bounds
// are only meaningful for the sqrt schedule; for other schedules they are
// reported but not used in within_bounds.
DiagnosticsReport rate_report(const RunTrace& trace, const ObjectiveSpec& obj,
                              const GeometricFit& fit, std::span<const std::size_t> checkpoints,
                              double slack = kBoundSlack);

// Header "T,ergodic_violation,optimality_gap,rate_statistic,bound_rhs_eq27,
// bound_rhs_eq28" preceded by "#" lines carrying the fitted constants and
// the config digest.
void write_report_csv(std::ostream& out, const DiagnosticsReport& report,
                      const ConfigDigest& config);

// Running max over the trailing `width` rounds.
std::vector<double> running_max(std::span<const double> values, std::size_t width);

}  // namespace wbsg
