#include "wbsg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"

namespace wbsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_deviation_from_uniform(const Matrix& phi) {
  const double target = 1.0 / static_cast<double>(phi.rows());
  double worst = 0.0;
  for (double v : phi.data()) worst = std::max(worst, std::abs(v - target));
  return worst;
}

double column_sum_error(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, j);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

void check_round(const RunTrace& trace, std::size_t T) {
  if (T > trace.rounds()) {
    throw ConfigError(fmt::format("round {} beyond trace of {} rounds", T, trace.rounds()));
  }
}

}  // namespace

PhiSeries phi_series(const DiGraph& g, const RunTrace& trace, std::size_t s, std::size_t t_max) {
  if (s > t_max) throw ConfigError("phi_series needs s <= t_max");
  check_round(trace, t_max);
  const std::size_t n = g.node_count();

  PhiSeries series;
  series.start = s;
  series.deviations.reserve(t_max - s + 2);
  Matrix phi = Matrix::identity(n);
  Matrix next(n, n);
  series.deviations.push_back(max_deviation_from_uniform(phi));

  for (std::size_t t = s; t <= t_max; ++t) {
    const WeightVector& w = trace.states[t].weights;
    for (NodeId i = 0; i < n; ++i) {
      const double coef = 1.0 - w[i] * static_cast<double>(g.out_degree(i));
      auto out = next.row(i);
      auto own = phi.row(i);
      for (std::size_t c = 0; c < n; ++c) out[c] = coef * own[c];
      for (NodeId j : g.in_neighbors(i)) {
        auto other = phi.row(j);
        for (std::size_t c = 0; c < n; ++c) out[c] += w[j] * other[c];
      }
    }
    std::swap(phi, next);
    series.deviations.push_back(max_deviation_from_uniform(phi));
    series.max_column_sum_error = std::max(series.max_column_sum_error, column_sum_error(phi));
  }
  return series;
}

double GeometricFit::bound(std::size_t k) const {
  return C * std::pow(lambda, static_cast<double>(k));
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ConfigError("line fit needs two equally sized samples of length >= 2");
  }
  const double m = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConfigError("line fit needs at least two distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

GeometricFit fit_geometric(const PhiSeries& series, const FitWindow& window) {
  std::vector<double> ks;
  std::vector<double> logs;
  const std::size_t last = std::min(window.last, series.deviations.size() - 1);
  for (std::size_t k = std::max<std::size_t>(window.first, 1); k <= last; ++k) {
    const double dev = series.deviations[k];
    if (!(dev > window.floor)) break;
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(dev));
  }
  if (ks.size() < kMinFitSamples) {
    throw ConvergenceError(
        fmt::format("only {} deviations above {} in the fit window; need {}", ks.size(),
                    window.floor, kMinFitSamples));
  }
  const LinearFit line = fit_line(ks, logs);
  GeometricFit fit;
  fit.lambda = std::exp(line.slope);
  fit.C = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.first = static_cast<std::size_t>(ks.front());
  fit.last = static_cast<std::size_t>(ks.back());
  return fit;
}

double consensus_violation(const Matrix& estimates) {
  double worst = 0.0;
  for (std::size_t k = 0; k < estimates.cols(); ++k) {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < estimates.rows(); ++i) {
      lo = std::min(lo, estimates(i, k));
      hi = std::max(hi, estimates(i, k));
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double optimality_gap(const ObjectiveSpec& obj, const Matrix& points) {
  if (!obj.minimizer) {
    throw ConfigError(fmt::format("objective '{}' has no known minimizer", obj.id));
  }
  return obj.total_value(points) - obj.total_value_at(*obj.minimizer);
}

double optimality_gap(const ObjectiveSpec& obj, std::span<const double> point) {
  if (!obj.minimizer) {
    throw ConfigError(fmt::format("objective '{}' has no known minimizer", obj.id));
  }
  return obj.total_value_at(point) - obj.total_value_at(*obj.minimizer);
}

BoundInputs bound_inputs(const RunTrace& trace, const ObjectiveSpec& obj,
                         const GeometricFit& fit) {
  BoundInputs in;
  in.n = trace.node_count();
  in.L = obj.subgrad_bound;
  in.C = fit.C;
  in.lambda = fit.lambda;
  for (double v : trace.states[0].estimates.data()) in.x0_l1 += std::abs(v);
  return in;
}

std::vector<double> disagreement_bound_series(const RunTrace& trace, const BoundInputs& in,
                                              std::size_t T) {
  check_round(trace, T);
  const double n = static_cast<double>(in.n);
  std::vector<double> bound(T + 1);
  double tail = 0.0;  // sum_{s<t} lambda^(t-1-s) alpha(s)
  double lambda_t = 1.0;
  for (std::size_t t = 0; t <= T; ++t) {
    bound[t] = in.C * lambda_t * in.x0_l1 + n * in.L * in.C * tail;
    tail = in.lambda * tail + trace.states[t].step;
    lambda_t *= in.lambda;
  }
  return bound;
}

double ergodic_disagreement_bound(const RunTrace& trace, const BoundInputs& in, std::size_t T) {
  const auto pointwise = disagreement_bound_series(trace, in, T);
  double total_step = 0.0;
  double weighted = 0.0;
  for (std::size_t t = 0; t <= T; ++t) {
    total_step += trace.states[t].step;
    weighted += trace.states[t].step * pointwise[t];
  }
  return 2.0 / total_step * weighted;
}

double optimality_bound(const RunTrace& trace, const ObjectiveSpec& obj,
                        const BoundInputs& in, std::size_t T) {
  check_round(trace, T);
  if (!obj.minimizer) {
    throw ConfigError(fmt::format("objective '{}' has no known minimizer", obj.id));
  }
  const double n = static_cast<double>(in.n);
  const AuxiliarySequence aux = auxiliary_y(trace, T);
  const double y0_dist = euclidean_distance(aux.y[0], *obj.minimizer);

  double total_step = 0.0;
  double step_sq = 0.0;
  double disagreement = 0.0;  // sum_t alpha(t) sum_i |y(t) - x_i(t)|
  double propagated = 0.0;    // sum_t alpha(t) (C l^t |x0|_1 + L n C sum_{s<t} l^(t-s) alpha(s))
  double tail = 0.0;
  double lambda_t = 1.0;
  for (std::size_t t = 0; t <= T; ++t) {
    const RunState& s = trace.states[t];
    total_step += s.step;
    step_sq += s.step * s.step;
    double spread = 0.0;
    for (std::size_t i = 0; i < in.n; ++i) spread += euclidean_distance(aux.y[t], s.estimates.row(i));
    disagreement += s.step * spread;
    propagated += s.step * (in.C * lambda_t * in.x0_l1 + in.L * n * in.C * in.lambda * tail);
    tail = in.lambda * tail + s.step;
    lambda_t *= in.lambda;
  }
  return n / (2.0 * total_step) * y0_dist * y0_dist +
         n * in.L * in.L / (2.0 * total_step) * step_sq +
         2.0 * in.L / total_step * disagreement + in.L / total_step * propagated;
}

double consensus_rate_bound(const BoundInputs& in, std::size_t T) {
  if (!(in.lambda < 1.0)) return kInf;
  const double n = static_cast<double>(in.n);
  const double root = std::sqrt(static_cast<double>(T));
  const double mixing = 1.0 / (1.0 - in.lambda);
  const double log_t = std::log(static_cast<double>(T));
  return 2.0 * (in.C * mixing * in.x0_l1 / root + in.L * n * in.C * 4.0 * mixing * log_t / root);
}

double optimality_rate_bound(const BoundInputs& in, double y0_minus_xstar_sq, std::size_t T) {
  if (!(in.lambda < 1.0)) return kInf;
  const double n = static_cast<double>(in.n);
  const double L = in.L;
  const double root = std::sqrt(static_cast<double>(T));
  const double mixing = 1.0 / (1.0 - in.lambda);
  const double log_t = std::log(static_cast<double>(T));
  return n * y0_minus_xstar_sq / (2.0 * root) + n * L * L / 2.0 * (2.0 * log_t / root) +
         2.0 * L * in.C * mixing * in.x0_l1 / root +
         2.0 * L * L * n * in.C * 4.0 * mixing * log_t / root +
         L * in.C * mixing * in.x0_l1 / root + n * L * L * in.C * 4.0 * mixing * log_t / root;
}

DiagnosticsReport rate_report(const RunTrace& trace, const ObjectiveSpec& obj,
                              const GeometricFit& fit, std::span<const std::size_t> checkpoints,
                              double slack) {
  DiagnosticsReport report;
  report.fitted_C = fit.C;
  report.fitted_lambda = fit.lambda;
  report.slack = slack;
  report.consensus_violation.reserve(trace.states.size());
  for (const RunState& s : trace.states) {
    report.consensus_violation.push_back(consensus_violation(s.estimates));
  }

  const BoundInputs in = bound_inputs(trace, obj, fit);
  const bool sqrt_schedule = trace.config.schedule == "sqrt";
  const AuxiliarySequence y0 = auxiliary_y(trace, 0);
  double y0_sq = 0.0;
  if (obj.minimizer) {
    const double dist = euclidean_distance(y0.y[0], *obj.minimizer);
    y0_sq = dist * dist;
  }

  for (std::size_t T : checkpoints) {
    if (T < kMinCheckpoint) {
      throw ConfigError(fmt::format("checkpoint {} below the minimum of {}", T, kMinCheckpoint));
    }
    check_round(trace, T);
    CheckpointRow row;
    row.T = T;
    const Matrix x_hat = ergodic_average(trace, T);
    const AuxiliarySequence aux = auxiliary_y(trace, T);
    row.ergodic_violation = consensus_violation(x_hat);
    for (std::size_t i = 0; i < x_hat.rows(); ++i) {
      row.ergodic_to_y = std::max(row.ergodic_to_y, euclidean_distance(x_hat.row(i), aux.y_hat));
    }
    const double scale = std::sqrt(static_cast<double>(T)) / std::log(static_cast<double>(T));
    row.violation_statistic = row.ergodic_violation * scale;
    row.bound_ergodic_general = ergodic_disagreement_bound(trace, in, T);
    row.consensus_rate_rhs = consensus_rate_bound(in, T);
    row.within_bounds = row.ergodic_to_y <= slack * row.bound_ergodic_general;
    if (obj.minimizer) {
      row.optimality_gap = optimality_gap(obj, x_hat);
      row.rate_statistic = row.optimality_gap * scale;
      row.bound_optimality_general = optimality_bound(trace, obj, in, T);
      row.optimality_rate_rhs = optimality_rate_bound(in, y0_sq, T);
      row.within_bounds =
          row.within_bounds && row.optimality_gap <= slack * row.bound_optimality_general;
    }
    if (sqrt_schedule) {
      row.within_bounds = row.within_bounds &&
                          row.ergodic_violation <= slack * row.consensus_rate_rhs &&
                          (!obj.minimizer || row.optimality_gap <= slack * row.optimality_rate_rhs);
    }
    report.within_bounds = report.within_bounds && row.within_bounds;
    report.checkpoints.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& out, const DiagnosticsReport& report,
                      const ConfigDigest& config) {
  out << "# config " << config.to_string() << '\n';
  out << "# fitted_C " << format_real(report.fitted_C) << " fitted_lambda "
      << format_real(report.fitted_lambda) << " slack " << format_real(report.slack) << '\n';
  out << "T,ergodic_violation,optimality_gap,rate_statistic,bound_rhs_eq27,bound_rhs_eq28\n";
  for (const CheckpointRow& row : report.checkpoints) {
    out << row.T << ',' << format_real(row.ergodic_violation) << ','
        << format_real(row.optimality_gap) << ',' << format_real(row.rate_statistic) << ','
        << format_real(row.consensus_rate_rhs) << ',' << format_real(row.optimality_rate_rhs) << '\n';
  }
}

std::vector<double> running_max(std::span<const double> values, std::size_t width) {
  if (width == 0) throw ConfigError("running max width must be positive");
  std::vector<double> out(values.size());
  std::deque<std::size_t> window;  // indices with decreasing values
  for (std::size_t i = 0; i < values.size(); ++i) {
    while (!window.empty() && values[window.back()] <= values[i]) window.pop_back();
    window.push_back(i);
    if (window.front() + width <= i) window.pop_front();
    out[i] = values[window.front()];
  }
  return out;
}

}  // namespace wbsg
