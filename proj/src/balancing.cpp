#include "wbsg/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/update_rules.hpp"

namespace wbsg {

double PropagationMatrix::column_sum_error() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < entries.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < entries.rows(); ++i) sum += entries(i, j);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double PropagationMatrix::row_sum_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < entries.rows(); ++i) {
    double sum = 0.0;
    for (double v : entries.row(i)) sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double safe_weight_bound(const GraphStats& stats) {
  return std::pow(1.0 / static_cast<double>(stats.max_out_degree),
                  static_cast<double>(2 * stats.diameter + 1));
}

WeightVector init_weights(const DiGraph& g, const GraphStats& stats, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw ConfigError(fmt::format("safety factor {} outside (0, 1]", safety));
  }
  return WeightVector{std::vector<double>(g.node_count(), safety * safe_weight_bound(stats)),
                      0};
}

WeightVector weight_step(const DiGraph& g, const WeightVector& w) {
  WeightVector next{std::vector<double>(g.node_count()), w.round + 1};
  for (NodeId i = 0; i < g.node_count(); ++i) {
    double in_sum = 0.0;
    for (NodeId j : g.in_neighbors(i)) in_sum += w[j];
    next.weights[i] =
        rules::next_weight(w[i], in_sum, static_cast<double>(g.out_degree(i)));
  }
  return next;
}

PropagationMatrix build_P(const DiGraph& g) {
  const std::size_t n = g.node_count();
  PropagationMatrix p{Matrix(n, n), MatrixKind::weight_P};
  for (NodeId i = 0; i < n; ++i) {
    p.entries(i, i) = 0.5;
    const double off = 0.5 / static_cast<double>(g.out_degree(i));
    for (NodeId j : g.in_neighbors(i)) p.entries(i, j) = off;
  }
  return p;
}

double balance_residual(const DiGraph& g, const WeightVector& w) {
  double worst = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    double in_sum = 0.0;
    for (NodeId j : g.in_neighbors(i)) in_sum += w[j];
    worst = std::max(worst, std::abs(w[i] * static_cast<double>(g.out_degree(i)) - in_sum));
  }
  return worst;
}

double max_outgoing_weight(const DiGraph& g, const WeightVector& w) {
  double worst = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    worst = std::max(worst, w[i] * static_cast<double>(g.out_degree(i)));
  }
  return worst;
}

BalanceResult run_to_balance(const DiGraph& g, WeightVector w0, double tol,
                             std::size_t max_rounds) {
  if (!(tol > 0.0)) throw ConfigError("balance tolerance must be positive");
  BalanceResult result{std::move(w0), 0.0, 0};
  result.residual = balance_residual(g, result.weights);
  while (result.residual > tol) {
    if (result.rounds == max_rounds) {
      throw ConvergenceError(fmt::format(
          "weights not balanced after {} rounds (residual {})", max_rounds, result.residual));
    }
    result.weights = weight_step(g, result.weights);
    ++result.rounds;
    result.residual = balance_residual(g, result.weights);
  }
  return result;
}

void write_balance_certificate(std::ostream& out, const DiGraph& g, const WeightVector& w) {
  for (NodeId i = 0; i < g.node_count(); ++i) {
    out << g.label(i) << ' ' << format_real(w[i]) << '\n';
  }
  out << "residual " << format_real(balance_residual(g, w)) << '\n';
}

}  // namespace wbsg
