#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wbsg/matrix.hpp"

namespace wbsg {

// One agent's private convex function f_i: R^d -> R.
struct LocalObjective {
  std::function<double(std::span<const double> x)> value;
  // Writes a subgradient of f_i at x into g (same length as x). Must be
  // deterministic, including at kinks.
  std::function<void(std::span<const double> x, std::span<double> g)> subgradient;
};

// The collection f_1..f_n together with the caller-declared subgradient
// bound L. The bound is checked (Euclidean norm) on every point a run
// visits, not globally.
struct ObjectiveSpec {
  std::string id;
  std::size_t dimension = 1;
  std::vector<LocalObjective> locals;
  double subgrad_bound = 1.0;
  // Minimizer of sum_i f_i, when known in closed form.
  std::optional<std::vector<double>> minimizer;

  std::size_t size() const { return locals.size(); }

  // F(x) = sum_i f_i(x_i) with x_i the i-th row of points.
  double total_value(const Matrix& points) const;
  // sum_i f_i(x), every agent evaluated at the same point.
  double total_value_at(std::span<const double> point) const;
};

inline constexpr double kQuadraticDeclaredBound = 25.0;

// f_i(x) = 1/2 ||x - a_i||^2 with a_i the i-th row of targets. The gradient
// is unbounded globally; declared_bound is what runs are checked against.
// Minimizer: the row mean of targets.
ObjectiveSpec quadratic_objective(const Matrix& targets,
                                  double declared_bound = kQuadraticDeclaredBound);

// f_i(x) = ||x - a_i||_1 with subgradient sign(x - a_i), taking 0 at the
// kink. L = sqrt(d). Minimizer: componentwise median (midpoint of the two
// middle values for even n).
ObjectiveSpec abs_deviation_objective(const Matrix& targets);

// f_i = 0. Reduces the algorithm to average consensus.
ObjectiveSpec zero_objective(std::size_t n, std::size_t dimension = 1);

}  // namespace wbsg

namespace wbsg {

// Euclidean norm, the norm the declared bound L refers to.
double subgradient_norm(std::span<const double> g);

}  // namespace wbsg
