#include "wbsg/objective.hpp"

#include <algorithm>
#include <cmath>

#include "wbsg/errors.hpp"

namespace wbsg {

double ObjectiveSpec::total_value(const Matrix& points) const {
  if (points.rows() != size() || points.cols() != dimension) {
    throw ConfigError("objective evaluated at a point block of the wrong shape");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += locals[i].value(points.row(i));
  return total;
}

double ObjectiveSpec::total_value_at(std::span<const double> point) const {
  double total = 0.0;
  for (const auto& f : locals) total += f.value(point);
  return total;
}

ObjectiveSpec quadratic_objective(const Matrix& targets, double declared_bound) {
  ObjectiveSpec spec;
  spec.id = "quadratic_estimation";
  spec.dimension = targets.cols();
  spec.subgrad_bound = declared_bound;
  std::vector<double> mean(targets.cols(), 0.0);
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    std::vector<double> a(targets.row(i).begin(), targets.row(i).end());
    for (std::size_t k = 0; k < a.size(); ++k) mean[k] += a[k];
    spec.locals.push_back(LocalObjective{
        [a](std::span<const double> x) {
          double sum = 0.0;
          for (std::size_t k = 0; k < a.size(); ++k) sum += (x[k] - a[k]) * (x[k] - a[k]);
          return 0.5 * sum;
        },
        [a](std::span<const double> x, std::span<double> g) {
          for (std::size_t k = 0; k < a.size(); ++k) g[k] = x[k] - a[k];
        }});
  }
  for (double& m : mean) m /= static_cast<double>(targets.rows());
  spec.minimizer = std::move(mean);
  return spec;
}

ObjectiveSpec abs_deviation_objective(const Matrix& targets) {
  ObjectiveSpec spec;
  spec.id = "abs_deviation";
  spec.dimension = targets.cols();
  spec.subgrad_bound = std::sqrt(static_cast<double>(targets.cols()));
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    std::vector<double> a(targets.row(i).begin(), targets.row(i).end());
    spec.locals.push_back(LocalObjective{
        [a](std::span<const double> x) {
          double sum = 0.0;
          for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(x[k] - a[k]);
          return sum;
        },
        [a](std::span<const double> x, std::span<double> g) {
          for (std::size_t k = 0; k < a.size(); ++k) {
            double diff = x[k] - a[k];
            g[k] = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          }
        }});
  }
  std::vector<double> median(targets.cols());
  const std::size_t n = targets.rows();
  for (std::size_t k = 0; k < targets.cols(); ++k) {
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = targets(i, k);
    std::sort(column.begin(), column.end());
    median[k] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  spec.minimizer = std::move(median);
  return spec;
}

ObjectiveSpec zero_objective(std::size_t n, std::size_t dimension) {
  ObjectiveSpec spec;
  spec.id = "zero";
  spec.dimension = dimension;
  spec.subgrad_bound = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    spec.locals.push_back(LocalObjective{
        [](std::span<const double>) { return 0.0; },
        [](std::span<const double>, std::span<double> g) {
          std::fill(g.begin(), g.end(), 0.0);
        }});
  }
  spec.minimizer = std::vector<double>(dimension, 0.0);
  return spec;
}

}  // namespace wbsg

namespace wbsg {

double subgradient_norm(std::span<const double> g) {
  double sum = 0.0;
  for (double v : g) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace wbsg
