#pragma once

// Per-node arithmetic shared by the centralized engine and the node actors.
// Both execution paths call these with neighbor sums accumulated in
// ascending sender id, which is what makes their results bit-identical.

namespace wbsg::rules {

// w_i(t+1) = 1/2 w_i(t) + (1/d_i^out) * sum_{j in N_in(i)} 1/2 w_j(t)
inline double next_weight(double own_weight, double in_weight_sum, double out_degree) {
  return 0.5 * own_weight + (0.5 * in_weight_sum) / out_degree;
}

// Coefficient of x_i(t) in x_i(t+1); must stay strictly positive.
inline double self_coefficient(double weight, double out_degree) {
  return 1.0 - weight * out_degree;
}

// Contribution w_j(t) x_j(t) that node j broadcasts.
inline double weighted_estimate(double weight, double estimate) { return weight * estimate; }

// x_i(t+1) = x_i(t) c_i + sum_j w_j x_j - alpha g_i, one component.
inline double next_estimate(double own, double self_coef, double in_weighted_sum,
                            double step, double subgradient) {
  return own * self_coef + in_weighted_sum - step * subgradient;
}

}  // namespace wbsg::rules
