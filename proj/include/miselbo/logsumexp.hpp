#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace miselbo {

// log(sum_i exp(x_i)) with max subtraction. Summation follows the order
// of the span, so callers control reduction order.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

// log((1/n) sum_i exp(x_i))
inline double log_mean_exp(std::span<const double> values) {
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

}  // namespace miselbo
