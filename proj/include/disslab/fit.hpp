#pragma once

#include <utility>
#include <vector>

namespace disslab {

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double r2 = 0.0;
  double stderr_exponent = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  int points = 0;
};

// Least-squares fit of log y = intercept + exponent * log x over x in [lo, hi].
// Non-positive x or y inside the window is an error; at least 3 points are required.
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                         std::pair<double, double> window);
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Plain least squares y = a + b x; returns {a, b}.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace disslab
