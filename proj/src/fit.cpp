#include "disslab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disslab/field.hpp"

namespace disslab {

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("linear fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("linear fit with degenerate abscissae");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                         std::pair<double, double> window) {
  if (x.size() != y.size()) throw Error("fit inputs differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.first || x[i] > window.second) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
      throw Error("power-law fit needs positive finite values in the window");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) throw Error("power-law fit window holds fewer than 3 points");
  const auto [a, b] = linear_fit(lx, ly);
  const double n = static_cast<double>(lx.size());
  double mean = 0;
  for (double v : ly) mean += v;
  mean /= n;
  double ss_tot = 0, ss_res = 0, sxx = 0, mx = 0;
  for (double v : lx) mx += v;
  mx /= n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (a + b * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  ScalingFit fit;
  fit.exponent = b;
  fit.intercept = a;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.stderr_exponent = lx.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  fit.window_min = std::exp(*std::min_element(lx.begin(), lx.end()));
  fit.window_max = std::exp(*std::max_element(lx.begin(), lx.end()));
  fit.points = static_cast<int>(lx.size());
  return fit;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_power_law(x, y, {0.0, std::numeric_limits<double>::infinity()});
}

}  // namespace disslab
