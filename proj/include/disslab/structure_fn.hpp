#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/fit.hpp"

namespace disslab {

enum class SFKind { absolute, longitudinal };

struct SFCurve {
  double p = 2.0;
  SFKind kind = SFKind::absolute;
  std::vector<int> steps;           // separations in grid steps
  std::vector<double> separations;  // physical separations
  std::vector<double> values;
  int directions = 0;
  int frames = 0;
  std::string averaging = "space+time+directions";
};

// Unit directions and quadrature weights used for sphere averages: d = 1 uses +-1, d = 2 uses
// `count` equi-angular directions (count >= 8), d = 3 uses the 26-point Lebedev rule.
struct DirectionSet {
  std::vector<std::array<double, 3>> z;
  std::vector<double> weight;
};
DirectionSet direction_set(int d, int count);

// <|u(x + l z) - u(x)|^p> averaged over grid points, frames and directions. Off-axis shifts
// use multilinear interpolation of the periodic samples. Steps must lie in [1, n/4].
std::vector<SFCurve> absolute_sf(const SpaceTimeField& u, const std::vector<double>& ps,
                                 const std::vector<int>& steps, int directions = 16);

// d(d+2)/12 times the sphere average of (z . (u(x + l z) - u(x)))^3, for a velocity field.
SFCurve longitudinal_sf(const SpaceTimeField& u, const std::vector<int>& steps, int directions = 16);
// Same quantity per frame: result[t][k] for steps[k].
std::vector<std::vector<double>> longitudinal_sf_frames(const SpaceTimeField& u,
                                                        const std::vector<int>& steps,
                                                        int directions = 16);
double longitudinal_prefactor(int d);

struct ZetaFit {
  ScalingFit fit;
  double zeta = 0.0;
  double sigma = 0.0;  // zeta / p
};
// Window over physical separations; {0, 0} uses every separation. Needs 4 points.
ZetaFit fit_zeta(const SFCurve& curve, std::pair<double, double> window = {0.0, 0.0});

}  // namespace disslab
