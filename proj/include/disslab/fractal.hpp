#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/fit.hpp"

namespace disslab {

// Cell lattice of a space-time set: n^d spatial cells (any n >= 1) times nt frames.
// Cell index is frame-major, then row-major space, like SpaceTimeField.
struct Lattice {
  int d = 1;
  int n = 1;
  int nt = 1;
  double dx = 1.0;
  double dt = 1.0;
  Eigen::Index space_points() const;
  Eigen::Index size() const { return space_points() * nt; }
  // Dimension of the sets it carries: d for a single frame, d + 1 otherwise.
  int dimension() const { return nt > 1 ? d + 1 : d; }
};
Lattice lattice_of(const PeriodicGrid& grid);

struct SpaceTimeMask {
  Lattice lattice;
  std::vector<std::uint8_t> cells;
  Eigen::Index count() const;
};

// Non-negative cell masses |D| dx^d dt (dt dropped for a single frame).
struct SpaceTimeMeasure {
  Lattice lattice;
  Eigen::ArrayXd mass;
  double positive_fraction = 1.0;  // positive part of the signed input over its total variation
  bool signed_input = false;
};
SpaceTimeMeasure measure_from_field(const SpaceTimeField& density);

// Smallest set of cells (largest masses first, ties by index) holding `threshold` of the mass.
struct ConcentrationSet {
  double threshold = 0.99;
  double retained = 0.0;  // retained mass / total mass
  SpaceTimeMask mask;
};
ConcentrationSet concentration_set(const SpaceTimeMeasure& m, double threshold = 0.99);

struct DimensionEstimate {
  std::string method = "box-counting";
  std::vector<int> box_cells;
  std::vector<double> radii;   // box side relative to the lattice extent (b / n)
  std::vector<double> counts;  // occupied boxes
  ScalingFit fit;              // counts against 1 / radii
  double dimension = 0.0;
};
// Boxes are b cells wide along every axis, frames included; partial boxes at the ends count.
// Needs at least 4 strictly increasing box sizes and a nonempty mask.
DimensionEstimate box_count_dimension(const SpaceTimeMask& mask, const std::vector<int>& box_cells);

struct CoveringCurve {
  double gamma = 0.0;
  double threshold = 0.99;
  std::vector<int> box_cells;
  std::vector<double> radii;          // side of the cube with the box's space-time volume
  std::vector<double> counts;
  std::vector<double> sums;           // counts * radius^gamma
  std::vector<double> covered_mass;   // mass inside the covering boxes / total mass
};
// Covers the concentration set with lattice boxes of each size and reports sum r_i^gamma.
CoveringCurve covering_mass_estimate(const SpaceTimeMeasure& m, double gamma,
                                     const std::vector<int>& box_cells, double threshold = 0.99);

// 2 sigma / (1 - sigma) - 1 + (p - 3)(d + 1) / p; p = infinity gives the d + 1 limit.
double density_exponent_prediction(double sigma, double p, int d);

struct DensityReport {
  std::vector<int> radii_cells;
  std::vector<double> radii;               // (h + 1/2) dx for half-width h
  std::vector<Eigen::Index> points;        // cell indices of the centres
  std::vector<ScalingFit> fits;
  double min_exponent = 0.0;
  double predicted = 0.0;
  bool pass = false;                       // min_exponent >= predicted - 0.2
  double positive_fraction = 1.0;
  bool signed_input = false;
};
// Mass of max-norm balls of half-width h cells (periodic in space, clipped in time) around
// `count` centres spread evenly over the concentration set, fitted against radius. Radii
// below 4 delta are dropped; at least 3 must remain.
DensityReport density_exponent_fit(const SpaceTimeMeasure& m, int count,
                                   const std::vector<int>& radii_cells, double delta, double sigma,
                                   double p, double threshold = 0.99);

}  // namespace disslab
