#pragma once

#include <array>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/fit.hpp"
#include "disslab/spectral.hpp"

namespace disslab {

// Compactly supported radial bump (1 - r^2)^power sampled on the grid and renormalized to
// unit discrete mass. Space-only when radius_time == 0; otherwise the bump is radial in
// (x / radius, t / radius_time) and sampled at frame offsets.
class Mollifier {
 public:
  Mollifier(const PeriodicGrid& grid, double radius, double radius_time = 0.0, int power = 4);

  const PeriodicGrid& grid() const { return grid_; }
  double radius() const { return radius_; }
  double radius_time() const { return radius_time_; }
  int power() const { return power_; }
  bool identity() const { return identity_; }
  bool space_time() const { return radius_time_ > 0.0; }
  // Largest frame offset carrying weight (0 for space-only).
  int frame_reach() const { return reach_; }

  // Spatial stencil offsets (grid units, shared by all slices) and the weights of the slice at
  // frame offset j in [-reach, reach]. A space-only mollifier has the single slice j = 0.
  const std::vector<std::array<int, 3>>& offsets() const { return offsets_; }
  const Eigen::ArrayXd& slice_weights(int j) const { return weights_[j + reach_]; }
  // Same slice with weights of the time derivative of the kernel.
  const Eigen::ArrayXd& slice_time_derivative(int j) const { return dweights_[j + reach_]; }
  // Fourier multiplier of slice j on the grid's spectral layout (real, symmetric).
  const Eigen::ArrayXd& slice_multiplier(int j) const { return multipliers_[j + reach_]; }
  const Eigen::ArrayXd& slice_derivative_multiplier(int j) const { return dmultipliers_[j + reach_]; }
  double total_weight() const;

 private:
  PeriodicGrid grid_;
  double radius_ = 0.0;
  double radius_time_ = 0.0;
  int power_ = 4;
  bool identity_ = false;
  int reach_ = 0;
  std::vector<std::array<int, 3>> offsets_;
  std::vector<Eigen::ArrayXd> weights_;
  std::vector<Eigen::ArrayXd> dweights_;
  std::vector<Eigen::ArrayXd> multipliers_;
  std::vector<Eigen::ArrayXd> dmultipliers_;
};

// Space mollification applied frame by frame (the stencil convolution is evaluated through
// the Fourier multiplier of the same periodic stencil). Space-time mollifiers produce only
// the frames at distance >= reach from both ends; first_frame records the offset.
struct Mollified {
  SpaceTimeField field;
  int first_frame = 0;
};
Mollified mollify(const SpaceTimeField& f, const Mollifier& m);
// Convenience for space-only mollifiers.
SpaceTimeField mollify_space(const SpaceTimeField& f, const Mollifier& m);
Eigen::ArrayXd mollify_frame(const Eigen::Ref<const Eigen::ArrayXd>& f, const Mollifier& m);
// Stencil convolution evaluated directly in physical space (reference path).
Eigen::ArrayXd mollify_frame_direct(const Eigen::Ref<const Eigen::ArrayXd>& f, const Mollifier& m);

// R = u_l (x) u_l - (u (x) u)_l, stored as the upper triangle (00, 01, .., 0c, 11, ..).
SpaceTimeField commutator(const SpaceTimeField& u, const Mollifier& m);

struct MollificationRates {
  std::vector<double> scales;
  std::vector<double> difference;  // ||f - f_l||_p
  std::vector<double> gradient;    // ||grad f_l||_p
  std::vector<double> commutator;  // ||grad(f_l f_l - (f f)_l)||_p
  ScalingFit difference_fit, gradient_fit, commutator_fit;
  double sigma_target = 0.0;
  bool degenerate = false;         // all differences vanish (constant input)
};

// Scalar field (first component used); L^p with unit-normalized measure.
MollificationRates mollification_rate_report(const SpaceTimeField& f, double p, double sigma_target,
                                             const std::vector<double>& scales, int power = 4);

}  // namespace disslab
