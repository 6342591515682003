#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/fit.hpp"
#include "disslab/spectral.hpp"

namespace disslab {

// Smooth radial cutoff: 1 for r <= 1, 0 for r >= 2, quintic smoothstep in log2 r between.
double lp_cutoff(double r);

// Dyadic Littlewood-Paley family on a frequency lattice. Band 0 is the low-pass chi(|xi|);
// band k in 1..K-1 is chi(2^-k |xi|) - chi(2^-k+1 |xi|); band K closes the partition with
// 1 - chi(2^-K+1 |xi|), so the bands sum to one at every lattice frequency.
class DyadicFamily {
 public:
  DyadicFamily(std::shared_ptr<const FourierBox> box, Eigen::ArrayXd radius, int bands);

  int bands() const { return bands_; }
  const FourierBox& box() const { return *box_; }
  const Eigen::ArrayXd& radius() const { return radius_; }
  // Multiplier of band k (0 = low-pass) on the box's spectral layout.
  Eigen::ArrayXd multiplier(int k) const;

 private:
  std::shared_ptr<const FourierBox> box_;
  Eigen::ArrayXd radius_;
  int bands_ = 0;
};

// Spatial family on the grid's box, K = log2(n/2) - 1.
DyadicFamily build_dyadic_family(const PeriodicGrid& grid);
// Family on the (d+1)-dimensional space-time lattice of a movie. Time frequencies are
// expressed in units of the spatial base wavenumber 2 pi / L.
DyadicFamily build_space_time_family(const PeriodicGrid& grid);

// Band k of f (0 = low-pass). Spatial families act frame by frame; space-time families act
// on the whole movie.
SpaceTimeField band_project(const SpaceTimeField& f, const DyadicFamily& family, int k);

enum class BesovMode { space_time, per_slice };

struct BesovEstimate {
  double p = 2.0;
  double alpha = 0.0;
  double lowpass = 0.0;
  std::vector<double> band_norms;  // index k-1 holds band k
  double norm = 0.0;
};

// L^p norms use the unit-normalized measure; p = infinity means the grid maximum. Vector
// fields are measured through their pointwise Euclidean magnitude.
BesovEstimate besov_norm(const SpaceTimeField& f, double alpha, double p,
                         const DyadicFamily& family, BesovMode mode = BesovMode::space_time);

struct BesovFit {
  ScalingFit fit;           // exponent = -slope of log2 band norms against k
  bool saturated = false;   // window bands reached the round-off floor
  std::vector<double> band_norms;
};

// Window is an inclusive band range [k_lo, k_hi]; k_hi <= 0 means K - 1.
// A saturated fit reports max(partial fit, 1) as a lower bound on the exponent.
BesovFit fit_besov_exponent(const SpaceTimeField& f, double p, const DyadicFamily& family,
                            std::pair<int, int> window = {2, 0},
                            BesovMode mode = BesovMode::space_time);

}  // namespace disslab
