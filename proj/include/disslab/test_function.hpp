#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/mollify.hpp"
#include "disslab/spectral.hpp"

namespace disslab {

// eta(t) = (1 - s^2)^power with s = (t - center) / half_width, zero for |s| >= 1.
struct TimeBump {
  double center = 0.0;
  double half_width = 1.0;
  int power = 6;

  double value(double t) const;
  double rate(double t) const;
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
};

// Smooth space-time test function phi(x, t) = sum_i eta_i(t) a_i(x). Profiles a_i are
// samples on the spatial grid and are treated as trigonometric polynomials, so every space
// derivative is exact; time derivatives are analytic.
class TestFunction {
 public:
  struct Term {
    TimeBump bump;
    Eigen::ArrayXd profile;
  };

  TestFunction(std::string id, const PeriodicGrid& space, std::vector<Term> terms);

  const std::string& id() const { return id_; }
  const PeriodicGrid& grid() const { return grid_; }
  const std::vector<Term>& terms() const { return terms_; }
  double support_lo() const;
  double support_hi() const;
  bool active(double t) const;

  struct Sample {
    Eigen::ArrayXd value, rate, laplacian;
    std::vector<Eigen::ArrayXd> gradient;
  };
  // phi, d/dt phi, Laplacian and gradient at time t, on the 3/2 grid when fine is set.
  Sample sample(const SpectralOps& ops, double t, bool fine) const;
  Eigen::ArrayXd value(double t) const;

 private:
  std::string id_;
  PeriodicGrid grid_;
  std::vector<Term> terms_;
};

// Random profile: offset in [0.5, 1.5] plus a mean-zero field with RMS 1/2 built from lattice
// modes |m| <= kmax. Time bump with random width and centre inside [t_lo, t_hi].
TestFunction random_test_function(const PeriodicGrid& space, double t_lo, double t_hi,
                                  std::uint64_t seed, double kmax = 4.0, int power = 6);
// eta(t) times a given profile (constant 1 when profile is empty).
TestFunction windowed_profile(const std::string& id, const PeriodicGrid& space, TimeBump bump,
                              Eigen::ArrayXd profile = {});
// alpha a + beta b.
TestFunction combine(const TestFunction& a, double alpha, const TestFunction& b, double beta);
// phi convolved with the reflected kernel of m (space-time when m is), so that pairing a
// distribution against it equals pairing the mollified distribution against phi. Time
// offsets are the mollifier's frame offsets times the grid spacing.
TestFunction mollified_test_function(const TestFunction& phi, const Mollifier& m);

}  // namespace disslab
