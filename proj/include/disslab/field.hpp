#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace disslab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Operational failure: bad input, violated precondition, I/O problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Periodic box [0,L)^d sampled on n points per axis, plus a uniform time axis.
struct PeriodicGrid {
  int d = 1;
  int n = 8;
  double L = kTwoPi;
  int nt = 1;
  double dt = 1.0;

  Eigen::Index points() const;
  double dx() const { return L / n; }
  double cell_volume() const;
  double volume() const;
  double wavenumber_unit() const { return kTwoPi / L; }
  std::vector<int> shape() const { return std::vector<int>(d, n); }
  double time(int frame) const { return frame * dt; }
  double duration() const { return (nt - 1) * dt; }

  PeriodicGrid with_frames(int frames, double spacing) const;
  bool same_space(const PeriodicGrid& other) const;
};

// Validated constructor: d in {1,2,3}, n a power of two >= 8, L > 0, nt >= 1, dt > 0.
PeriodicGrid make_grid(int d, int n, double L = kTwoPi, int nt = 1, double dt = 1.0);

struct FieldInfo {
  std::string name;
  double viscosity = 0.0;
  std::string provenance;
};

// Space-time samples. Layout: frame-major, then component, then space (row-major, last
// axis fastest). A frame is viewed as a points() x components array.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(const PeriodicGrid& grid, int components, FieldInfo info = {});
  SpaceTimeField(const PeriodicGrid& grid, int components, Eigen::ArrayXd samples,
                 FieldInfo info = {});

  const PeriodicGrid& grid() const { return grid_; }
  int components() const { return components_; }
  int frames() const { return grid_.nt; }
  Eigen::Index points() const { return grid_.points(); }
  double time(int frame) const { return grid_.time(frame); }
  const FieldInfo& info() const { return info_; }
  FieldInfo& info() { return info_; }

  Eigen::Map<Eigen::ArrayXXd> frame(int t);
  Eigen::Map<const Eigen::ArrayXXd> frame(int t) const;
  Eigen::Map<Eigen::ArrayXd> component(int t, int c);
  Eigen::Map<const Eigen::ArrayXd> component(int t, int c) const;

  const Eigen::ArrayXd& samples() const { return samples_; }
  Eigen::ArrayXd& samples() { return samples_; }

  // Single-frame field holding a copy of frame t.
  SpaceTimeField snapshot(int t) const;
  bool all_finite() const;

 private:
  PeriodicGrid grid_;
  int components_ = 0;
  Eigen::ArrayXd samples_;
  FieldInfo info_;
};

SpaceTimeField stack_frames(const PeriodicGrid& space, double dt,
                            const std::vector<Eigen::ArrayXXd>& frames, FieldInfo info = {});

// L^p norm of samples under the unit-normalized (averaging) measure; p = inf is the maximum.
double lp_norm(const Eigen::Ref<const Eigen::ArrayXd>& values, double p);

// Coordinates of grid point i along each axis (row-major decomposition).
std::vector<int> unravel(Eigen::Index i, int d, int n);

}  // namespace disslab
