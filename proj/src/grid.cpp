#include "disslab/field.hpp"

#include <cmath>

namespace disslab {

Eigen::Index PeriodicGrid::points() const {
  Eigen::Index p = 1;
  for (int a = 0; a < d; ++a) p *= n;
  return p;
}

double PeriodicGrid::cell_volume() const { return std::pow(dx(), d); }

double PeriodicGrid::volume() const { return std::pow(L, d); }

PeriodicGrid PeriodicGrid::with_frames(int frames, double spacing) const {
  return make_grid(d, n, L, frames, spacing);
}

bool PeriodicGrid::same_space(const PeriodicGrid& other) const {
  return d == other.d && n == other.n && L == other.L;
}

PeriodicGrid make_grid(int d, int n, double L, int nt, double dt) {
  if (d < 1 || d > 3) throw Error("grid dimension must be 1, 2 or 3");
  if (n < 8 || (n & (n - 1)) != 0) throw Error("grid size must be a power of two >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw Error("domain length must be positive");
  if (nt < 1) throw Error("frame count must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("frame spacing must be positive");
  return PeriodicGrid{d, n, L, nt, dt};
}

SpaceTimeField::SpaceTimeField(const PeriodicGrid& grid, int components, FieldInfo info)
    : SpaceTimeField(grid, components,
                     Eigen::ArrayXd::Zero(grid.points() * components * grid.nt), std::move(info)) {}

SpaceTimeField::SpaceTimeField(const PeriodicGrid& grid, int components, Eigen::ArrayXd samples,
                               FieldInfo info)
    : grid_(make_grid(grid.d, grid.n, grid.L, grid.nt, grid.dt)),
      components_(components),
      samples_(std::move(samples)),
      info_(std::move(info)) {
  if (components < 1) throw Error("field needs at least one component");
  if (samples_.size() != grid_.points() * components * grid_.nt)
    throw Error("sample count does not match grid shape");
}

Eigen::Map<Eigen::ArrayXXd> SpaceTimeField::frame(int t) {
  return {samples_.data() + t * points() * components_, points(), components_};
}

Eigen::Map<const Eigen::ArrayXXd> SpaceTimeField::frame(int t) const {
  return {samples_.data() + t * points() * components_, points(), components_};
}

Eigen::Map<Eigen::ArrayXd> SpaceTimeField::component(int t, int c) {
  return {samples_.data() + (t * components_ + c) * points(), points()};
}

Eigen::Map<const Eigen::ArrayXd> SpaceTimeField::component(int t, int c) const {
  return {samples_.data() + (t * components_ + c) * points(), points()};
}

SpaceTimeField SpaceTimeField::snapshot(int t) const {
  SpaceTimeField out(grid_.with_frames(1, grid_.dt), components_, info_);
  out.frame(0) = frame(t);
  return out;
}

bool SpaceTimeField::all_finite() const { return samples_.isFinite().all(); }

SpaceTimeField stack_frames(const PeriodicGrid& space, double dt,
                            const std::vector<Eigen::ArrayXXd>& frames, FieldInfo info) {
  if (frames.empty()) throw Error("no frames to stack");
  const int c = static_cast<int>(frames.front().cols());
  SpaceTimeField out(space.with_frames(static_cast<int>(frames.size()), dt), c, std::move(info));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].rows() != space.points() || frames[t].cols() != c)
      throw Error("frame shape mismatch");
    out.frame(static_cast<int>(t)) = frames[t];
  }
  return out;
}

double lp_norm(const Eigen::Ref<const Eigen::ArrayXd>& values, double p) {
  if (values.size() == 0) throw Error("norm of an empty sample set");
  if (std::isinf(p)) return values.abs().maxCoeff();
  if (p == 2.0) return std::sqrt(values.square().mean());
  if (p == 1.0) return values.abs().mean();
  return std::pow(values.abs().pow(p).mean(), 1.0 / p);
}

std::vector<int> unravel(Eigen::Index i, int d, int n) {
  std::vector<int> idx(d);
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(i % n);
    i /= n;
  }
  return idx;
}

}  // namespace disslab
