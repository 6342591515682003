#include "disslab/structure_fn.hpp"

#include <cmath>

#include "disslab/parallel.hpp"

namespace disslab {

namespace {

// f(x + s) for a shift s in grid units, multilinear between lattice points.
Eigen::ArrayXd shifted(const Eigen::Ref<const Eigen::ArrayXd>& f, int d, int n,
                       const std::array<double, 3>& s) {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    double fl = std::floor(s[a]);
    double fr = s[a] - fl;
    if (fr < 1e-12) fr = 0.0;
    if (fr > 1.0 - 1e-12) {
      fl += 1.0;
      fr = 0.0;
    }
    base[a] = static_cast<int>(fl);
    frac[a] = fr;
  }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> o{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const int bit = (c >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      o[a] = (((base[a] + bit) % n) + n) % n;
    }
    if (w == 0.0) continue;
    const int nx = n, ny = d > 1 ? n : 1, nz = d > 2 ? n : 1;
    for (int x = 0; x < nx; ++x) {
      const int xs = (x + o[0]) % n;
      for (int y = 0; y < ny; ++y) {
        const int ys = d > 1 ? (y + o[1]) % n : 0;
        const Eigen::Index row = (static_cast<Eigen::Index>(x) * ny + y) * nz;
        const Eigen::Index srow = (static_cast<Eigen::Index>(xs) * ny + ys) * nz;
        for (int z = 0; z < nz; ++z) {
          const int zs = d > 2 ? (z + o[2]) % n : 0;
          out(row + z) += w * f(srow + zs);
        }
      }
    }
  }
  return out;
}

void check_steps(const PeriodicGrid& g, const std::vector<int>& steps) {
  if (steps.empty()) throw Error("no separations given");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] < 1 || steps[k] > g.n / 4) throw Error("separation outside [1, n/4] grid steps");
    if (k > 0 && steps[k] <= steps[k - 1]) throw Error("separations must be strictly increasing");
  }
}

// Increments of every component along l z for one frame.
std::vector<Eigen::ArrayXd> increments(const SpaceTimeField& u, int t, int step,
                                       const std::array<double, 3>& z) {
  const PeriodicGrid& g = u.grid();
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) s[a] = step * z[a];
  std::vector<Eigen::ArrayXd> out;
  for (int c = 0; c < u.components(); ++c)
    out.push_back(shifted(u.component(t, c), g.d, g.n, s) - u.component(t, c));
  return out;
}

}  // namespace

DirectionSet direction_set(int d, int count) {
  DirectionSet set;
  if (d == 1) {
    set.z = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
    set.weight = {0.5, 0.5};
  } else if (d == 2) {
    if (count < 8) throw Error("2D sphere averages need at least 8 directions");
    for (int k = 0; k < count; ++k) {
      const double th = kTwoPi * k / count;
      set.z.push_back({std::cos(th), std::sin(th), 0.0});
      set.weight.push_back(1.0 / count);
    }
  } else if (d == 3) {
    const double h = 1.0 / std::sqrt(2.0), c = 1.0 / std::sqrt(3.0);
    for (int a = 0; a < 3; ++a)
      for (int sgn : {1, -1}) {
        std::array<double, 3> z{0.0, 0.0, 0.0};
        z[a] = sgn;
        set.z.push_back(z);
        set.weight.push_back(1.0 / 21.0);
      }
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        for (int sa : {1, -1})
          for (int sb : {1, -1}) {
            std::array<double, 3> z{0.0, 0.0, 0.0};
            z[a] = sa * h;
            z[b] = sb * h;
            set.z.push_back(z);
            set.weight.push_back(4.0 / 105.0);
          }
    for (int sx : {1, -1})
      for (int sy : {1, -1})
        for (int sz : {1, -1}) {
          set.z.push_back({sx * c, sy * c, sz * c});
          set.weight.push_back(9.0 / 280.0);
        }
  } else {
    throw Error("dimension must be 1, 2 or 3");
  }
  return set;
}

double longitudinal_prefactor(int d) { return d * (d + 2) / 12.0; }

std::vector<SFCurve> absolute_sf(const SpaceTimeField& u, const std::vector<double>& ps,
                                 const std::vector<int>& steps, int directions) {
  const PeriodicGrid& g = u.grid();
  check_steps(g, steps);
  if (ps.empty()) throw Error("no moment orders given");
  const DirectionSet dirs = direction_set(g.d, directions);
  const std::size_t np = ps.size(), nl = steps.size();
  // per frame: [p][step]
  std::vector<std::vector<double>> per_frame(u.frames(), std::vector<double>(np * nl, 0.0));
  parallel_for(u.frames(), [&](int t) {
    for (std::size_t k = 0; k < nl; ++k)
      for (std::size_t q = 0; q < dirs.z.size(); ++q) {
        const auto inc = increments(u, t, steps[k], dirs.z[q]);
        Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(inc[0].size());
        for (const auto& c : inc) mag2 += c.square();
        const Eigen::ArrayXd mag = mag2.sqrt();
        for (std::size_t i = 0; i < np; ++i)
          per_frame[t][i * nl + k] += dirs.weight[q] * mag.pow(ps[i]).mean();
      }
  });
  std::vector<SFCurve> out;
  for (std::size_t i = 0; i < np; ++i) {
    SFCurve c;
    c.p = ps[i];
    c.kind = SFKind::absolute;
    c.steps = steps;
    c.directions = static_cast<int>(dirs.z.size());
    c.frames = u.frames();
    for (std::size_t k = 0; k < nl; ++k) {
      c.separations.push_back(steps[k] * g.dx());
      double s = 0.0;
      for (int t = 0; t < u.frames(); ++t) s += per_frame[t][i * nl + k];
      c.values.push_back(s / u.frames());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<double>> longitudinal_sf_frames(const SpaceTimeField& u,
                                                        const std::vector<int>& steps,
                                                        int directions) {
  const PeriodicGrid& g = u.grid();
  if (u.components() != g.d) throw Error("longitudinal structure function needs a velocity field");
  check_steps(g, steps);
  const DirectionSet dirs = direction_set(g.d, directions);
  const double pre = longitudinal_prefactor(g.d);
  std::vector<std::vector<double>> out(u.frames(), std::vector<double>(steps.size(), 0.0));
  parallel_for(u.frames(), [&](int t) {
    for (std::size_t k = 0; k < steps.size(); ++k)
      for (std::size_t q = 0; q < dirs.z.size(); ++q) {
        const auto inc = increments(u, t, steps[k], dirs.z[q]);
        Eigen::ArrayXd proj = Eigen::ArrayXd::Zero(inc[0].size());
        for (int a = 0; a < g.d; ++a) proj += dirs.z[q][a] * inc[a];
        out[t][k] += pre * dirs.weight[q] * proj.cube().mean();
      }
  });
  return out;
}

SFCurve longitudinal_sf(const SpaceTimeField& u, const std::vector<int>& steps, int directions) {
  const auto frames = longitudinal_sf_frames(u, steps, directions);
  SFCurve c;
  c.p = 3.0;
  c.kind = SFKind::longitudinal;
  c.steps = steps;
  c.directions = static_cast<int>(direction_set(u.grid().d, directions).z.size());
  c.frames = u.frames();
  for (std::size_t k = 0; k < steps.size(); ++k) {
    c.separations.push_back(steps[k] * u.grid().dx());
    double s = 0.0;
    for (const auto& f : frames) s += f[k];
    c.values.push_back(s / frames.size());
  }
  return c;
}

ZetaFit fit_zeta(const SFCurve& curve, std::pair<double, double> window) {
  if (window.first == 0.0 && window.second == 0.0)
    window = {curve.separations.front(), curve.separations.back()};
  int inside = 0;
  for (std::size_t k = 0; k < curve.separations.size(); ++k) {
    const double s = curve.separations[k];
    if (s < window.first || s > window.second) continue;
    ++inside;
    if (!(curve.values[k] > 0.0)) throw Error("structure function vanishes inside the fit window");
  }
  if (inside < 4) throw Error("exponent fit needs at least 4 separations");
  ZetaFit z;
  z.fit = fit_power_law(curve.separations, curve.values, window);
  z.zeta = z.fit.exponent;
  z.sigma = z.zeta / curve.p;
  return z;
}

}  // namespace disslab
