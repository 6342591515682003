#include "disslab/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "disslab/parallel.hpp"

namespace disslab {

namespace {

struct Coord {
  std::array<int, 3> x{0, 0, 0};
  int t = 0;
};

Coord coord_of(const Lattice& l, Eigen::Index i) {
  Coord c;
  const Eigen::Index sp = l.space_points();
  c.t = static_cast<int>(i / sp);
  Eigen::Index r = i % sp;
  for (int a = l.d - 1; a >= 0; --a) {
    c.x[a] = static_cast<int>(r % l.n);
    r /= l.n;
  }
  return c;
}

void check_lattice(const Lattice& l, std::size_t cells) {
  if (l.d < 1 || l.d > 3 || l.n < 1 || l.nt < 1) throw Error("invalid lattice");
  if (static_cast<Eigen::Index>(cells) != l.size()) throw Error("cell array does not match the lattice");
}

void check_boxes(const std::vector<int>& box_cells) {
  if (box_cells.size() < 4) throw Error("box counting needs at least 4 box sizes");
  for (std::size_t k = 0; k < box_cells.size(); ++k) {
    if (box_cells[k] < 1) throw Error("box sizes must be positive");
    if (k > 0 && box_cells[k] <= box_cells[k - 1]) throw Error("box sizes must be strictly increasing");
  }
}

// Occupancy of the boxes of side b covering the mask, indexed like the lattice.
struct Boxes {
  int per_axis = 1;
  int per_time = 1;
  std::vector<std::uint8_t> occupied;
  Eigen::Index count = 0;
};

Boxes occupied_boxes(const SpaceTimeMask& mask, int b) {
  const Lattice& l = mask.lattice;
  Boxes bx;
  bx.per_axis = (l.n + b - 1) / b;
  bx.per_time = l.nt > 1 ? (l.nt + b - 1) / b : 1;
  Eigen::Index total = bx.per_time;
  for (int a = 0; a < l.d; ++a) total *= bx.per_axis;
  bx.occupied.assign(total, 0);
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (!mask.cells[i]) continue;
    const Coord c = coord_of(l, i);
    Eigen::Index id = l.nt > 1 ? c.t / b : 0;
    for (int a = 0; a < l.d; ++a) id = id * bx.per_axis + c.x[a] / b;
    if (!bx.occupied[id]) {
      bx.occupied[id] = 1;
      ++bx.count;
    }
  }
  return bx;
}

double box_radius(const Lattice& l, int b) {
  const double side = b * l.dx;
  if (l.nt == 1) return side;
  const double tau = std::min(b, l.nt) * l.dt;
  return std::pow(std::pow(side, l.d) * tau, 1.0 / (l.d + 1));
}

}  // namespace

Eigen::Index Lattice::space_points() const {
  Eigen::Index p = 1;
  for (int a = 0; a < d; ++a) p *= n;
  return p;
}

Lattice lattice_of(const PeriodicGrid& grid) {
  return Lattice{grid.d, grid.n, grid.nt, grid.dx(), grid.dt};
}

Eigen::Index SpaceTimeMask::count() const {
  return std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; });
}

SpaceTimeMeasure measure_from_field(const SpaceTimeField& density) {
  if (density.components() != 1) throw Error("density must be a scalar movie");
  SpaceTimeMeasure m;
  m.lattice = lattice_of(density.grid());
  const double w = density.grid().cell_volume() * (density.frames() > 1 ? density.grid().dt : 1.0);
  const Eigen::ArrayXd& s = density.samples();
  m.mass = s.abs() * w;
  const double pos = s.max(0.0).sum(), tv = s.abs().sum();
  m.signed_input = (s < 0.0).any() && (s > 0.0).any();
  m.positive_fraction = tv > 0.0 ? pos / tv : 1.0;
  return m;
}

ConcentrationSet concentration_set(const SpaceTimeMeasure& m, double threshold) {
  check_lattice(m.lattice, m.mass.size());
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("threshold must lie in (0, 1]");
  if ((m.mass < 0.0).any()) throw Error("cell masses must be non-negative");
  ConcentrationSet s;
  s.threshold = threshold;
  s.mask.lattice = m.lattice;
  s.mask.cells.assign(m.mass.size(), 0);
  const double total = m.mass.sum();
  if (total <= 0.0) return s;
  std::vector<Eigen::Index> order(m.mass.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return m.mass(a) > m.mass(b); });
  double acc = 0.0;
  for (Eigen::Index i : order) {
    if (acc >= threshold * total) break;
    acc += m.mass(i);
    s.mask.cells[i] = 1;
  }
  s.retained = acc / total;
  return s;
}

DimensionEstimate box_count_dimension(const SpaceTimeMask& mask, const std::vector<int>& box_cells) {
  check_lattice(mask.lattice, mask.cells.size());
  check_boxes(box_cells);
  if (mask.count() == 0) throw Error("empty mask");
  DimensionEstimate e;
  e.box_cells = box_cells;
  std::vector<double> inv;
  for (int b : box_cells) {
    e.radii.push_back(static_cast<double>(b) / mask.lattice.n);
    inv.push_back(1.0 / e.radii.back());
    e.counts.push_back(static_cast<double>(occupied_boxes(mask, b).count));
  }
  e.fit = fit_power_law(inv, e.counts);
  e.dimension = e.fit.exponent;
  return e;
}

CoveringCurve covering_mass_estimate(const SpaceTimeMeasure& m, double gamma,
                                     const std::vector<int>& box_cells, double threshold) {
  if (!(gamma >= 0.0)) throw Error("gamma must be non-negative");
  check_boxes(box_cells);
  const ConcentrationSet set = concentration_set(m, threshold);
  if (set.mask.count() == 0) throw Error("empty concentration set");
  const Lattice& l = m.lattice;
  const double total = m.mass.sum();
  CoveringCurve c;
  c.gamma = gamma;
  c.threshold = threshold;
  c.box_cells = box_cells;
  for (int b : box_cells) {
    const Boxes bx = occupied_boxes(set.mask, b);
    double covered = 0.0;
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      const Coord co = coord_of(l, i);
      Eigen::Index id = l.nt > 1 ? co.t / b : 0;
      for (int a = 0; a < l.d; ++a) id = id * bx.per_axis + co.x[a] / b;
      if (bx.occupied[id]) covered += m.mass(i);
    }
    const double r = box_radius(l, b);
    c.radii.push_back(r);
    c.counts.push_back(static_cast<double>(bx.count));
    c.sums.push_back(bx.count * std::pow(r, gamma));
    c.covered_mass.push_back(covered / total);
  }
  return c;
}

double density_exponent_prediction(double sigma, double p, int d) {
  const double tail = std::isinf(p) ? 1.0 : (p - 3.0) / p;
  return 2.0 * sigma / (1.0 - sigma) - 1.0 + tail * (d + 1);
}

DensityReport density_exponent_fit(const SpaceTimeMeasure& m, int count,
                                   const std::vector<int>& radii_cells, double delta, double sigma,
                                   double p, double threshold) {
  if (count < 1) throw Error("need at least one evaluation point");
  const Lattice& l = m.lattice;
  DensityReport r;
  r.positive_fraction = m.positive_fraction;
  r.signed_input = m.signed_input;
  for (int h : radii_cells) {
    if (h < 1) throw Error("ball half-widths must be positive");
    const double rad = (h + 0.5) * l.dx;
    if (rad < 4.0 * delta) continue;
    r.radii_cells.push_back(h);
    r.radii.push_back(rad);
  }
  if (r.radii.size() < 3) throw Error("radius window empty after the 4 delta floor");
  const ConcentrationSet set = concentration_set(m, threshold);
  const int hmax = *std::max_element(r.radii_cells.begin(), r.radii_cells.end());
  std::vector<Eigen::Index> candidates, all;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (!set.mask.cells[i]) continue;
    all.push_back(i);
    const int t = static_cast<int>(i / l.space_points());
    if (l.nt == 1 || (t >= hmax && t < l.nt - hmax)) candidates.push_back(i);
  }
  if (all.empty()) throw Error("empty concentration set");
  if (candidates.empty()) candidates = all;
  for (int k = 0; k < count; ++k) {
    const std::size_t j = static_cast<std::size_t>((k + 0.5) * candidates.size() / count);
    r.points.push_back(candidates[std::min(j, candidates.size() - 1)]);
  }
  r.fits.resize(r.points.size());
  parallel_for(static_cast<int>(r.points.size()), [&](int k) {
    const Coord c = coord_of(l, r.points[k]);
    std::vector<double> masses;
    for (int h : r.radii_cells) {
      const int w = std::min(2 * h + 1, l.n);
      const int t_lo = l.nt > 1 ? std::max(0, c.t - h) : 0;
      const int t_hi = l.nt > 1 ? std::min(l.nt - 1, c.t + h) : 0;
      const int wy = l.d > 1 ? w : 1, wz = l.d > 2 ? w : 1;
      double s = 0.0;
      for (int t = t_lo; t <= t_hi; ++t)
        for (int i = 0; i < w; ++i) {
          const int x = ((c.x[0] - h + i) % l.n + l.n) % l.n;
          for (int j = 0; j < wy; ++j) {
            const int y = l.d > 1 ? ((c.x[1] - h + j) % l.n + l.n) % l.n : 0;
            for (int q = 0; q < wz; ++q) {
              const int z = l.d > 2 ? ((c.x[2] - h + q) % l.n + l.n) % l.n : 0;
              Eigen::Index idx = x;
              if (l.d > 1) idx = idx * l.n + y;
              if (l.d > 2) idx = idx * l.n + z;
              s += m.mass(t * l.space_points() + idx);
            }
          }
        }
      masses.push_back(s);
    }
    r.fits[k] = fit_power_law(r.radii, masses);
  });
  r.min_exponent = std::numeric_limits<double>::infinity();
  for (const auto& f : r.fits) r.min_exponent = std::min(r.min_exponent, f.exponent);
  r.predicted = density_exponent_prediction(sigma, p, l.d);
  r.pass = r.min_exponent >= r.predicted - 0.2;
  return r;
}

}  // namespace disslab
