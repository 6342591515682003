#include "disslab/lp_besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace disslab {

double lp_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double s = std::log2(r);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

DyadicFamily::DyadicFamily(std::shared_ptr<const FourierBox> box, Eigen::ArrayXd radius, int bands)
    : box_(std::move(box)), radius_(std::move(radius)), bands_(bands) {
  if (bands_ < 2) throw Error("dyadic family needs at least 2 bands (n >= 16)");
}

Eigen::ArrayXd DyadicFamily::multiplier(int k) const {
  if (k < 0 || k > bands_) throw Error("band index out of range");
  auto chi = [&](double scale) { return radius_.unaryExpr([scale](double r) { return lp_cutoff(r * scale); }); };
  if (k == 0) return chi(1.0);
  if (k == bands_) return 1.0 - chi(std::ldexp(1.0, -(k - 1)));
  return chi(std::ldexp(1.0, -k)) - chi(std::ldexp(1.0, -(k - 1)));
}

namespace {

int band_count(int n) {
  int K = -1;
  for (int m = n / 2; m > 1; m /= 2) ++K;
  return K;
}

}  // namespace

DyadicFamily build_dyadic_family(const PeriodicGrid& grid) {
  if (grid.n < 16) throw Error("dyadic family needs n >= 16");
  auto box = fourier_box(grid.shape());
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(box->spectral_size());
  for (int a = 0; a < grid.d; ++a) r2 += box->wavenumbers(a).cast<double>().square();
  return DyadicFamily(box, r2.sqrt(), band_count(grid.n));
}

DyadicFamily build_space_time_family(const PeriodicGrid& grid) {
  if (grid.n < 16) throw Error("dyadic family needs n >= 16");
  if (grid.nt < 4) throw Error("space-time family needs at least 4 frames");
  std::vector<int> shape{grid.nt};
  for (int a = 0; a < grid.d; ++a) shape.push_back(grid.n);
  auto box = fourier_box(shape);
  const double time_unit = grid.L / (grid.nt * grid.dt);
  Eigen::ArrayXd r2 = (box->wavenumbers(0).cast<double>() * time_unit).square();
  for (int a = 1; a <= grid.d; ++a) r2 += box->wavenumbers(a).cast<double>().square();
  return DyadicFamily(box, r2.sqrt(), band_count(grid.n));
}

SpaceTimeField band_project(const SpaceTimeField& f, const DyadicFamily& family, int k) {
  const Eigen::ArrayXd m = family.multiplier(k);
  const FourierBox& box = family.box();
  SpaceTimeField out(f.grid(), f.components(), f.info());
  const bool space_time = static_cast<int>(box.shape().size()) == f.grid().d + 1;
  if (!space_time) {
    if (box.real_size() != f.points()) throw Error("family does not match the field grid");
    for (int t = 0; t < f.frames(); ++t)
      for (int c = 0; c < f.components(); ++c)
        out.component(t, c) = box.inverse(box.forward(f.component(t, c)) * m);
    return out;
  }
  if (box.real_size() != f.points() * f.frames()) throw Error("family does not match the movie");
  for (int c = 0; c < f.components(); ++c) {
    Eigen::ArrayXd movie(f.points() * f.frames());
    for (int t = 0; t < f.frames(); ++t) movie.segment(t * f.points(), f.points()) = f.component(t, c);
    const Eigen::ArrayXd band = box.inverse(box.forward(movie) * m);
    for (int t = 0; t < f.frames(); ++t) out.component(t, c) = band.segment(t * f.points(), f.points());
  }
  return out;
}

namespace {

Eigen::ArrayXd magnitude(const SpaceTimeField& f, int t) {
  if (f.components() == 1) return f.component(t, 0).abs();
  return f.frame(t).square().rowwise().sum().sqrt();
}

double field_norm(const SpaceTimeField& f, double p, BesovMode mode) {
  if (mode == BesovMode::per_slice) {
    Eigen::ArrayXd slices(f.frames());
    for (int t = 0; t < f.frames(); ++t) slices(t) = lp_norm(magnitude(f, t), p);
    return lp_norm(slices, p);
  }
  Eigen::ArrayXd all(f.points() * f.frames());
  for (int t = 0; t < f.frames(); ++t) all.segment(t * f.points(), f.points()) = magnitude(f, t);
  return lp_norm(all, p);
}

}  // namespace

BesovEstimate besov_norm(const SpaceTimeField& f, double alpha, double p,
                         const DyadicFamily& family, BesovMode mode) {
  if (f.samples().size() == 0) throw Error("empty field");
  if (!(p >= 1.0)) throw Error("Besov integrability index must be >= 1");
  BesovEstimate est;
  est.p = p;
  est.alpha = alpha;
  est.lowpass = field_norm(band_project(f, family, 0), p, mode);
  double sup = 0.0;
  for (int k = 1; k <= family.bands(); ++k) {
    const double b = field_norm(band_project(f, family, k), p, mode);
    est.band_norms.push_back(b);
    sup = std::max(sup, std::pow(2.0, k * alpha) * b);
  }
  est.norm = est.lowpass + sup;
  return est;
}

BesovFit fit_besov_exponent(const SpaceTimeField& f, double p, const DyadicFamily& family,
                            std::pair<int, int> window, BesovMode mode) {
  const int K = family.bands();
  const int lo = std::max(1, window.first);
  const int hi = window.second > 0 ? std::min(window.second, K) : K - 1;
  if (hi - lo + 1 < 3) throw Error("Besov fit window needs at least 3 bands");
  const BesovEstimate est = besov_norm(f, 0.0, p, family, mode);
  const double scale = std::max(est.lowpass, *std::max_element(est.band_norms.begin(), est.band_norms.end()));
  if (!(scale > 0.0)) throw Error("cannot fit a Besov exponent on an all-zero field");
  const double floor = 1e-11 * scale;

  std::vector<double> x, y;
  bool saturated = false;
  for (int k = lo; k <= hi; ++k) {
    const double b = est.band_norms[k - 1];
    if (b <= floor) {
      saturated = true;
      break;
    }
    x.push_back(std::ldexp(1.0, k));
    y.push_back(b);
  }
  BesovFit out;
  out.band_norms = est.band_norms;
  out.saturated = saturated;
  if (x.size() >= 2) {
    out.fit = fit_power_law(x, y);
    out.fit.exponent = -out.fit.exponent;
  } else {
    out.fit.exponent = 1.0;
    out.fit.r2 = 0.0;
    out.fit.points = static_cast<int>(x.size());
  }
  if (saturated) out.fit.exponent = std::max(out.fit.exponent, 1.0);
  return out;
}

}  // namespace disslab
