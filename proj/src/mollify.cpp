#include "disslab/mollify.hpp"

#include <algorithm>
#include <cmath>

#include "disslab/parallel.hpp"

namespace disslab {

Mollifier::Mollifier(const PeriodicGrid& grid, double radius, double radius_time, int power)
    : grid_(grid), radius_(radius), radius_time_(radius_time), power_(power) {
  if (!(radius >= 0.0)) throw Error("mollifier radius must be non-negative");
  if (radius > grid.L / 2) throw Error("mollifier radius exceeds half the domain");
  if (radius_time < 0.0) throw Error("mollifier time radius must be non-negative");
  if (power < 1) throw Error("bump power must be >= 1");
  const double dx = grid.dx();
  const bool space_identity = radius < 2.0 * dx;
  if (radius_time > 0.0) {
    reach_ = static_cast<int>(std::ceil(radius_time / grid.dt)) - 1;
    if (2 * reach_ + 1 > grid.nt) throw Error("mollifier time radius exceeds the movie length");
  }
  identity_ = space_identity && reach_ == 0;

  const int R = space_identity ? 0 : static_cast<int>(std::ceil(radius / dx));
  const int d = grid.d;
  std::array<int, 3> o{0, 0, 0};
  std::vector<double> r2;
  for (int i = -R; i <= R; ++i)
    for (int j = (d > 1 ? -R : 0); j <= (d > 1 ? R : 0); ++j)
      for (int k = (d > 2 ? -R : 0); k <= (d > 2 ? R : 0); ++k) {
        o = {i, j, k};
        const double s = space_identity ? 0.0 : (double(i) * i + double(j) * j + double(k) * k) * dx * dx / (radius * radius);
        if (s < 1.0) {
          offsets_.push_back(o);
          r2.push_back(s);
        }
      }

  const int slices = 2 * reach_ + 1;
  weights_.assign(slices, Eigen::ArrayXd::Zero(offsets_.size()));
  dweights_.assign(slices, Eigen::ArrayXd::Zero(offsets_.size()));
  double mass = 0.0;
  for (int jt = -reach_; jt <= reach_; ++jt) {
    const double tau = jt * grid.dt;
    const double st = radius_time > 0.0 ? tau * tau / (radius_time * radius_time) : 0.0;
    for (std::size_t q = 0; q < offsets_.size(); ++q) {
      const double s = r2[q] + st;
      if (s >= 1.0) continue;
      const double w = std::pow(1.0 - s, power);
      weights_[jt + reach_](q) = w;
      mass += w;
      if (radius_time > 0.0)
        dweights_[jt + reach_](q) = -2.0 * power * std::pow(1.0 - s, power - 1) * tau / (radius_time * radius_time);
    }
  }
  // derivative weights differentiate linear-in-time data exactly: -sum tau w' = 1
  double moment = 0.0;
  for (int jt = -reach_; jt <= reach_; ++jt) moment -= jt * grid.dt * dweights_[jt + reach_].sum();
  for (int s = 0; s < slices; ++s) {
    weights_[s] /= mass;
    if (moment > 0.0) dweights_[s] /= moment;
  }

  const FourierBox& box = *fourier_box(grid.shape());
  const int n = grid.n;
  auto multiplier_of = [&](const Eigen::ArrayXd& w) {
    Eigen::ArrayXd stencil = Eigen::ArrayXd::Zero(box.real_size());
    for (std::size_t q = 0; q < offsets_.size(); ++q) {
      Eigen::Index idx = 0;
      for (int a = 0; a < d; ++a) idx = idx * n + ((offsets_[q][a] % n) + n) % n;
      stencil(idx) += w(q);
    }
    return Eigen::ArrayXd(box.forward(stencil).real() * static_cast<double>(box.real_size()));
  };
  for (int s = 0; s < slices; ++s) {
    multipliers_.push_back(multiplier_of(weights_[s]));
    dmultipliers_.push_back(multiplier_of(dweights_[s]));
  }
  // unit mass is exact by construction; keep constants exactly invariant
  if (reach_ == 0) multipliers_[0](0) = 1.0;
}

double Mollifier::total_weight() const {
  double s = 0.0;
  for (const auto& w : weights_) s += w.sum();
  return s;
}

Eigen::ArrayXd mollify_frame(const Eigen::Ref<const Eigen::ArrayXd>& f, const Mollifier& m) {
  if (m.identity()) return f;
  const FourierBox& box = *fourier_box(m.grid().shape());
  return box.inverse(box.forward(f) * m.slice_multiplier(0));
}

Eigen::ArrayXd mollify_frame_direct(const Eigen::Ref<const Eigen::ArrayXd>& f, const Mollifier& m) {
  const PeriodicGrid& g = m.grid();
  const int n = g.n, d = g.d;
  const Eigen::ArrayXd& w = m.slice_weights(0);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const std::vector<int> x = unravel(i, d, n);
    double acc = 0.0;
    for (std::size_t q = 0; q < m.offsets().size(); ++q) {
      Eigen::Index idx = 0;
      for (int a = 0; a < d; ++a) idx = idx * n + (((x[a] - m.offsets()[q][a]) % n) + n) % n;
      acc += w(q) * f(idx);
    }
    out(i) = acc;
  }
  return out;
}

Mollified mollify(const SpaceTimeField& f, const Mollifier& m) {
  if (!f.grid().same_space(m.grid())) throw Error("mollifier grid does not match the field");
  const int reach = m.frame_reach();
  const int frames = f.frames() - 2 * reach;
  if (frames < 1) throw Error("movie too short for the mollifier time radius");
  PeriodicGrid g = f.grid();
  g.nt = frames;
  Mollified out{SpaceTimeField(g, f.components(), f.info()), reach};
  if (m.identity()) {
    out.field.samples() = f.samples();
    return out;
  }
  const FourierBox& box = *fourier_box(g.shape());
  for (int c = 0; c < f.components(); ++c) {
    if (reach == 0) {
      parallel_for(frames, [&](int t) {
        out.field.component(t, c) = box.inverse(box.forward(f.component(t, c)) * m.slice_multiplier(0));
      });
      continue;
    }
    std::vector<Coeffs> spectra(f.frames());
    parallel_for(f.frames(), [&](int t) { spectra[t] = box.forward(f.component(t, c)); });
    parallel_for(frames, [&](int t) {
      Coeffs acc = Coeffs::Zero(box.spectral_size());
      for (int j = -reach; j <= reach; ++j) acc += spectra[t + reach - j] * m.slice_multiplier(j);
      out.field.component(t, c) = box.inverse(acc);
    });
  }
  return out;
}

SpaceTimeField mollify_space(const SpaceTimeField& f, const Mollifier& m) {
  if (m.space_time()) throw Error("mollify_space needs a space-only mollifier");
  return mollify(f, m).field;
}

SpaceTimeField commutator(const SpaceTimeField& u, const Mollifier& m) {
  const int c = u.components();
  if (c < 1) throw Error("commutator needs a field with at least one component");
  if (m.space_time()) throw Error("commutator uses a space-only mollifier");
  const SpectralOps ops(u.grid());
  SpaceTimeField out(u.grid(), c * (c + 1) / 2, FieldInfo{"commutator", u.info().viscosity, ""});
  parallel_for(u.frames(), [&](int t) {
    std::vector<Eigen::ArrayXd> fine(c), fine_l(c);
    for (int a = 0; a < c; ++a) {
      fine[a] = ops.to_fine(u.component(t, a));
      fine_l[a] = ops.to_fine(mollify_frame(u.component(t, a), m));
    }
    int s = 0;
    for (int a = 0; a < c; ++a)
      for (int b = a; b < c; ++b, ++s)
        out.component(t, s) = ops.from_fine(fine_l[a] * fine_l[b]) -
                              mollify_frame(ops.from_fine(fine[a] * fine[b]), m);
  });
  return out;
}

MollificationRates mollification_rate_report(const SpaceTimeField& f, double p, double sigma_target,
                                             const std::vector<double>& scales, int power) {
  if (scales.size() < 4) throw Error("rate report needs at least 4 scales");
  const SpectralOps ops(f.grid());
  MollificationRates rep;
  rep.scales = scales;
  rep.sigma_target = sigma_target;
  auto gradient_norm = [&](const std::vector<Eigen::ArrayXd>& frames) {
    Eigen::ArrayXd all(frames.size() * ops.points());
    for (std::size_t t = 0; t < frames.size(); ++t)
      all.segment(t * ops.points(), ops.points()) = ops.gradient(frames[t]).square().rowwise().sum().sqrt();
    return lp_norm(all, p);
  };
  for (double ell : scales) {
    const Mollifier m(f.grid(), ell, 0.0, power);
    std::vector<Eigen::ArrayXd> diff, fl, comm;
    for (int t = 0; t < f.frames(); ++t) {
      const auto x = f.component(t, 0);
      const Eigen::ArrayXd xl = mollify_frame(x, m);
      diff.push_back(x - xl);
      fl.push_back(xl);
      comm.push_back(ops.product(xl, xl) - mollify_frame(ops.product(x, x), m));
    }
    Eigen::ArrayXd all(diff.size() * ops.points());
    for (std::size_t t = 0; t < diff.size(); ++t) all.segment(t * ops.points(), ops.points()) = diff[t];
    rep.difference.push_back(lp_norm(all, p));
    rep.gradient.push_back(gradient_norm(fl));
    rep.commutator.push_back(gradient_norm(comm));
  }
  const double ref = lp_norm(f.samples(), p);
  rep.degenerate = *std::max_element(rep.difference.begin(), rep.difference.end()) <= 1e-13 * std::max(ref, 1e-300);
  if (rep.degenerate) return rep;
  rep.difference_fit = fit_power_law(scales, rep.difference);
  rep.gradient_fit = fit_power_law(scales, rep.gradient);
  rep.commutator_fit = fit_power_law(scales, rep.commutator);
  return rep;
}

}  // namespace disslab
