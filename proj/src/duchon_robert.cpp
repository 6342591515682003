#include "disslab/duchon_robert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "disslab/parallel.hpp"
#include "weak_form.hpp"

namespace disslab {

using detail::Probe;
using detail::WeakAccumulator;

namespace {

const std::complex<double> kI(0.0, 1.0);

int pair_index(int a, int b, int d) {
  if (a > b) std::swap(a, b);
  return a * d - a * (a - 1) / 2 + (b - a);
}

// Fine-grid samples of one velocity frame plus the spectral data the scale loop needs.
struct FlowFrame {
  int d = 0;
  std::vector<Coeffs> uhat;
  std::vector<Coeffs> prod;  // projected u_a u_b, upper triangle
  Coeffs qhat;
  std::vector<Eigen::ArrayXd> u;
  std::vector<Eigen::ArrayXd> grad;  // grad[a * d + b] = d_b u_a
  Eigen::ArrayXd q;
};

Coeffs pressure_coeffs(const SpectralOps& ops, const std::vector<Coeffs>& prod, int d) {
  Coeffs acc = Coeffs::Zero(ops.box().spectral_size());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) acc -= ops.k(a) * ops.k(b) * prod[pair_index(a, b, d)];
  // -Lap q = div div P  <=>  |k|^2 q = -k_a k_b P_ab
  Coeffs q = acc;
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = ops.k_squared()(i) > 0.0 ? acc(i) / ops.k_squared()(i) : 0.0;
  return q;
}

FlowFrame flow_frame(const SpectralOps& ops, const SpaceTimeField& u, const SpaceTimeField* q, int t) {
  FlowFrame f;
  const int d = u.components();
  f.d = d;
  for (int a = 0; a < d; ++a) {
    f.uhat.push_back(ops.fft(u.component(t, a)));
    f.u.push_back(ops.fine_from_coeffs(f.uhat[a]));
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) f.grad.push_back(ops.fine_from_coeffs(ops.derivative(f.uhat[a], b)));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) f.prod.push_back(ops.coeffs_from_fine(f.u[a] * f.u[b]));
  f.qhat = q ? ops.fft(q->component(t, 0)) : pressure_coeffs(ops, f.prod, d);
  f.q = ops.fine_from_coeffs(f.qhat);
  return f;
}

// Scale-ell quantities of one frame on the fine grid.
struct ScaleFrame {
  std::vector<Eigen::ArrayXd> ul, gradl, divR, w, Q;
  std::vector<Coeffs> Rhat;
  Eigen::ArrayXd ql, E, C, gradsq, cross, graddiff;
};

ScaleFrame scale_frame(const SpectralOps& ops, const FlowFrame& f, const Mollifier& m) {
  const int d = f.d;
  const Eigen::ArrayXd mult = m.identity() ? Eigen::ArrayXd::Ones(ops.box().spectral_size())
                                           : m.slice_multiplier(0);
  ScaleFrame s;
  std::vector<Coeffs> ulhat;
  for (int a = 0; a < d; ++a) {
    ulhat.push_back(f.uhat[a] * mult);
    s.ul.push_back(ops.fine_from_coeffs(ulhat[a]));
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s.gradl.push_back(ops.fine_from_coeffs(ops.derivative(ulhat[a], b)));
  s.ql = ops.fine_from_coeffs(f.qhat * mult);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      s.Rhat.push_back(ops.coeffs_from_fine(s.ul[a] * s.ul[b]) - f.prod[pair_index(a, b, d)] * mult);
  for (int a = 0; a < d; ++a) {
    Coeffs acc = Coeffs::Zero(ops.box().spectral_size());
    for (int b = 0; b < d; ++b) acc += ops.derivative(s.Rhat[pair_index(a, b, d)], b);
    s.divR.push_back(ops.fine_from_coeffs(acc));
  }
  const Eigen::Index nf = ops.fine_points();
  s.E = Eigen::ArrayXd::Zero(nf);
  for (int a = 0; a < d; ++a) {
    s.w.push_back(f.u[a] - s.ul[a]);
    s.E += 0.5 * s.w[a].square();
  }
  const Eigen::ArrayXd head = s.E + f.q - s.ql;
  for (int a = 0; a < d; ++a) s.Q.push_back(head * s.w[a]);
  s.C = Eigen::ArrayXd::Zero(nf);
  s.gradsq = Eigen::ArrayXd::Zero(nf);
  s.cross = Eigen::ArrayXd::Zero(nf);
  s.graddiff = Eigen::ArrayXd::Zero(nf);
  for (int a = 0; a < d; ++a) {
    s.C += s.w[a] * s.divR[a];
    for (int b = 0; b < d; ++b) {
      const Eigen::ArrayXd& gl = s.gradl[a * d + b];
      s.C += s.w[a] * s.w[b] * gl;
      s.gradsq += gl.square();
      s.cross += gl * f.grad[a * d + b];
      s.graddiff += (gl - f.grad[a * d + b]).square();
    }
  }
  return s;
}

void require_velocity(const SpaceTimeField& u) {
  if (u.components() != u.grid().d || u.grid().d < 2)
    throw Error("expected an incompressible velocity field with d >= 2 components");
}

void require_pressure(const SpaceTimeField& u, const SpaceTimeField* q) {
  if (!q) return;
  if (!q->grid().same_space(u.grid()) || q->frames() != u.frames() || q->components() != 1)
    throw Error("pressure movie does not match the velocity movie");
}

// Density, flux and pointwise loss of the energy balance of one frame (fine grid).
struct BalanceFrame {
  Eigen::ArrayXd density, loss;
  std::vector<Eigen::ArrayXd> flux;
};

BalanceFrame balance_frame(const SpectralOps& ops, const SpaceTimeField& u, const SpaceTimeField* q,
                           double nu, int t, BalanceLaw law) {
  BalanceFrame b;
  if (law == BalanceLaw::burgers) {
    const Coeffs c = ops.fft(u.component(t, 0));
    const Eigen::ArrayXd v = ops.fine_from_coeffs(c);
    const Eigen::ArrayXd vx = ops.fine_from_coeffs(ops.derivative(c, 0));
    b.density = 0.5 * v.square();
    b.flux.push_back(v.cube() / 3.0);
    b.loss = nu * vx.square();
    return b;
  }
  const FlowFrame f = flow_frame(ops, u, q, t);
  const int d = f.d;
  b.density = Eigen::ArrayXd::Zero(ops.fine_points());
  for (int a = 0; a < d; ++a) b.density += 0.5 * f.u[a].square();
  for (int a = 0; a < d; ++a) b.flux.push_back((b.density + f.q) * f.u[a]);
  b.loss = Eigen::ArrayXd::Zero(ops.fine_points());
  for (const auto& g : f.grad) b.loss += nu * g.square();
  return b;
}

void check_law(const SpaceTimeField& u, BalanceLaw law) {
  if (law == BalanceLaw::burgers) {
    if (u.grid().d != 1 || u.components() != 1) throw Error("Burgers balance needs a scalar 1D movie");
  } else {
    require_velocity(u);
  }
}

}  // namespace

double onsager_rate(double sigma) { return 2.0 * sigma / (1.0 - sigma); }

Eigen::ArrayXd pressure_frame(const SpectralOps& ops, const Eigen::Ref<const Eigen::ArrayXXd>& u) {
  const int d = static_cast<int>(u.cols());
  if (d != ops.grid().d || d < 2) throw Error("pressure needs a d-component velocity frame");
  std::vector<Coeffs> uhat;
  std::vector<Eigen::ArrayXd> fine;
  Coeffs div = Coeffs::Zero(ops.box().spectral_size());
  double grad2 = 0.0, div2 = 0.0, mean2 = 0.0;
  for (int a = 0; a < d; ++a) {
    uhat.push_back(ops.fft(u.col(a)));
    fine.push_back(ops.fine_from_coeffs(uhat[a]));
    div += ops.derivative(uhat[a], a);
    grad2 += (uhat[a].abs2() * ops.k_squared()).sum();
    mean2 += std::norm(uhat[a](0));
  }
  div2 = div.abs2().sum();
  if (std::sqrt(div2) > 1e-8 * std::sqrt(grad2) + 1e-14 * std::sqrt(mean2))
    throw Error("velocity frame is not divergence-free");
  std::vector<Coeffs> prod;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) prod.push_back(ops.coeffs_from_fine(fine[a] * fine[b]));
  return ops.ifft(pressure_coeffs(ops, prod, d));
}

SpaceTimeField solve_pressure(const SpaceTimeField& u) {
  require_velocity(u);
  const SpectralOps ops(u.grid());
  SpaceTimeField q(u.grid(), 1, FieldInfo{"pressure", u.info().viscosity, u.info().name});
  parallel_for(u.frames(), [&](int t) { q.component(t, 0) = pressure_frame(ops, u.frame(t)); });
  return q;
}

DecompositionTerms decomposition_terms(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                       double ell, double nu, int power) {
  require_velocity(u);
  require_pressure(u, pressure);
  const Mollifier m(u.grid(), ell, 0.0, power);
  const SpectralOps ops(u.grid());
  const int d = u.components();
  const PeriodicGrid& g = u.grid();
  auto info = [&](const char* name) { return FieldInfo{name, nu, u.info().name}; };
  DecompositionTerms out{ell,
                         SpaceTimeField(g, 1, info("E")),
                         SpaceTimeField(g, d, info("Q")),
                         SpaceTimeField(g, d * (d + 1) / 2, info("R")),
                         SpaceTimeField(g, 1, info("C")),
                         SpaceTimeField(g, 1, info("gradsq")),
                         SpaceTimeField(g, 1, info("cross"))};
  parallel_for(u.frames(), [&](int t) {
    const FlowFrame f = flow_frame(ops, u, pressure, t);
    const ScaleFrame s = scale_frame(ops, f, m);
    out.E.component(t, 0) = ops.from_fine(s.E);
    for (int a = 0; a < d; ++a) out.Q.component(t, a) = ops.from_fine(s.Q[a]);
    for (std::size_t k = 0; k < s.Rhat.size(); ++k) out.R.component(t, k) = ops.ifft(s.Rhat[k]);
    out.C.component(t, 0) = ops.from_fine(s.C);
    out.gradsq.component(t, 0) = ops.from_fine(s.gradsq);
    out.cross.component(t, 0) = ops.from_fine(s.cross);
  });
  return out;
}

std::vector<DissipationPairing> dr_pairings(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                            double nu, const std::vector<TestFunction>& phis,
                                            BalanceLaw law) {
  check_law(u, law);
  require_pressure(u, pressure);
  detail::check_support(u.grid(), phis);
  const SpectralOps ops(u.grid());
  enum { kDiss, kLossSlot, kSlots };
  const WeakAccumulator acc = detail::accumulate_frames(
      ops, u.grid(), phis, kSlots, [&](int t, WeakAccumulator& a) {
        const BalanceFrame b = balance_frame(ops, u, pressure, nu, t, law);
        a.scalar(kDiss, 1.0, b.density, Probe::rate);
        if (nu != 0.0) a.scalar(kDiss, nu, b.density, Probe::laplacian);
        a.flux(kDiss, 1.0, b.flux);
        a.scalar(kDiss, -1.0, b.loss, Probe::value);
        a.scalar(kLossSlot, 1.0, b.loss, Probe::value);
      });
  std::vector<DissipationPairing> out(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    out[i].dissipation = acc.total(i, kDiss);
    out[i].loss = acc.total(i, kLossSlot);
    out[i].total = out[i].dissipation + out[i].loss;
    out[i].magnitude = acc.magnitude(i, kDiss);
  }
  return out;
}

double dr_pairing(const SpaceTimeField& u, const SpaceTimeField* pressure, double nu,
                  const TestFunction& phi) {
  return dr_pairings(u, pressure, nu, {phi})[0].dissipation;
}

std::vector<PairingRow> identity_table(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                       double nu, const std::vector<double>& ells,
                                       const std::vector<TestFunction>& phis, int power) {
  require_velocity(u);
  require_pressure(u, pressure);
  detail::check_support(u.grid(), phis);
  if (ells.empty()) throw Error("identity table needs at least one scale");
  const SpectralOps ops(u.grid());
  std::vector<Mollifier> ms;
  for (double ell : ells) ms.emplace_back(u.grid(), ell, 0.0, power);
  const int d = u.components();
  using namespace detail;
  const WeakAccumulator acc = accumulate_frames(
      ops, u.grid(), phis, identity_slots(ells.size()), [&](int t, WeakAccumulator& a) {
        const FlowFrame f = flow_frame(ops, u, pressure, t);
        Eigen::ArrayXd e = Eigen::ArrayXd::Zero(ops.fine_points());
        for (int c = 0; c < d; ++c) e += 0.5 * f.u[c].square();
        std::vector<Eigen::ArrayXd> flux;
        for (int c = 0; c < d; ++c) flux.push_back((e + f.q) * f.u[c]);
        Eigen::ArrayXd loss = Eigen::ArrayXd::Zero(ops.fine_points());
        for (const auto& g : f.grad) loss += nu * g.square();
        // lhs = -<D, phi>
        a.scalar(kLhs, -1.0, e, Probe::rate);
        if (nu != 0.0) a.scalar(kLhs, -nu, e, Probe::laplacian);
        a.flux(kLhs, -1.0, flux);
        a.scalar(kLhs, 1.0, loss, Probe::value);
        a.scalar(kLoss, 1.0, loss, Probe::value);
        for (std::size_t k = 0; k < ms.size(); ++k) {
          const int i = static_cast<int>(k);
          const ScaleFrame s = scale_frame(ops, f, ms[k]);
          const int rhs = scale_slot(i, kRhs);
          a.scalar(rhs, -1.0, s.E, Probe::rate);
          if (nu != 0.0) a.scalar(rhs, -nu, s.E, Probe::laplacian);
          std::vector<Eigen::ArrayXd> adv;
          for (int c = 0; c < d; ++c) adv.push_back(s.E * s.ul[c]);
          a.flux(rhs, -1.0, adv);
          a.flux(rhs, -1.0, s.Q);
          a.scalar(rhs, 1.0, s.C, Probe::value);
          if (nu != 0.0) a.scalar(rhs, nu, s.graddiff, Probe::value);
          a.scalar(scale_slot(i, kFlux), 1.0, s.C, Probe::value);
          a.scalar(scale_slot(i, kCoarseLoss), nu, s.gradsq, Probe::value);
          Eigen::ArrayXd qmag = Eigen::ArrayXd::Zero(ops.fine_points());
          for (int c = 0; c < d; ++c) qmag += s.Q[c].square();
          a.norm1(scale_slot(i, kNormQ), qmag.sqrt());
          a.norm1(scale_slot(i, kNormC), s.C);
        }
      });
  return identity_rows(acc, phis, ells);
}

double identity_residual(const SpaceTimeField& u, const SpaceTimeField* pressure, double nu,
                         double ell, const TestFunction& phi) {
  return identity_table(u, pressure, nu, {ell}, {phi})[0].residual;
}

DissipationSample dissipation_sample(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                     double nu, double delta, double delta_t, BalanceLaw law,
                                     bool include_loss, int power) {
  check_law(u, law);
  require_pressure(u, pressure);
  const Mollifier m(u.grid(), delta, delta_t, power);
  const int reach = m.frame_reach();
  if (reach < 1) throw Error("dissipation sample needs a time radius spanning two frames");
  const SpectralOps ops(u.grid());
  const int d = u.grid().d;
  const int frames = u.frames() - 2 * reach;
  if (frames < 1) throw Error("movie too short for the mollifier time radius");

  // Spectral density, flux and loss for every frame.
  std::vector<Coeffs> eh(u.frames()), lh(u.frames()), divf(u.frames());
  parallel_for(u.frames(), [&](int t) {
    const BalanceFrame b = balance_frame(ops, u, pressure, nu, t, law);
    eh[t] = ops.coeffs_from_fine(b.density);
    lh[t] = ops.coeffs_from_fine(b.loss);
    Coeffs acc = Coeffs::Zero(ops.box().spectral_size());
    for (int a = 0; a < d; ++a) acc += ops.derivative(ops.coeffs_from_fine(b.flux[a]), a);
    divf[t] = acc;
  });

  PeriodicGrid g = u.grid();
  g.nt = frames;
  DissipationSample out;
  out.delta = delta;
  out.delta_t = delta_t;
  out.first_frame = reach;
  out.field = SpaceTimeField(g, 1, FieldInfo{include_loss ? "dissipation" : "total_dissipation", nu, u.info().name});
  parallel_for(frames, [&](int t) {
    Coeffs acc = Coeffs::Zero(ops.box().spectral_size());
    for (int j = -reach; j <= reach; ++j) {
      const int s = t + reach - j;
      Coeffs local = -ops.k_squared() * nu * eh[s] - divf[s];
      if (include_loss) local -= lh[s];
      acc += m.slice_multiplier(j) * local - m.slice_derivative_multiplier(j) * eh[s];
    }
    out.field.component(t, 0) = ops.ifft(acc);
  });
  return out;
}

MollifiedPairingRates dr_mollification_rates(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                             double nu, const std::vector<TestFunction>& phis,
                                             const std::vector<double>& deltas, double sigma,
                                             double time_ratio, int power, BalanceLaw law,
                                             PairingTarget target) {
  if (deltas.size() < 4) throw Error("mollification rates need at least 4 scales");
  if (phis.empty()) throw Error("mollification rates need test functions");
  MollifiedPairingRates rep;
  rep.deltas = deltas;
  rep.sigma = sigma;
  rep.predicted_difference = onsager_rate(sigma);
  rep.predicted_mollified = rep.predicted_difference - 1.0;

  // Pair every phi * rho_delta and phi - phi * rho_delta in one pass.
  std::vector<TestFunction> all;
  for (const auto& phi : phis)
    for (double delta : deltas) {
      const Mollifier m(u.grid(), delta, time_ratio * delta, power);
      TestFunction smooth = mollified_test_function(phi, m);
      all.push_back(combine(phi, 1.0, smooth, -1.0));
      all.push_back(std::move(smooth));
    }
  const auto pairs = dr_pairings(u, pressure, nu, all, law);
  const std::size_t nd = deltas.size();
  auto value = [&](const DissipationPairing& p) {
    return std::abs(target == PairingTarget::total ? p.total : p.dissipation);
  };
  double scale = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    std::vector<double> diff(nd), moll(nd);
    for (std::size_t k = 0; k < nd; ++k) {
      diff[k] = value(pairs[2 * (i * nd + k)]);
      moll[k] = value(pairs[2 * (i * nd + k) + 1]);
      scale = std::max(scale, pairs[2 * (i * nd + k) + 1].magnitude);
      peak = std::max(peak, moll[k]);
    }
    rep.difference.push_back(diff);
    rep.mollified.push_back(moll);
  }
  rep.trivial = peak <= 1e-6 * scale;
  if (rep.trivial) {
    rep.pass_difference = rep.pass_mollified = true;
    return rep;
  }
  for (std::size_t i = 0; i < phis.size(); ++i) {
    rep.difference_fits.push_back(fit_power_law(deltas, rep.difference[i]));
    rep.mollified_fits.push_back(fit_power_law(deltas, rep.mollified[i]));
  }
  auto mean_exponent = [](const std::vector<ScalingFit>& fits) {
    double s = 0.0;
    for (const auto& f : fits) s += f.exponent;
    return s / fits.size();
  };
  rep.difference_exponent = mean_exponent(rep.difference_fits);
  rep.mollified_exponent = mean_exponent(rep.mollified_fits);
  rep.pass_difference = rep.difference_exponent >= rep.predicted_difference - 0.15;
  rep.pass_mollified = rep.mollified_exponent >= rep.predicted_mollified - 0.15;
  return rep;
}

}  // namespace disslab
