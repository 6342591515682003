#include "disslab/transport.hpp"

#include <cmath>

#include "disslab/mollify.hpp"
#include "disslab/parallel.hpp"
#include "weak_form.hpp"

namespace disslab {

using detail::Probe;
using detail::WeakAccumulator;

namespace {

void check_inputs(const SpaceTimeField& theta, const SpaceTimeField& v) {
  if (theta.components() != 1) throw Error("transported field must be scalar");
  if (!theta.grid().same_space(v.grid())) throw Error("scalar and velocity grids differ");
  if (v.components() != v.grid().d) throw Error("velocity needs d components");
  if (v.frames() != 1 && v.frames() != theta.frames())
    throw Error("velocity must be steady or have one frame per scalar frame");
}

struct ScalarFrame {
  Coeffs th;
  std::vector<Coeffs> vh, prod;  // prod[a] = projected theta v_a
  Eigen::ArrayXd theta;
  std::vector<Eigen::ArrayXd> grad, v;
};

ScalarFrame scalar_frame(const SpectralOps& ops, const SpaceTimeField& theta, const SpaceTimeField& v, int t) {
  const int d = theta.grid().d;
  const int tv = v.frames() == 1 ? 0 : t;
  ScalarFrame f;
  f.th = ops.fft(theta.component(t, 0));
  f.theta = ops.fine_from_coeffs(f.th);
  Coeffs div = Coeffs::Zero(ops.box().spectral_size());
  double grad2 = 0.0;
  for (int a = 0; a < d; ++a) {
    f.grad.push_back(ops.fine_from_coeffs(ops.derivative(f.th, a)));
    f.vh.push_back(ops.fft(v.component(tv, a)));
    div += ops.derivative(f.vh[a], a);
    grad2 += (f.vh[a].abs2() * ops.k_squared()).sum();
    f.v.push_back(ops.fine_from_coeffs(f.vh[a]));
    f.prod.push_back(ops.coeffs_from_fine(f.theta * f.v[a]));
  }
  if (std::sqrt(div.abs2().sum()) > 1e-8 * std::sqrt(grad2) + 1e-300)
    throw Error("velocity is not divergence-free");
  return f;
}

struct ScalarScale {
  Eigen::ArrayXd thl, w, E, C, graddiff, gradsq;
  std::vector<Eigen::ArrayXd> vl, Q;
  std::vector<Coeffs> Rhat;
};

ScalarScale scalar_scale(const SpectralOps& ops, const ScalarFrame& f, const Mollifier& m) {
  const int d = static_cast<int>(f.vh.size());
  const Eigen::ArrayXd mult = m.identity() ? Eigen::ArrayXd::Ones(ops.box().spectral_size())
                                           : m.slice_multiplier(0);
  ScalarScale s;
  const Coeffs thl = f.th * mult;
  s.thl = ops.fine_from_coeffs(thl);
  s.w = f.theta - s.thl;
  s.E = 0.5 * s.w.square();
  Coeffs divR = Coeffs::Zero(ops.box().spectral_size());
  const Eigen::Index nf = ops.fine_points();
  s.C = Eigen::ArrayXd::Zero(nf);
  s.graddiff = Eigen::ArrayXd::Zero(nf);
  s.gradsq = Eigen::ArrayXd::Zero(nf);
  Eigen::ArrayXd drift = Eigen::ArrayXd::Zero(nf);
  for (int a = 0; a < d; ++a) {
    s.vl.push_back(ops.fine_from_coeffs(f.vh[a] * mult));
    s.Rhat.push_back(ops.coeffs_from_fine(s.thl * s.vl[a]) - f.prod[a] * mult);
    divR += ops.derivative(s.Rhat[a], a);
    const Eigen::ArrayXd gl = ops.fine_from_coeffs(ops.derivative(thl, a));
    const Eigen::ArrayXd vp = f.v[a] - s.vl[a];
    s.Q.push_back(s.E * vp);
    drift += vp * gl;
    s.graddiff += (gl - f.grad[a]).square();
    s.gradsq += gl.square();
  }
  s.C = s.w * (drift + ops.fine_from_coeffs(divR));
  return s;
}

struct BurgersFrame {
  Coeffs uh, prod;
  Eigen::ArrayXd u, ux;
};

BurgersFrame burgers_frame(const SpectralOps& ops, const SpaceTimeField& u, int t) {
  BurgersFrame f;
  f.uh = ops.fft(u.component(t, 0));
  f.u = ops.fine_from_coeffs(f.uh);
  f.ux = ops.fine_from_coeffs(ops.derivative(f.uh, 0));
  f.prod = ops.coeffs_from_fine(f.u.square());
  return f;
}

struct BurgersScale {
  Eigen::ArrayXd ul, ulx, w, wx, E, Q, C;
  Coeffs Rhat;
};

BurgersScale burgers_scale(const SpectralOps& ops, const BurgersFrame& f, const Mollifier& m) {
  const Eigen::ArrayXd mult = m.identity() ? Eigen::ArrayXd::Ones(ops.box().spectral_size())
                                           : m.slice_multiplier(0);
  BurgersScale s;
  const Coeffs ulh = f.uh * mult;
  s.ul = ops.fine_from_coeffs(ulh);
  s.ulx = ops.fine_from_coeffs(ops.derivative(ulh, 0));
  s.w = f.u - s.ul;
  s.wx = f.ux - s.ulx;
  s.E = 0.5 * s.w.square();
  s.Q = s.w.cube() / 3.0;
  s.Rhat = ops.coeffs_from_fine(s.ul.square()) - f.prod * mult;
  const Eigen::ArrayXd Rx = ops.fine_from_coeffs(ops.derivative(s.Rhat, 0));
  s.C = 0.5 * s.w * (Rx + s.w * s.ulx);
  return s;
}

void require_burgers(const SpaceTimeField& u) {
  if (u.grid().d != 1 || u.components() != 1) throw Error("Burgers analysis needs a scalar 1D movie");
}

}  // namespace

TransportTerms transport_terms(const SpaceTimeField& theta, const SpaceTimeField& velocity,
                               double ell, int power) {
  check_inputs(theta, velocity);
  const Mollifier m(theta.grid(), ell, 0.0, power);
  const SpectralOps ops(theta.grid());
  const PeriodicGrid& g = theta.grid();
  const int d = g.d;
  auto info = [&](const char* name) { return FieldInfo{name, 0.0, theta.info().name}; };
  TransportTerms out{ell, SpaceTimeField(g, 1, info("E")), SpaceTimeField(g, d, info("Q")),
                     SpaceTimeField(g, d, info("R")), SpaceTimeField(g, 1, info("C"))};
  parallel_for(theta.frames(), [&](int t) {
    const ScalarFrame f = scalar_frame(ops, theta, velocity, t);
    const ScalarScale s = scalar_scale(ops, f, m);
    out.E.component(t, 0) = ops.from_fine(s.E);
    for (int a = 0; a < d; ++a) {
      out.Q.component(t, a) = ops.from_fine(s.Q[a]);
      out.R.component(t, a) = ops.ifft(s.Rhat[a]);
    }
    out.C.component(t, 0) = ops.from_fine(s.C);
  });
  return out;
}

std::vector<DissipationPairing> scalar_dissipation_pairings(const SpaceTimeField& theta,
                                                            const SpaceTimeField& velocity,
                                                            double kappa,
                                                            const std::vector<TestFunction>& phis) {
  check_inputs(theta, velocity);
  detail::check_support(theta.grid(), phis);
  const SpectralOps ops(theta.grid());
  enum { kDiss, kLossSlot, kSlots };
  const WeakAccumulator acc = detail::accumulate_frames(
      ops, theta.grid(), phis, kSlots, [&](int t, WeakAccumulator& a) {
        const ScalarFrame f = scalar_frame(ops, theta, velocity, t);
        const Eigen::ArrayXd e = 0.5 * f.theta.square();
        std::vector<Eigen::ArrayXd> flux;
        Eigen::ArrayXd loss = Eigen::ArrayXd::Zero(ops.fine_points());
        for (std::size_t c = 0; c < f.v.size(); ++c) {
          flux.push_back(e * f.v[c]);
          loss += kappa * f.grad[c].square();
        }
        a.scalar(kDiss, 1.0, e, Probe::rate);
        if (kappa != 0.0) a.scalar(kDiss, kappa, e, Probe::laplacian);
        a.flux(kDiss, 1.0, flux);
        a.scalar(kDiss, -1.0, loss, Probe::value);
        a.scalar(kLossSlot, 1.0, loss, Probe::value);
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

std::vector<PairingRow> transport_identity_table(const SpaceTimeField& theta,
                                                 const SpaceTimeField& velocity, double kappa,
                                                 const std::vector<double>& ells,
                                                 const std::vector<TestFunction>& phis, int power) {
  check_inputs(theta, velocity);
  detail::check_support(theta.grid(), phis);
  if (ells.empty()) throw Error("identity table needs at least one scale");
  const SpectralOps ops(theta.grid());
  std::vector<Mollifier> ms;
  for (double ell : ells) ms.emplace_back(theta.grid(), ell, 0.0, power);
  using namespace detail;
  const WeakAccumulator acc = accumulate_frames(
      ops, theta.grid(), phis, identity_slots(ells.size()), [&](int t, WeakAccumulator& a) {
        const ScalarFrame f = scalar_frame(ops, theta, velocity, t);
        const int d = static_cast<int>(f.v.size());
        const Eigen::ArrayXd e = 0.5 * f.theta.square();
        std::vector<Eigen::ArrayXd> flux;
        Eigen::ArrayXd loss = Eigen::ArrayXd::Zero(ops.fine_points());
        for (int c = 0; c < d; ++c) {
          flux.push_back(e * f.v[c]);
          loss += kappa * f.grad[c].square();
        }
        a.scalar(kLhs, -1.0, e, Probe::rate);
        if (kappa != 0.0) a.scalar(kLhs, -kappa, e, Probe::laplacian);
        a.flux(kLhs, -1.0, flux);
        a.scalar(kLhs, 1.0, loss, Probe::value);
        a.scalar(kLoss, 1.0, loss, Probe::value);
        for (std::size_t k = 0; k < ms.size(); ++k) {
          const int i = static_cast<int>(k);
          const ScalarScale s = scalar_scale(ops, f, ms[k]);
          const int rhs = scale_slot(i, kRhs);
          a.scalar(rhs, -1.0, s.E, Probe::rate);
          if (kappa != 0.0) a.scalar(rhs, -kappa, s.E, Probe::laplacian);
          std::vector<Eigen::ArrayXd> adv;
          for (int c = 0; c < d; ++c) adv.push_back(s.E * s.vl[c]);
          a.flux(rhs, -1.0, adv);
          a.flux(rhs, -1.0, s.Q);
          a.scalar(rhs, 1.0, s.C, Probe::value);
          if (kappa != 0.0) a.scalar(rhs, kappa, s.graddiff, Probe::value);
          a.scalar(scale_slot(i, kFlux), 1.0, s.C, Probe::value);
          a.scalar(scale_slot(i, kCoarseLoss), kappa, s.gradsq, Probe::value);
          Eigen::ArrayXd qmag = Eigen::ArrayXd::Zero(ops.fine_points());
          for (int c = 0; c < d; ++c) qmag += s.Q[c].square();
          a.norm1(scale_slot(i, kNormQ), qmag.sqrt());
          a.norm1(scale_slot(i, kNormC), s.C);
        }
      });
  return identity_rows(acc, phis, ells);
}

double transport_identity_residual(const SpaceTimeField& theta, const SpaceTimeField& velocity,
                                   double kappa, double ell, const TestFunction& phi) {
  return transport_identity_table(theta, velocity, kappa, {ell}, {phi})[0].residual;
}

BurgersTerms burgers_terms(const SpaceTimeField& u, double ell, int power) {
  require_burgers(u);
  const Mollifier m(u.grid(), ell, 0.0, power);
  const SpectralOps ops(u.grid());
  const PeriodicGrid& g = u.grid();
  auto info = [&](const char* name) { return FieldInfo{name, u.info().viscosity, u.info().name}; };
  BurgersTerms out{ell, SpaceTimeField(g, 1, info("E")), SpaceTimeField(g, 1, info("Q")),
                   SpaceTimeField(g, 1, info("R")), SpaceTimeField(g, 1, info("C"))};
  parallel_for(u.frames(), [&](int t) {
    const BurgersFrame f = burgers_frame(ops, u, t);
    const BurgersScale s = burgers_scale(ops, f, m);
    out.E.component(t, 0) = ops.from_fine(s.E);
    out.Q.component(t, 0) = ops.from_fine(s.Q);
    out.R.component(t, 0) = ops.ifft(s.Rhat);
    out.C.component(t, 0) = ops.from_fine(s.C);
  });
  return out;
}

std::vector<PairingRow> burgers_identity_table(const SpaceTimeField& u, double nu,
                                               const std::vector<double>& ells,
                                               const std::vector<TestFunction>& phis, int power) {
  require_burgers(u);
  detail::check_support(u.grid(), phis);
  if (ells.empty()) throw Error("identity table needs at least one scale");
  const SpectralOps ops(u.grid());
  std::vector<Mollifier> ms;
  for (double ell : ells) ms.emplace_back(u.grid(), ell, 0.0, power);
  using namespace detail;
  const WeakAccumulator acc = accumulate_frames(
      ops, u.grid(), phis, identity_slots(ells.size()), [&](int t, WeakAccumulator& a) {
        const BurgersFrame f = burgers_frame(ops, u, t);
        const Eigen::ArrayXd e = 0.5 * f.u.square();
        const Eigen::ArrayXd loss = nu * f.ux.square();
        a.scalar(kLhs, -1.0, e, Probe::rate);
        if (nu != 0.0) a.scalar(kLhs, -nu, e, Probe::laplacian);
        a.flux(kLhs, -1.0, {Eigen::ArrayXd(f.u.cube() / 3.0)});
        a.scalar(kLhs, 1.0, loss, Probe::value);
        a.scalar(kLoss, 1.0, loss, Probe::value);
        for (std::size_t k = 0; k < ms.size(); ++k) {
          const int i = static_cast<int>(k);
          const BurgersScale s = burgers_scale(ops, f, ms[k]);
          const int rhs = scale_slot(i, kRhs);
          a.scalar(rhs, -1.0, s.E, Probe::rate);
          if (nu != 0.0) a.scalar(rhs, -nu, s.E, Probe::laplacian);
          a.flux(rhs, -1.0, {Eigen::ArrayXd(s.E * s.ul)});
          a.flux(rhs, -1.0, {s.Q});
          a.scalar(rhs, 1.0, s.C, Probe::value);
          if (nu != 0.0) a.scalar(rhs, nu, s.wx.square(), Probe::value);
          a.scalar(scale_slot(i, kFlux), 1.0, s.C, Probe::value);
          a.scalar(scale_slot(i, kCoarseLoss), nu, s.ulx.square(), Probe::value);
          a.norm1(scale_slot(i, kNormQ), s.Q);
          a.norm1(scale_slot(i, kNormC), s.C);
        }
      });
  return identity_rows(acc, phis, ells);
}

double burgers_identity_residual(const SpaceTimeField& u, double nu, double ell,
                                 const TestFunction& phi) {
  return burgers_identity_table(u, nu, {ell}, {phi})[0].residual;
}

}  // namespace disslab
