#include "disslab/inviscid_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disslab/lp_besov.hpp"
#include "disslab/spectral.hpp"
#include "disslab/structure_fn.hpp"
#include "disslab/transport.hpp"

namespace disslab {

namespace {

double capped(double sigma) { return std::min(sigma, 1.0); }

// Trapezoid weight of frame t.
double time_weight(const PeriodicGrid& g, int t) {
  if (g.nt == 1) return 1.0;
  return (t == 0 || t == g.nt - 1) ? 0.5 * g.dt : g.dt;
}

double frame_loss(const SpectralOps& ops, const SpaceTimeField& u, int t, double nu) {
  const int d = u.grid().d;
  double s = 0.0;
  for (int c = 0; c < u.components(); ++c)
    for (int a = 0; a < d; ++a) s += ops.spatial_derivative(u.component(t, c), a).square().sum();
  return nu * s * u.grid().cell_volume();
}

std::vector<PairingRow> table(const SweepRecord& sweep, const SweepMember& m,
                              const std::vector<double>& ells, const std::vector<TestFunction>& phis) {
  if (sweep.law == BalanceLaw::burgers) return burgers_identity_table(m.movie, m.nu, ells, phis);
  return identity_table(m.movie, nullptr, m.nu, ells, phis);
}

// Power-law fit over the positive entries; fewer than three leaves the fit empty.
ScalingFit positive_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> px, py;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0.0) {
      px.push_back(x[i]);
      py.push_back(y[i]);
    }
  if (px.size() < 3) return {};
  return fit_power_law(px, py);
}

}  // namespace

double modulus_exponent(double sigma) {
  if (sigma >= 1.0) return 1.0;
  return std::min(onsager_rate(sigma), 1.0);
}
double quasi_singularity_exponent(double sigma) { return (3.0 * sigma - 1.0) / (1.0 + sigma); }
double resolved_scale_exponent(double sigma) { return 1.0 / (4.0 * sigma); }
double four_fifths_scale_exponent(double sigma) { return 1.0 / (2.0 * (1.0 - sigma)); }
double resolved_scale(double nu, double sigma) {
  if (!(sigma > 0.0)) throw Error("resolved scale needs sigma > 0");
  return std::pow(nu, resolved_scale_exponent(capped(sigma)) + 0.05);
}

double SweepRecord::sigma() const {
  if (members.empty()) throw Error("empty sweep");
  return capped(members.back().sigma);
}

SweepRecord build_sweep(BalanceLaw law, std::vector<double> nus, std::vector<SpaceTimeField> movies,
                        const std::vector<TestFunction>& phis, std::vector<std::string> sources) {
  if (nus.empty() || nus.size() != movies.size()) throw Error("sweep needs one movie per viscosity");
  if (!sources.empty() && sources.size() != nus.size()) throw Error("sweep sources do not match");
  SweepRecord rec;
  rec.law = law;
  for (const auto& p : phis) rec.phi_ids.push_back(p.id());
  for (std::size_t i = 0; i < nus.size(); ++i) {
    if (!(nus[i] > 0.0)) throw Error("sweep viscosities must be positive");
    if (i > 0 && !(nus[i] < nus[i - 1])) throw Error("sweep viscosities must be strictly decreasing");
    if (i > 0 && !movies[i].grid().same_space(movies[0].grid()))
      throw Error("sweep movies must share one spatial grid");
  }
  for (std::size_t i = 0; i < nus.size(); ++i) {
    SweepMember m;
    m.nu = nus[i];
    m.movie = std::move(movies[i]);
    m.source = sources.empty() ? m.movie.info().provenance : sources[i];
    const SpectralOps ops(m.movie.grid());
    for (int t = 0; t < m.movie.frames(); ++t)
      m.total_dissipation += time_weight(m.movie.grid(), t) * frame_loss(ops, m.movie, t, m.nu);
    if (!phis.empty())
      for (const auto& p : dr_pairings(m.movie, nullptr, m.nu, phis, law)) m.pairings.push_back(p.total);
    const DyadicFamily family = build_dyadic_family(m.movie.grid());
    const int lo = family.bands() - 1 >= 4 ? 2 : 1;
    const BesovFit bf = fit_besov_exponent(m.movie, 3.0, family, {lo, 0}, BesovMode::per_slice);
    m.sigma = bf.fit.exponent;
    m.sigma_saturated = bf.saturated;
    rec.members.push_back(std::move(m));
  }
  const double s = rec.sigma();
  for (auto& m : rec.members) m.resolved_scale = resolved_scale(m.nu, s);
  return rec;
}

ModulusReport kinetic_energy_modulus(const SpaceTimeField& u, double sigma) {
  const int nt = u.frames();
  if (nt < 64) throw Error("kinetic energy modulus needs at least 64 frames");
  ModulusReport r;
  const double cell = u.grid().cell_volume();
  for (int t = 0; t < nt; ++t) r.energy.push_back(0.5 * u.frame(t).square().sum() * cell);
  double emax = 0.0;
  for (double e : r.energy) emax = std::max(emax, std::abs(e));
  double vmax = 0.0;
  for (int lag = 1; lag <= nt / 4; lag *= 2) {
    double sup = 0.0;
    for (int t = 0; t + lag < nt; ++t) sup = std::max(sup, std::abs(r.energy[t + lag] - r.energy[t]));
    r.lags.push_back(lag * u.grid().dt);
    r.values.push_back(sup);
    vmax = std::max(vmax, sup);
  }
  r.predicted = modulus_exponent(sigma);
  r.degenerate = vmax <= 1e-13 * emax || vmax == 0.0;
  if (r.degenerate) {
    r.pass = true;
    return r;
  }
  r.fit = positive_fit(r.lags, r.values);
  r.pass = r.fit.points >= 3 && r.fit.exponent >= r.predicted - 0.15;
  return r;
}

QuasiSingularityReport quasi_singularity_fit(const SweepRecord& sweep, int phi_index) {
  if (sweep.members.size() < 3) throw Error("quasi-singularity fit needs at least 3 viscosities");
  if (phi_index < 0 || phi_index >= static_cast<int>(sweep.phi_ids.size()))
    throw Error("test function index out of range");
  QuasiSingularityReport r;
  for (const auto& m : sweep.members) {
    r.nus.push_back(m.nu);
    r.values.push_back(std::abs(m.pairings[phi_index]));
  }
  r.sigma = sweep.sigma();
  r.predicted = quasi_singularity_exponent(r.sigma);
  r.fit = fit_power_law(r.nus, r.values);
  r.pass = r.fit.exponent >= r.predicted - 0.15;
  return r;
}

FourFifthsReport four_fifths_residual(const SweepRecord& sweep, const std::vector<int>& ell_I_steps,
                                      const TimeBump& eta, int directions) {
  if (sweep.members.empty()) throw Error("empty sweep");
  if (ell_I_steps.empty()) throw Error("no outer scales given");
  const PeriodicGrid& g0 = sweep.members.front().movie.grid();
  const double dx = g0.dx();
  int top = 0;
  for (int s : ell_I_steps) {
    if (s < 2 || (s & (s - 1)) != 0 || s > g0.n / 4)
      throw Error("outer scales must be powers of two in [2, n/4] grid steps");
    top = std::max(top, s);
  }
  std::vector<int> steps;
  for (int s = 1; s <= top; s *= 2) steps.push_back(s);
  std::vector<double> ells;
  for (int s : steps) ells.push_back(s * dx);
  const bool with_sf = sweep.law == BalanceLaw::incompressible;

  FourFifthsReport r;
  r.predicted = 2.0 * sweep.sigma();
  for (int s : ell_I_steps) r.ell_I.push_back(s * dx);

  // per member: <D + loss, eta>, and per scale <C, eta>, <S/l, eta>
  std::vector<double> dissipation;
  std::vector<std::vector<double>> flux, sf;
  for (const auto& m : sweep.members) {
    const PeriodicGrid& g = m.movie.grid();
    const PeriodicGrid space = g.with_frames(1, 1.0);
    const TestFunction phi = windowed_profile("eta", space, eta);
    const auto rows = table(sweep, m, ells, {phi});
    dissipation.push_back(rows[0].total);
    std::vector<double> c, s(steps.size(), 0.0);
    for (const auto& row : rows) {
      c.push_back(row.flux);
      r.scale = std::max(r.scale, row.guard);
    }
    if (with_sf) {
      const auto frames = longitudinal_sf_frames(m.movie, steps, directions);
      for (int t = 0; t < g.nt; ++t) {
        const double w = time_weight(g, t) * eta.value(g.time(t)) * g.volume();
        for (std::size_t k = 0; k < steps.size(); ++k) s[k] += w * frames[t][k] / ells[k];
      }
    }
    flux.push_back(std::move(c));
    sf.push_back(std::move(s));
  }

  auto window_sup = [&](std::size_t i, double ell_nu, int s_I, double diss, double& bal, double& sfv) {
    bool any = false;
    bal = sfv = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (steps[k] > s_I || ells[k] < ell_nu) continue;
      any = true;
      bal = std::max(bal, std::abs(diss + flux[i][k]));
      if (with_sf) sfv = std::max(sfv, std::abs(sf[i][k] - flux[i][k]));
    }
    return any;
  };

  for (std::size_t i = 0; i < sweep.members.size(); ++i) {
    const SweepMember& m = sweep.members[i];
    for (int s_I : ell_I_steps) {
      FourFifthsRow row;
      row.nu = m.nu;
      row.ell_I = s_I * dx;
      row.ell_nu = m.resolved_scale;
      if (!window_sup(i, m.resolved_scale, s_I, dissipation[i], row.balance, row.sf))
        throw Error("empty inertial window: resolved scale exceeds the outer scale");
      r.rows.push_back(row);
    }
  }

  // nu -> 0 proxy: the dissipation is extrapolated, the flux is taken at the smallest nu.
  std::vector<double> nus, mags;
  for (std::size_t i = 0; i < sweep.members.size(); ++i) {
    nus.push_back(sweep.members[i].nu);
    mags.push_back(std::abs(dissipation[i]));
  }
  const std::size_t last = sweep.members.size() - 1;
  const ScalingFit dfit = positive_fit(nus, mags);
  const bool decays = dfit.points >= 3 && dfit.exponent > 0.0;
  const bool negligible = mags[last] <= 1e-10 * r.scale;
  r.limit_dissipation = (decays || negligible) ? 0.0 : dissipation[last];

  const SweepMember& fine = sweep.members[last];
  const PeriodicGrid& gf = fine.movie.grid();
  for (int s_I : ell_I_steps) {
    double bal = 0.0, sfv = 0.0;
    window_sup(last, fine.resolved_scale, s_I, r.limit_dissipation, bal, sfv);
    r.limit_balance.push_back(bal);
    r.limit_sf.push_back(sfv);
    const SpaceTimeField E = sweep.law == BalanceLaw::burgers
                                 ? burgers_terms(fine.movie, s_I * dx).E
                                 : decomposition_terms(fine.movie, nullptr, s_I * dx, fine.nu).E;
    double b = 0.0;
    for (int t = 0; t < gf.nt; ++t)
      b += time_weight(gf, t) * std::abs(eta.value(gf.time(t))) * E.frame(t).abs().sum() * gf.cell_volume();
    r.bound.push_back(b);
  }
  const double floor = 1e-10 * r.scale;
  r.vanishes = true;
  for (std::size_t k = 0; k < r.ell_I.size(); ++k)
    if (r.limit_balance[k] > floor || r.limit_sf[k] > floor) r.vanishes = false;
  r.bound_fit = positive_fit(r.ell_I, r.bound);
  if (r.vanishes) {
    r.rate = r.bound_fit.points >= 3 ? r.bound_fit.exponent : std::numeric_limits<double>::infinity();
  } else {
    r.balance_fit = positive_fit(r.ell_I, r.limit_balance);
    r.rate = r.balance_fit.exponent;
    if (with_sf) {
      r.sf_fit = positive_fit(r.ell_I, r.limit_sf);
      r.rate = std::min(r.rate, r.sf_fit.exponent);
    }
  }
  r.pass = r.rate >= r.predicted - 0.1;
  return r;
}

ResolvedScaleReport resolved_scale_check(const SweepRecord& sweep, const TimeBump& eta) {
  if (sweep.members.size() < 3) throw Error("resolved-scale check needs at least 3 viscosities");
  ResolvedScaleReport r;
  r.sigma = sweep.sigma();
  r.base_exponent = resolved_scale_exponent(r.sigma);
  for (const auto& m : sweep.members) {
    const PeriodicGrid space = m.movie.grid().with_frames(1, 1.0);
    const TestFunction phi = windowed_profile("eta", space, eta);
    const double ell = std::min(m.resolved_scale, space.L / 2);
    const auto rows = table(sweep, m, {ell}, {phi});
    ResolvedScaleRow row;
    row.nu = m.nu;
    row.ell_nu = m.resolved_scale;
    row.coarse = rows[0].coarse_loss;
    row.total = rows[0].total;
    r.rows.push_back(row);
  }
  const double c0 = std::abs(r.rows.front().coarse), t0 = std::abs(r.rows.front().total);
  for (auto& row : r.rows) {
    row.coarse_ratio = c0 > 0.0 ? std::abs(row.coarse) / c0 : 0.0;
    row.total_ratio = t0 > 0.0 ? std::abs(row.total) / t0 : 0.0;
  }
  r.hypothesis = r.rows.back().coarse_ratio <= 0.1;
  r.pass = true;
  for (const auto& row : r.rows)
    if (row.coarse_ratio <= 0.1 && row.total_ratio > 1.1 * row.coarse_ratio) r.pass = false;
  return r;
}

UniformBesovReport uniform_viscous_besov(const SweepRecord& sweep, const std::vector<TestFunction>& phis,
                                         const std::vector<double>& deltas, double p,
                                         double time_ratio) {
  if (sweep.members.empty()) throw Error("empty sweep");
  UniformBesovReport r;
  r.sigma = sweep.sigma();
  r.p = p;
  r.target_difference = 2.0 * r.sigma;
  r.target_mollified = 2.0 * r.sigma - 2.0;
  r.pass_targets = true;
  for (const auto& m : sweep.members) {
    MollifiedPairingRates rates = dr_mollification_rates(m.movie, nullptr, m.nu, phis, deltas, r.sigma,
                                                         time_ratio, 4, sweep.law, PairingTarget::total);
    r.nus.push_back(m.nu);
    r.difference_exponents.push_back(rates.difference_exponent);
    r.mollified_exponents.push_back(rates.mollified_exponent);
    if (rates.trivial) {
      r.trivial = true;
    } else if (rates.difference_exponent < r.target_difference - 0.15 ||
               rates.mollified_exponent < r.target_mollified - 0.15) {
      r.pass_targets = false;
    }
    r.rates.push_back(std::move(rates));
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  r.spread = r.trivial ? 0.0 : std::max(spread(r.difference_exponents), spread(r.mollified_exponents));
  r.pass_uniform = r.spread <= 0.2;
  return r;
}

}  // namespace disslab
