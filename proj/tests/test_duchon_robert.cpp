#include <algorithm>
#include <cmath>

#include "disslab/duchon_robert.hpp"
#include "disslab/solvers.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;

namespace {

SpaceTimeField smooth_flow(int n, double nu = 1e-2) {
  SynthParams p;
  p.seed = 8;
  p.sigma = 2.0;
  p.kmax = 4;
  p.rms = 1.0;
  SolverConfig c;
  c.nu = nu;
  c.T = 0.5;
  c.frames = n / 2;
  return solve_ns2d(synth_field(make_grid(2, n), SynthKind::random_phase_besov, p), c).movie;
}

// Same frame repeated: a steady movie.
SpaceTimeField steady(const SpaceTimeField& frame, int nt, double dt) {
  const auto g = frame.grid().with_frames(nt, dt);
  SpaceTimeField out(g, frame.components());
  for (int t = 0; t < nt; ++t) out.frame(t) = frame.frame(0);
  return out;
}

std::vector<TestFunction> phis_for(const PeriodicGrid& g, int count, std::uint64_t seed) {
  std::vector<TestFunction> out;
  const auto space = g.with_frames(1, g.dt);
  for (int i = 0; i < count; ++i) out.push_back(random_test_function(space, 0.1 * g.duration(), 0.9 * g.duration(), seed + i));
  return out;
}

// u(x - s t dx e_0) + U e_0 with U = s dx / dt: the Galilean boost by an integer number of cells per frame.
SpaceTimeField boost(const SpaceTimeField& u, int s) {
  const auto& g = u.grid();
  SpaceTimeField out(g, u.components());
  const double U = s * g.dx() / g.dt;
  const Eigen::Index stride = g.points() / g.n;
  for (int t = 0; t < g.nt; ++t)
    for (int c = 0; c < u.components(); ++c)
      for (Eigen::Index i = 0; i < g.points(); ++i) {
        const Eigen::Index x0 = i / stride, rest = i % stride;
        const Eigen::Index src = ((x0 - static_cast<Eigen::Index>(s) * t) % g.n + g.n) % g.n * stride + rest;
        out.component(t, c)(i) = u.component(t, c)(src) + (c == 0 ? U : 0.0);
      }
  return out;
}

double shifted_gap(const SpaceTimeField& a, const SpaceTimeField& b, int s) {
  // a evaluated on the boosted frame against b, both without the constant velocity.
  const auto& g = a.grid();
  const Eigen::Index stride = g.points() / g.n;
  double gap = 0.0;
  for (int t = 0; t < g.nt; ++t)
    for (int c = 0; c < a.components(); ++c)
      for (Eigen::Index i = 0; i < g.points(); ++i) {
        const Eigen::Index x0 = i / stride, rest = i % stride;
        const Eigen::Index src = ((x0 - static_cast<Eigen::Index>(s) * t) % g.n + g.n) % g.n * stride + rest;
        gap = std::max(gap, std::abs(b.component(t, c)(i) - a.component(t, c)(src)));
      }
  return gap;
}

}  // namespace

TEST_CASE("pressure") {
  SUBCASE("constant flow") {
    SpaceTimeField u(make_grid(2, 32), 2);
    u.samples().setConstant(0.7);
    CHECK(solve_pressure(u).samples().abs().maxCoeff() < 1e-14);
  }
  SUBCASE("Taylor-Green") {
    const auto tg = testing::taylor_green_2d(32);
    const auto q = solve_pressure(tg);
    const auto& g = tg.grid();
    double err = 0.0;
    for (Eigen::Index i = 0; i < g.points(); ++i) {
      const auto c = unravel(i, 2, 32);
      const double x = c[0] * g.dx(), y = c[1] * g.dx();
      err = std::max(err, std::abs(q.component(0, 0)(i) - (std::cos(2 * x) + std::cos(2 * y)) / 4));
    }
    CHECK(err < 1e-10);
  }
  SUBCASE("single-mode shear") {
    const auto g = make_grid(2, 32);
    SpaceTimeField u(g, 2);
    for (Eigen::Index i = 0; i < g.points(); ++i) u.component(0, 0)(i) = std::sin(unravel(i, 2, 32)[1] * g.dx());
    CHECK(solve_pressure(u).samples().abs().maxCoeff() < 1e-12);
  }
  SUBCASE("compressible input is rejected") {
    const auto g = make_grid(2, 32);
    SpaceTimeField u(g, 2);
    for (Eigen::Index i = 0; i < g.points(); ++i) u.component(0, 0)(i) = std::sin(unravel(i, 2, 32)[0] * g.dx());
    CHECK_THROWS_AS(solve_pressure(u), Error);
  }
}

TEST_CASE("decomposition terms") {
  SUBCASE("constant flow has no terms") {
    SpaceTimeField u(make_grid(2, 32, kTwoPi, 3, 0.1), 2);
    u.samples().setConstant(1.3);
    const auto d = decomposition_terms(u, nullptr, 4 * u.grid().dx(), 1e-3);
    for (const SpaceTimeField* f : {&d.E, &d.Q, &d.R, &d.C, &d.gradsq, &d.cross})
      CHECK(f->samples().abs().maxCoeff() < 1e-12);
  }
  SUBCASE("shear flows carry no flux") {
    SynthParams p;
    p.sigma = 1.0 / 3.0;
    p.seed = 2;
    const auto w = synth_field(make_grid(1, 128), SynthKind::weierstrass, p);
    const auto g = make_grid(2, 128);
    SpaceTimeField u(g, 2);
    for (Eigen::Index i = 0; i < g.points(); ++i) u.component(0, 0)(i) = w.samples()(unravel(i, 2, 128)[1]);
    const auto d = decomposition_terms(u, nullptr, 8 * g.dx(), 0.0);
    CHECK(d.C.samples().abs().maxCoeff() < 1e-10);
    CHECK(d.E.samples().abs().maxCoeff() > 1e-3);
  }
  SUBCASE("smooth flux decays at second order") {
    const auto tg = testing::taylor_green_2d(128);
    const auto u = steady(tg, 1, 1.0);
    // Non-stationary smooth field: TG plus a second mode.
    SpaceTimeField v = u;
    const auto& g = v.grid();
    for (Eigen::Index i = 0; i < g.points(); ++i) {
      const auto c = unravel(i, 2, 128);
      const double x = c[0] * g.dx(), y = c[1] * g.dx();
      v.component(0, 0)(i) += 0.5 * std::sin(2 * y);
      v.component(0, 1)(i) += 0.5 * std::sin(3 * x);
    }
    std::vector<double> ells, c1;
    for (int s : {2, 4, 8, 16}) {
      ells.push_back(s * g.dx());
      c1.push_back(decomposition_terms(v, nullptr, ells.back(), 0.0).C.samples().abs().mean());
    }
    CHECK(fit_power_law(ells, c1).exponent >= 1.9);
  }
  SUBCASE("rough flux obeys the 3 sigma - 1 bound") {
    SynthParams p;
    p.sigma = 1.0 / 3.0;
    p.seed = 1;
    p.rms = 1.0;
    const auto u = synth_field(make_grid(2, 128), SynthKind::solenoidal_besov, p);
    std::vector<double> ells, c1;
    for (int s : {2, 4, 8, 16}) {
      ells.push_back(s * u.grid().dx());
      c1.push_back(decomposition_terms(u, nullptr, ells.back(), 0.0).C.samples().abs().mean());
    }
    CHECK(fit_power_law(ells, c1).exponent >= 3 * p.sigma - 1 - 0.1);
  }
  SUBCASE("Galilean invariance of w, E, R and C") {
    SynthParams p;
    p.sigma = 0.5;
    p.seed = 6;
    p.drift = 1.0;
    const auto u = synth_field(make_grid(2, 32, kTwoPi, 4, 0.1), SynthKind::solenoidal_besov, p);
    const int s = 2;  // whole cells on the 3/2 grid as well
    const auto v = boost(u, s);
    const double ell = 5 * u.grid().dx();
    const auto a = decomposition_terms(u, nullptr, ell, 1e-3), b = decomposition_terms(v, nullptr, ell, 1e-3);
    CHECK(shifted_gap(a.E, b.E, s) < 1e-12);
    CHECK(shifted_gap(a.R, b.R, s) < 1e-12);
    CHECK(shifted_gap(a.C, b.C, s) < 1e-11);
    CHECK(shifted_gap(a.gradsq, b.gradsq, s) < 1e-11);
    SpaceTimeField wu = u, wv = v;
    const Mollifier m(u.grid(), ell);
    wu.samples() -= mollify_space(u, m).samples();
    wv.samples() -= mollify_space(v, m).samples();
    CHECK(shifted_gap(wu, wv, s) < 1e-12);
  }
}

TEST_CASE("dissipation pairings") {
  SUBCASE("stationary Euler flow") {
    const auto u = steady(testing::taylor_green_2d(32), 128, 0.01);
    const auto q = solve_pressure(u);
    for (const auto& phi : phis_for(u.grid(), 3, 10)) CHECK(std::abs(dr_pairing(u, &q, 0.0, phi)) < 1e-6);
  }
  SUBCASE("decaying Taylor-Green") {
    const double nu = 0.05;
    const auto tg = testing::taylor_green_2d(32);
    SolverConfig c;
    c.nu = nu;
    c.T = 1.0;
    c.frames = 128;
    const auto u = solve_ns2d(vorticity(tg), c).movie;
    for (const auto& phi : phis_for(u.grid(), 3, 20)) CHECK(std::abs(dr_pairing(u, nullptr, nu, phi)) < 1e-6);
  }
  SUBCASE("zero field") {
    SpaceTimeField u(make_grid(2, 16, kTwoPi, 8, 0.1), 2);
    for (const auto& phi : phis_for(u.grid(), 2, 30)) CHECK(dr_pairing(u, nullptr, 1e-3, phi) == 0.0);
  }
}

TEST_CASE("identity residuals") {
  SUBCASE("smooth flow, refinement") {
    const auto coarse = smooth_flow(32), fine = smooth_flow(64);
    const auto pc = phis_for(coarse.grid(), 4, 40), pf = phis_for(fine.grid(), 4, 40);
    double worst_coarse = 0.0, worst_fine = 0.0, lo = 1e300, hi = 0.0;
    for (double ell : {0.4, 0.8}) {
      for (const auto& r : identity_table(coarse, nullptr, 1e-2, {ell}, pc)) worst_coarse = std::max(worst_coarse, r.residual);
      for (const auto& r : identity_table(fine, nullptr, 1e-2, {ell}, pf)) {
        worst_fine = std::max(worst_fine, r.residual);
        lo = std::min(lo, r.residual);
        hi = std::max(hi, r.residual);
      }
    }
    CHECK(worst_fine < 1e-6);
    CHECK(worst_coarse > 2 * worst_fine);
    CHECK(hi < 10 * std::max(lo, 1e-15) * 1e3);  // same order across scales
  }
  SUBCASE("constant flow balances exactly") {
    SpaceTimeField u(make_grid(2, 16, kTwoPi, 128, 0.01), 2);
    u.samples().setConstant(0.4);
    for (const auto& r : identity_table(u, nullptr, 1e-3, {4 * u.grid().dx()}, phis_for(u.grid(), 2, 50))) {
      CHECK(std::abs(r.lhs) < 1e-7);
      CHECK(std::abs(r.rhs) < 1e-7);
      CHECK(std::abs(r.flux) < 1e-14);
    }
  }
}

TEST_CASE("mollified dissipation rates") {
  auto rates = [](double sigma) {
    const auto g = make_grid(2, 128, kTwoPi, 32, 1.0 / 31);
    SynthParams p;
    p.sigma = sigma;
    p.seed = 1;
    p.drift = 1.0;
    p.rms = 1.0;
    const auto u = synth_field(g, SynthKind::solenoidal_besov, p);
    std::vector<double> deltas;
    for (int s : {2, 3, 4, 6, 8}) deltas.push_back(s * g.dx());
    return dr_mollification_rates(u, nullptr, 0.0, phis_for(g, 3, 60), deltas, sigma, 0.2);
  };
  SUBCASE("critical regularity") {
    const auto r = rates(1.0 / 3.0);
    CHECK(r.predicted_difference == doctest::Approx(1.0));
    CHECK(r.difference_exponent >= 0.85);
    CHECK(r.mollified_exponent >= -0.15);
    CHECK_FALSE(r.trivial);
  }
  SUBCASE("sigma = 1/4") {
    const auto r = rates(0.25);
    CHECK(r.predicted_difference == doctest::Approx(2.0 / 3.0));
    CHECK(r.difference_exponent >= 0.52);
  }
  SUBCASE("stationary smooth flow is trivial") {
    const auto u = steady(testing::taylor_green_2d(32), 128, 0.01);
    const auto q = solve_pressure(u);
    std::vector<double> deltas;
    for (int s : {2, 3, 4, 6}) deltas.push_back(s * u.grid().dx());
    CHECK(dr_mollification_rates(u, &q, 0.0, phis_for(u.grid(), 2, 70), deltas, 1.0, 0.05).trivial);
  }
}
