#include <algorithm>
#include <cmath>

#include "disslab/solvers.hpp"
#include "disslab/transport.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;
using disslab::testing::scalar_field;

namespace {

std::vector<TestFunction> phis_for(const PeriodicGrid& g, int count, std::uint64_t seed) {
  std::vector<TestFunction> out;
  const auto space = g.with_frames(1, g.dt);
  for (int i = 0; i < count; ++i)
    out.push_back(random_test_function(space, 0.1 * g.duration(), 0.9 * g.duration(), seed + i));
  return out;
}

SpaceTimeField steady(const SpaceTimeField& frame, int nt, double dt) {
  SpaceTimeField out(frame.grid().with_frames(nt, dt), frame.components());
  for (int t = 0; t < nt; ++t) out.frame(t) = frame.frame(0);
  return out;
}

SpaceTimeField advected_sine(int n, double kappa, int frames) {
  const auto v = testing::taylor_green_2d(n);
  const auto theta0 = scalar_field(v.grid(), [](double x, double y) { return std::sin(x) + 0.5 * std::cos(y); });
  SolverConfig c;
  c.kappa = kappa;
  c.T = 0.5;
  c.frames = frames;
  return solve_advection(theta0, v, c).movie;
}

SpaceTimeField smooth_burgers(int n, int frames) {
  const auto g = make_grid(1, n);
  SolverConfig c;
  c.nu = 0.05;
  c.T = 0.5;
  c.frames = frames;
  c.cfl = 0.2;
  return solve_burgers(scalar_field(g, [](double x, double) { return 0.4 * std::sin(x) + 0.1; }), c).movie;
}

double max_abs(const SpaceTimeField& f) { return f.samples().abs().maxCoeff(); }

// Trapezoid integral of a time bump over the frames of g.
double bump_integral(const TimeBump& b, const PeriodicGrid& g) {
  double s = 0.0;
  for (int t = 0; t < g.nt; ++t) s += (t == 0 || t == g.nt - 1 ? 0.5 : 1.0) * b.value(g.time(t));
  return s * g.dt;
}

}  // namespace

TEST_CASE("transport terms") {
  const auto v = steady(testing::taylor_green_2d(32), 4, 0.1);
  const auto& g = v.grid();
  SynthParams sp;
  sp.seed = 3;
  sp.sigma = 0.5;
  const auto theta0 = synth_field(g.with_frames(1, g.dt), SynthKind::random_phase_besov, sp);
  const auto theta = steady(theta0, 4, 0.1);
  const double ell = 4 * g.dx();

  SUBCASE("zero velocity") {
    SpaceTimeField zero(g, 2);
    const auto t = transport_terms(theta, zero, ell);
    CHECK(max_abs(t.R) == 0.0);
    CHECK(max_abs(t.C) == 0.0);
    CHECK(max_abs(t.Q) == 0.0);
    CHECK(max_abs(t.E) > 0.0);
  }
  SUBCASE("constant scalar") {
    SpaceTimeField c(g, 1);
    c.samples().setConstant(2.5);
    const auto t = transport_terms(c, v, ell);
    CHECK(max_abs(t.E) < 1e-24);
    CHECK(max_abs(t.C) < 1e-12);
    CHECK(max_abs(t.R) < 1e-12);
  }
  SUBCASE("scaling the scalar") {
    for_all(4, 11, [&](Draw& draw) {
      const double lam = draw.uniform(-3.0, 3.0);
      SpaceTimeField scaled(theta.grid(), 1);
      scaled.samples() = lam * theta.samples();
      const auto a = transport_terms(theta, v, ell), b = transport_terms(scaled, v, ell);
      const double l2 = lam * lam;
      CHECK(((b.E.samples() - l2 * a.E.samples()).abs().maxCoeff()) < 1e-12 * (1 + max_abs(b.E)));
      CHECK(((b.Q.samples() - l2 * a.Q.samples()).abs().maxCoeff()) < 1e-12 * (1 + max_abs(b.Q)));
      CHECK(((b.R.samples() - lam * a.R.samples()).abs().maxCoeff()) < 1e-12 * (1 + max_abs(b.R)));
      CHECK(((b.C.samples() - l2 * a.C.samples()).abs().maxCoeff()) < 1e-12 * (1 + max_abs(b.C)));
    });
  }
}

TEST_CASE("transport identity") {
  SUBCASE("smooth scalar in a cellular flow") {
    const auto v = testing::taylor_green_2d(32);
    const auto theta = advected_sine(32, 1e-2, 128);
    const auto rows = transport_identity_table(theta, v, 1e-2, {2 * theta.grid().dx(), 4 * theta.grid().dx()},
                                               phis_for(theta.grid(), 4, 20));
    for (const auto& r : rows) CHECK(r.residual < 1e-6);
  }
  SUBCASE("adding a constant to the scalar") {
    const auto v = testing::taylor_green_2d(32);
    const auto theta = advected_sine(32, 1e-2, 256);
    const auto phis = phis_for(theta.grid(), 3, 30);
    for_all(3, 12, [&](Draw& draw) {
      SpaceTimeField shifted(theta.grid(), 1);
      shifted.samples() = theta.samples() + draw.uniform(-5.0, 5.0);
      const double ell = draw.pick({2, 3, 4}) * theta.grid().dx();
      for (const auto& phi : phis)
        CHECK(std::abs(transport_identity_residual(theta, v, 1e-2, ell, phi) -
                       transport_identity_residual(shifted, v, 1e-2, ell, phi)) < 1e-10);
    });
  }
  SUBCASE("constant scalar pairs to zero") {
    const auto v = steady(testing::taylor_green_2d(16), 256, 0.005);
    SpaceTimeField c(v.grid(), 1);
    c.samples().setConstant(1.5);
    const auto pairs = scalar_dissipation_pairings(c, v, 0.0, phis_for(v.grid(), 2, 40));
    for (const auto& p : pairs) CHECK(std::abs(p.dissipation) < 1e-8 * (1 + p.magnitude));
  }
  SUBCASE("diffusive runs dissipate non-negatively") {
    const auto v = testing::taylor_green_2d(32);
    const auto theta = advected_sine(32, 1e-2, 128);
    const auto space = theta.grid().with_frames(1, theta.grid().dt);
    std::vector<TestFunction> phis;
    for (std::uint64_t s = 0; s < 4; ++s)
      phis.push_back(random_test_function(space, 0.1, 0.4, 50 + s));
    for (const auto& p : scalar_dissipation_pairings(theta, v, 1e-2, phis)) {
      CHECK(p.loss > 0.0);
      CHECK(p.total > -1e-6 * p.magnitude);
    }
  }
}

TEST_CASE("Burgers identity") {
  SUBCASE("zero field") {
    SpaceTimeField u(make_grid(1, 64, kTwoPi, 32, 0.05), 1);
    for (const auto& r : burgers_identity_table(u, 0.01, {4 * u.grid().dx()}, phis_for(u.grid(), 2, 60))) {
      CHECK(r.lhs == 0.0);
      CHECK(r.rhs == 0.0);
    }
  }
  SUBCASE("smooth window") {
    const auto u = smooth_burgers(256, 128);
    const auto rows = burgers_identity_table(u, 0.05, {4 * u.grid().dx(), 16 * u.grid().dx()}, phis_for(u.grid(), 4, 70));
    for (const auto& r : rows) CHECK(r.residual < 1e-6);
  }
  SUBCASE("steady shock dissipates 2/3") {
    const double L = 64.0, nu = 0.02;
    const auto frame = scalar_field(make_grid(1, 16384, L), [&](double x, double) {
      const double s = x - L / 2;
      return 2 * s / L - std::tanh(s / (2 * nu));
    });
    const auto u = steady(frame, 16, 0.1);
    const auto space = u.grid().with_frames(1, u.grid().dt);
    const TimeBump bump{0.75, 0.6, 6};
    const auto phi = windowed_profile("one", space, bump);
    const auto pair = dr_pairings(u, nullptr, nu, {phi}, BalanceLaw::burgers).front();
    CHECK(std::abs(pair.loss / bump_integral(bump, u.grid()) - 2.0 / 3.0) < 0.01 * 2.0 / 3.0);
  }
  SUBCASE("shock movie") {
    SolverConfig c;
    c.nu = 1e-3;
    c.T = 2.0;
    c.frames = 256;
    const auto g = make_grid(1, 4096);
    const auto u = solve_burgers(scalar_field(g, [](double x, double) { return std::sin(x); }), c).movie;
    const auto rows = burgers_identity_table(u, 1e-3, {8 * g.dx(), 32 * g.dx()}, phis_for(u.grid(), 3, 80));
    for (const auto& r : rows) CHECK(r.residual < 1e-3);
  }
}
