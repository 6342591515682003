#include <algorithm>
#include <cmath>

#include "disslab/solvers.hpp"
#include "disslab/spectral.hpp"
#include "support.hpp"

using namespace disslab;

namespace {

SpaceTimeField scalar(const PeriodicGrid& g, const std::function<double(double, double)>& f) {
  SpaceTimeField out(g, 1);
  for (Eigen::Index i = 0; i < g.points(); ++i) {
    const auto c = unravel(i, g.d, g.n);
    out.component(0, 0)(i) = f(c[0] * g.dx(), g.d > 1 ? c[1] * g.dx() : 0.0);
  }
  return out;
}

double energy(const SpaceTimeField& u, int t) { return 0.5 * u.frame(t).square().sum() * u.grid().cell_volume(); }

// Burgers from 0.4 sin x + 0.1 at n points; returns the last frame.
Eigen::ArrayXd smooth_burgers(int n) {
  const auto g = make_grid(1, n);
  SolverConfig c;
  c.nu = 0.05;
  c.T = 0.5;
  c.frames = 4;
  c.cfl = 0.2;
  const auto run = solve_burgers(scalar(g, [](double x, double) { return 0.4 * std::sin(x) + 0.1; }), c);
  return run.movie.component(run.movie.frames() - 1, 0);
}

}  // namespace

TEST_CASE("solver config parsing") {
  const auto c = parse_solver_config("# comment\nnu = 1e-4\nT=2\nforcing_shell = 2,4\ndealias = false\nframes = 16\nseed = 9\n");
  CHECK(c.nu == 1e-4);
  CHECK(c.T == 2.0);
  CHECK(c.forcing_kmin == 2.0);
  CHECK(c.forcing_kmax == 4.0);
  CHECK_FALSE(c.dealias);
  CHECK(c.frames == 16);
  CHECK(c.seed == 9);
  CHECK_THROWS_AS(parse_solver_config("viscosity = 1"), Error);
  CHECK_THROWS_AS(parse_solver_config("nu = abc"), Error);
}

TEST_CASE("Burgers") {
  SUBCASE("zero stays zero") {
    SolverConfig c;
    c.T = 0.5;
    c.frames = 4;
    const auto run = solve_burgers(SpaceTimeField(make_grid(1, 64), 1), c);
    CHECK(run.movie.frames() == 5);
    CHECK((run.movie.samples() == 0.0).all());
  }
  SUBCASE("steady viscous shock dissipates [u]^3/12") {
    const double L = 64.0, nu = 0.02;
    const auto g = make_grid(1, 16384, L);
    const auto u0 = scalar(g, [&](double x, double) {
      const double s = x - L / 2;
      return 2 * s / L - std::tanh(s / (2 * nu));
    });
    SolverConfig c;
    c.nu = nu;
    c.T = 0.05;
    c.frames = 5;
    const auto run = solve_burgers(u0, c);
    SpectralOps ops(g);
    for (int t = 0; t < run.movie.frames(); ++t) {
      const Eigen::ArrayXd ux = ops.spatial_derivative(run.movie.component(t, 0), 0);
      CHECK(std::abs(nu * ux.square().sum() * g.dx() - 2.0 / 3.0) < 0.01 * 2.0 / 3.0);
    }
  }
  SUBCASE("sine steepens into a shock whose gradient saturates at order 1/nu") {
    const double nu = 1e-3;
    auto peak = [&](int n) {
      const auto g = make_grid(1, n);
      SolverConfig c;
      c.nu = nu;
      c.T = 2.0;
      c.frames = 8;
      const auto run = solve_burgers(scalar(g, [](double x, double) { return std::sin(x); }), c);
      SpectralOps ops(g);
      std::vector<double> m;
      for (int t = 0; t < run.movie.frames(); ++t)
        m.push_back(ops.spatial_derivative(run.movie.component(t, 0), 0).abs().maxCoeff());
      return m;
    };
    const auto coarse = peak(4096), fine = peak(16384);
    CHECK(coarse[4] > 10 * coarse[0]);  // breaking time is 1
    const double top = *std::max_element(coarse.begin(), coarse.end());
    CHECK(top > 0.1 / nu);
    CHECK(top < 1.0 / nu);
    CHECK(coarse.back() > 0.75 * top);
    for (std::size_t t = 0; t < coarse.size(); ++t) CHECK(std::abs(coarse[t] / fine[t] - 1.0) < 0.1);
  }
  SUBCASE("refinement halves the error on smooth data") {
    const Eigen::ArrayXd ref = smooth_burgers(512);
    auto error = [&](int n) {
      const Eigen::ArrayXd u = smooth_burgers(n);
      double e = 0.0;
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(u(i) - ref(i * (512 / n))));
      return e;
    };
    CHECK(error(32) > 2 * error(64));
  }
}

TEST_CASE("2D Navier-Stokes") {
  SUBCASE("Taylor-Green decays exactly") {
    const double nu = 0.01;
    const auto tg = testing::taylor_green_2d(64);
    SolverConfig c;
    c.nu = nu;
    c.T = 1.0;
    c.frames = 4;
    const auto run = solve_ns2d(vorticity(tg), c);
    const int last = run.movie.frames() - 1;
    const double decay = std::exp(-2 * nu * 1.0);
    CHECK((run.movie.frame(last) - decay * tg.frame(0)).abs().maxCoeff() < 1e-6);
    CHECK(run.diagnostics.budget_residual < 1e-6);
  }
  SUBCASE("zero vorticity gives a zero movie") {
    SolverConfig c;
    c.T = 0.2;
    c.frames = 2;
    const auto run = solve_ns2d(SpaceTimeField(make_grid(2, 32), 1), c);
    CHECK((run.movie.samples() == 0.0).all());
  }
  SUBCASE("unforced energy never increases") {
    SynthParams p;
    p.seed = 5;
    p.sigma = 1.5;
    p.kmax = 8;
    p.rms = 1.0;
    const auto w0 = synth_field(make_grid(2, 256), SynthKind::random_phase_besov, p);
    SolverConfig c;
    c.nu = 1e-3;
    c.T = 1.0;
    c.frames = 16;
    const auto run = solve_ns2d(w0, c);
    for (int t = 1; t < run.movie.frames(); ++t) CHECK(energy(run.movie, t) <= energy(run.movie, t - 1));
    CHECK(run.diagnostics.budget_residual < 1e-6);
  }
}

TEST_CASE("advection-diffusion") {
  const auto g = make_grid(2, 64);
  SUBCASE("pure diffusion of a Fourier mode") {
    const double kappa = 0.1;
    SolverConfig c;
    c.kappa = kappa;
    c.T = 1.0;
    c.frames = 4;
    const auto run = solve_advection(scalar(g, [](double x, double) { return std::cos(x); }), SpaceTimeField(g, 2), c);
    const auto exact = scalar(g, [&](double x, double) { return std::exp(-kappa) * std::cos(x); });
    CHECK((run.movie.component(run.movie.frames() - 1, 0) - exact.component(0, 0)).abs().maxCoeff() < 1e-8);
  }
  SUBCASE("constants are unchanged") {
    SolverConfig c;
    c.kappa = 1e-3;
    c.T = 0.5;
    c.frames = 2;
    const auto run = solve_advection(scalar(g, [](double, double) { return 3.0; }), testing::taylor_green_2d(64), c);
    CHECK((run.movie.samples() - 3.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("scalar variance decays in a cellular flow") {
    SolverConfig c;
    c.kappa = 1e-4;
    c.T = 1.0;
    c.frames = 10;
    const auto run = solve_advection(scalar(g, [](double x, double) { return std::sin(x); }), testing::taylor_green_2d(64), c);
    for (int t = 1; t < run.movie.frames(); ++t) CHECK(energy(run.movie, t) < energy(run.movie, t - 1));
  }
  SUBCASE("velocity must be divergence free") {
    SolverConfig c;
    c.T = 0.1;
    SpaceTimeField v(g, 2);
    v.component(0, 0) = scalar(g, [](double x, double) { return std::sin(x); }).component(0, 0);
    CHECK_THROWS_AS(solve_advection(scalar(g, [](double, double) { return 1.0; }), v, c), Error);
  }
}
