#include <cmath>

#include "disslab/inviscid_limits.hpp"
#include "disslab/solvers.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;

namespace {

struct TaylorGreenSweep {
  std::vector<TestFunction> phis;
  SweepRecord sweep;
};

// Decaying Taylor-Green at n = 64 over [0, 1] with 64 frames.
const TaylorGreenSweep& tg_sweep() {
  static const TaylorGreenSweep s = [] {
    const auto g = make_grid(2, 64);
    const auto w0 = vorticity(testing::taylor_green_2d(64));
    const std::vector<double> nus{1e-2, 1e-3, 1e-4};
    std::vector<SpaceTimeField> movies;
    for (double nu : nus) {
      SolverConfig c;
      c.nu = nu;
      c.T = 1.0;
      c.frames = 64;
      movies.push_back(solve_ns2d(w0, c).movie);
    }
    TaylorGreenSweep out;
    for (std::uint64_t i = 0; i < 2; ++i) out.phis.push_back(random_test_function(g, 0.2, 0.8, i + 1));
    out.sweep = build_sweep(BalanceLaw::incompressible, nus, movies, out.phis);
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("closed-form exponents") {
  CHECK(modulus_exponent(1.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(modulus_exponent(0.8) == 1.0);
  CHECK(modulus_exponent(0.2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(quasi_singularity_exponent(1.0 / 3.0)) < 1e-15);
  CHECK(quasi_singularity_exponent(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(resolved_scale_exponent(1.0 / 3.0) - 0.75) < 1e-12);
  CHECK(std::abs(four_fifths_scale_exponent(1.0 / 3.0) - 0.75) < 1e-12);
  CHECK(resolved_scale(1e-4, 0.5) == doctest::Approx(std::pow(1e-4, 0.55)).epsilon(1e-12));
  CHECK_THROWS_AS(resolved_scale(1e-3, 0.0), Error);

  SUBCASE("quasi-singularity exponent increases with regularity") {
    for_all(20, 41, [](Draw& draw) {
      const double a = draw.uniform(0.05, 0.95), b = draw.uniform(0.05, 0.95);
      if (a < b) CHECK(quasi_singularity_exponent(a) < quasi_singularity_exponent(b));
      CHECK(modulus_exponent(a) <= 1.0);
    });
  }
}

TEST_CASE("sweep construction") {
  const auto g = make_grid(2, 64, kTwoPi, 8, 0.1);
  SpaceTimeField zero(g, 2);
  const std::vector<TestFunction> phis{random_test_function(g.with_frames(1, 0.1), 0.2, 0.5, 1)};
  CHECK_THROWS_AS(build_sweep(BalanceLaw::incompressible, {1e-3, 1e-2}, {zero, zero}, phis), Error);
  CHECK_THROWS_AS(build_sweep(BalanceLaw::incompressible, {1e-3}, {zero, zero}, phis), Error);
  CHECK_THROWS_AS(build_sweep(BalanceLaw::incompressible, {0.0}, {zero}, phis), Error);
  SpaceTimeField other(make_grid(2, 128, kTwoPi, 8, 0.1), 2);
  CHECK_THROWS_AS(build_sweep(BalanceLaw::incompressible, {1e-2, 1e-3}, {zero, other}, phis), Error);
  CHECK_THROWS_AS(build_sweep(BalanceLaw::incompressible, {1e-2, 1e-3}, {zero, zero}, phis), Error);
  SpaceTimeField tg(g, 2);
  for (int t = 0; t < g.nt; ++t) tg.frame(t) = testing::taylor_green_2d(64).frame(0);
  const auto s = build_sweep(BalanceLaw::incompressible, {1e-2, 1e-3}, {tg, tg}, phis);
  CHECK(s.members.size() == 2);
  CHECK(s.members[1].pairings.size() == 1);
  CHECK_THROWS_AS(quasi_singularity_fit(s, 0), Error);
}

TEST_CASE("decaying Taylor-Green sweep") {
  const auto& tg = tg_sweep();
  const auto& sweep = tg.sweep;
  const TimeBump eta{0.5, 0.45};

  SUBCASE("smooth members saturate the regularity fit") {
    CHECK(sweep.sigma() == 1.0);
    for (const auto& m : sweep.members) CHECK(m.total_dissipation > 0.0);
  }
  SUBCASE("energy is Lipschitz in time") {
    const auto r = kinetic_energy_modulus(sweep.members.front().movie, sweep.sigma());
    CHECK(r.fit.exponent > 0.95);
    CHECK(r.pass);
  }
  SUBCASE("dissipation scales linearly in the viscosity") {
    for (int i = 0; i < 2; ++i) {
      const auto q = quasi_singularity_fit(sweep, i);
      CHECK(std::abs(q.fit.exponent - 1.0) < 0.05);
      CHECK(q.pass);
    }
    CHECK_THROWS_AS(quasi_singularity_fit(sweep, 2), Error);
  }
  SUBCASE("four-fifths residuals vanish") {
    const auto r = four_fifths_residual(sweep, {16, 8, 4}, eta);
    CHECK(r.vanishes);
    CHECK(r.pass);
    CHECK(r.rows.size() == 9);
    CHECK_THROWS_AS(four_fifths_residual(sweep, {3}, eta), Error);
    CHECK_THROWS_AS(four_fifths_residual(sweep, {32}, eta), Error);
  }
  SUBCASE("resolved scales carry the dissipation") {
    const auto r = resolved_scale_check(sweep, eta);
    CHECK(r.hypothesis);
    CHECK(r.pass);
  }
  SUBCASE("mollification rates do not depend on the viscosity") {
    const double dx = sweep.members.front().movie.grid().dx();
    const auto r = uniform_viscous_besov(sweep, tg.phis, {2 * dx, 3 * dx, 4 * dx, 6 * dx}, 3.0, 0.1);
    CHECK(r.spread <= 0.2);
    CHECK(r.pass_uniform);
    CHECK(r.pass_targets);
  }
}
