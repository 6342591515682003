#include <cmath>

#include "disslab/lp_besov.hpp"
#include "disslab/structure_fn.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;
using disslab::testing::scalar_field;

namespace {

std::vector<int> dyadic_steps(int lo, int hi) {
  std::vector<int> out;
  for (int s = lo; s <= hi; s *= 2) out.push_back(s);
  return out;
}

SpaceTimeField random_field(int d, int n, double sigma, std::uint64_t seed) {
  SynthParams p;
  p.sigma = sigma;
  p.seed = seed;
  return synth_field(make_grid(d, n), SynthKind::random_phase_besov, p);
}

// u(x) -> -u(-x) for a 2D velocity frame.
SpaceTimeField mirrored(const SpaceTimeField& u) {
  const auto& g = u.grid();
  SpaceTimeField out(g, u.components());
  for (Eigen::Index i = 0; i < g.points(); ++i) {
    const auto c = unravel(i, g.d, g.n);
    const Eigen::Index j = ((g.n - c[0]) % g.n) * g.n + (g.n - c[1]) % g.n;
    for (int k = 0; k < u.components(); ++k) out.component(0, k)(i) = -u.component(0, k)(j);
  }
  return out;
}

// Quarter turn of a 2D scalar: f(x, y) -> f(y, -x).
SpaceTimeField rotated(const SpaceTimeField& f) {
  const auto& g = f.grid();
  SpaceTimeField out(g, 1);
  for (Eigen::Index i = 0; i < g.points(); ++i) {
    const auto c = unravel(i, g.d, g.n);
    out.component(0, 0)(i) = f.component(0, 0)(static_cast<Eigen::Index>(c[1]) * g.n + (g.n - c[0]) % g.n);
  }
  return out;
}

}  // namespace

TEST_CASE("absolute structure functions") {
  SUBCASE("constant field") {
    SpaceTimeField u(make_grid(2, 32), 1);
    u.samples().setConstant(3.0);
    for (const auto& c : absolute_sf(u, {2, 3}, {1, 2, 4, 8}))
      for (double v : c.values) CHECK(v < 1e-28);
  }
  SUBCASE("sine is smooth") {
    const auto u = scalar_field(make_grid(1, 1024), [](double x, double) { return std::sin(x); });
    const auto curves = absolute_sf(u, {2, 3}, dyadic_steps(1, 16));
    CHECK(std::abs(fit_zeta(curves[0]).zeta - 2.0) < 0.02);
    CHECK(std::abs(fit_zeta(curves[1]).zeta - 3.0) < 0.05);
  }
  SUBCASE("sawtooth is shock dominated") {
    SynthParams p;
    p.shocks = 4;
    const auto u = synth_field(make_grid(1, 4096), SynthKind::sawtooth, p);
    const auto curves = absolute_sf(u, {2, 4}, dyadic_steps(1, 64));
    for (const auto& c : curves) CHECK(std::abs(fit_zeta(c).zeta - 1.0) < 0.1);
  }
  SUBCASE("random phase field matches its spectrum") {
    const auto u = random_field(1, 4096, 1.0 / 3.0, 5);
    const auto z = fit_zeta(absolute_sf(u, {2}, dyadic_steps(1, 64))[0]);
    CHECK(std::abs(z.zeta - 2.0 / 3.0) < 0.1);
    const auto besov = fit_besov_exponent(u, 2.0, build_dyadic_family(u.grid()));
    CHECK(std::abs(z.sigma - besov.fit.exponent) < 0.1);
  }
  SUBCASE("zeta_p / p does not increase with p") {
    for_all(4, 21, [&](Draw& draw) {
      const auto u = random_field(1, 2048, draw.uniform(0.2, 0.8), draw.seed());
      const auto curves = absolute_sf(u, {2, 3, 4, 6}, dyadic_steps(1, 64));
      double prev = 1e9;
      for (const auto& c : curves) {
        const double s = fit_zeta(c).sigma;
        CHECK(s <= prev + 0.1);
        prev = s;
      }
    });
  }
  SUBCASE("quarter turns leave 2D values unchanged") {
    const auto f = random_field(2, 64, 0.5, 9);
    const auto a = absolute_sf(f, {2, 3}, {1, 2, 4, 8}, 16), b = absolute_sf(rotated(f), {2, 3}, {1, 2, 4, 8}, 16);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t k = 0; k < a[i].values.size(); ++k)
        CHECK(std::abs(a[i].values[k] - b[i].values[k]) < 1e-12 * a[i].values[k]);
  }
  SUBCASE("degenerate input") {
    SpaceTimeField zero(make_grid(1, 256), 1);
    CHECK_THROWS_AS(fit_zeta(absolute_sf(zero, {2}, {1, 2, 4, 8})[0]), Error);
    CHECK_THROWS_AS(absolute_sf(zero, {2}, {1, 128}), Error);
    CHECK_THROWS_AS(absolute_sf(zero, {2}, {4, 2}), Error);
    CHECK_THROWS_AS(absolute_sf(random_field(2, 32, 0.5, 1), {2}, {1, 2}, 4), Error);
  }
}

TEST_CASE("longitudinal structure function") {
  CHECK(longitudinal_prefactor(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(longitudinal_prefactor(3) == 1.25);

  SUBCASE("constant velocity") {
    SpaceTimeField u(make_grid(2, 32), 2);
    u.samples().setConstant(0.3);
    for (double v : longitudinal_sf(u, {1, 2, 4}).values) CHECK(std::abs(v) < 1e-28);
  }
  SUBCASE("mirror symmetry") {
    for_all(3, 22, [&](Draw& draw) {
      SynthParams p;
      p.seed = draw.seed();
      p.sigma = draw.uniform(0.2, 0.7);
      const auto u = synth_field(make_grid(2, 64), SynthKind::solenoidal_besov, p);
      const auto a = longitudinal_sf(u, {1, 2, 4, 8}), b = longitudinal_sf(mirrored(u), {1, 2, 4, 8});
      for (std::size_t k = 0; k < a.values.size(); ++k) {
        CAPTURE(k);
        CHECK(std::abs(a.values[k] - b.values[k]) < 1e-12);
      }
    });
  }
  SUBCASE("scalar input is rejected") {
    CHECK_THROWS_AS(longitudinal_sf(random_field(2, 32, 0.5, 1), {1, 2}), Error);
  }
}
