#include <cmath>
#include <numeric>

#include "disslab/lp_besov.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;

namespace {

SpaceTimeField mode_field(int n, int j) {
  const auto g = make_grid(1, n);
  SpaceTimeField f(g, 1);
  for (int i = 0; i < n; ++i) f.component(0, 0)(i) = std::sin(std::ldexp(1.0, j) * i * g.dx());
  return f;
}

SpaceTimeField random_field(const PeriodicGrid& g, Draw& draw) {
  SpaceTimeField f(g, 1);
  for (Eigen::Index i = 0; i < f.samples().size(); ++i) f.samples()(i) = draw.uniform(-1.0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("cutoff") {
  CHECK(lp_cutoff(0.0) == 1.0);
  CHECK(lp_cutoff(1.0) == 1.0);
  CHECK(lp_cutoff(2.0) == 0.0);
  CHECK(lp_cutoff(5.0) == 0.0);
  for (double r = 1.0; r < 2.0; r += 0.05) CHECK(lp_cutoff(r + 0.05) <= lp_cutoff(r));
}

TEST_CASE("partition of unity and supports") {
  for (int n : {16, 64, 256, 1024}) {
    const auto fam = build_dyadic_family(make_grid(1, n));
    int K = -1;
    for (int m = n / 2; m > 1; m /= 2) ++K;
    CHECK(fam.bands() == K);
    Eigen::ArrayXd sum = fam.multiplier(0);
    for (int k = 1; k <= fam.bands(); ++k) sum += fam.multiplier(k);
    CHECK((sum - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(fam.multiplier(0)(0) == 1.0);
    const Eigen::ArrayXd& r = fam.radius();
    for (int k = 1; k < fam.bands(); ++k) {
      const Eigen::ArrayXd m = fam.multiplier(k);
      CHECK((m >= 0.0).all());
      CHECK((m <= 1.0).all());
      for (Eigen::Index i = 0; i < r.size(); ++i)
        if (r(i) <= std::ldexp(1.0, k - 1) || r(i) >= std::ldexp(1.0, k + 1)) CHECK(m(i) == 0.0);
      for (int j = k + 2; j < fam.bands(); ++j) CHECK((m * fam.multiplier(j)).abs().maxCoeff() == 0.0);
    }
  }
  CHECK_THROWS_AS(build_dyadic_family(make_grid(1, 8)), Error);
  const auto st = build_space_time_family(make_grid(2, 16, kTwoPi, 16, 0.1));
  Eigen::ArrayXd sum = st.multiplier(0);
  for (int k = 1; k <= st.bands(); ++k) sum += st.multiplier(k);
  CHECK((sum - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("band projections") {
  SUBCASE("single mode lives in neighbouring bands") {
    const auto f = mode_field(256, 4);
    const auto fam = build_dyadic_family(f.grid());
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(256);
    for (int k = 0; k <= fam.bands(); ++k) {
      const auto b = band_project(f, fam, k);
      if (std::abs(k - 4) >= 2) CHECK(b.samples().abs().maxCoeff() < 1e-13);
      sum += b.samples();
    }
    CHECK((sum - f.samples()).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("constants only reach the low-pass") {
    SynthParams p;
    p.value = 3.0;
    const auto f = synth_field(make_grid(2, 32), SynthKind::constant, p);
    const auto fam = build_dyadic_family(f.grid());
    for (int k = 1; k <= fam.bands(); ++k) CHECK(band_project(f, fam, k).samples().abs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS(band_project(f, fam, fam.bands() + 1), Error);
  }
  SUBCASE("random fields are reconstructed from their bands") {
    for_all(6, 31, [](Draw& g) {
      const auto grid = make_grid(g.integer(1, 3), g.pick({16, 32}), kTwoPi, g.integer(1, 3), 0.1);
      const auto f = random_field(grid, g);
      const auto fam = build_dyadic_family(grid);
      Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(f.samples().size());
      for (int k = 0; k <= fam.bands(); ++k) sum += band_project(f, fam, k).samples();
      CHECK((sum - f.samples()).matrix().norm() / f.samples().matrix().norm() < 1e-12);
    });
  }
}

TEST_CASE("Besov norms") {
  SUBCASE("constant") {
    SynthParams p;
    p.value = -2.5;
    const auto f = synth_field(make_grid(1, 64), SynthKind::constant, p);
    const auto fam = build_dyadic_family(f.grid());
    for (double alpha : {-1.0, 0.0, 0.7})
      for (double q : {1.0, 2.0, 3.0})
        CHECK(besov_norm(f, alpha, q, fam).norm == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("single sine") {
    const auto f = mode_field(256, 4);
    const auto e = besov_norm(f, 0.0, 2.0, build_dyadic_family(f.grid()));
    CHECK(e.lowpass < 1e-13);
    CHECK(e.norm >= 0.5 / std::sqrt(2.0));
    CHECK(e.norm <= 1.0 / std::sqrt(2.0) + 1e-12);
  }
  SUBCASE("weighted bands of a sigma = 1/2 field are flat") {
    SynthParams p;
    p.seed = 3;
    p.sigma = 0.5;
    const auto f = synth_field(make_grid(1, 4096), SynthKind::random_phase_besov, p);
    const auto fam = build_dyadic_family(f.grid());
    const auto e = besov_norm(f, 0.5, 2.0, fam);
    std::vector<double> w;
    for (int k = 2; k < fam.bands(); ++k) w.push_back(std::pow(2.0, 0.5 * k) * e.band_norms[k - 1]);
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
    for (double v : w) CHECK(std::abs(v / mean - 1.0) < 0.2);
  }
  SUBCASE("norm is non-decreasing in alpha") {
    for_all(20, 32, [](Draw& g) {
      SynthParams p;
      p.seed = g.seed();
      p.sigma = g.uniform(0.1, 0.9);
      const auto f = synth_field(make_grid(1, 256), SynthKind::random_phase_besov, p);
      const auto fam = build_dyadic_family(f.grid());
      const double a = g.uniform(-1.0, 1.0), b = a + g.uniform(0.0, 1.0), q = g.uniform(1.0, 4.0);
      CHECK(besov_norm(f, a, q, fam).norm <= besov_norm(f, b, q, fam).norm + 1e-12);
    });
  }
}

TEST_CASE("Besov exponent recovery") {
  for (double sigma : {0.2, 1.0 / 3.0, 0.5, 0.7}) {
    CAPTURE(sigma);
    SynthParams p;
    p.seed = 11;
    p.sigma = sigma;
    for (SynthKind kind : {SynthKind::random_phase_besov, SynthKind::weierstrass}) {
      const auto f = synth_field(make_grid(1, 2048), kind, p);
      const auto fit = fit_besov_exponent(f, 2.0, build_dyadic_family(f.grid()));
      CHECK(std::abs(fit.fit.exponent - sigma) < 0.05);
      CHECK(fit.fit.r2 > 0.98);
      CHECK_FALSE(fit.saturated);
    }
  }
  const auto tg = testing::taylor_green_2d(64);
  const auto smooth = fit_besov_exponent(tg, 2.0, build_dyadic_family(tg.grid()), {1, 0});
  CHECK(smooth.saturated);
  CHECK(smooth.fit.exponent >= 1.0);
  SpaceTimeField zero(make_grid(1, 64), 1);
  CHECK_THROWS_AS(fit_besov_exponent(zero, 2.0, build_dyadic_family(zero.grid())), Error);
  CHECK_THROWS_AS(fit_besov_exponent(tg, 2.0, build_dyadic_family(tg.grid()), {2, 3}), Error);
}
