#include <cmath>

#include "disslab/fractal.hpp"
#include "support.hpp"

using namespace disslab;
using disslab::testing::Draw;
using disslab::testing::for_all;

namespace {

const double kCantor = std::log(2.0) / std::log(3.0);

bool in_cantor(int i, int levels) {
  for (int k = 0; k < levels; ++k, i /= 3)
    if (i % 3 == 1) return false;
  return true;
}

SpaceTimeMask mask_of(const Lattice& l, const std::function<bool(int x, int t)>& inside) {
  SpaceTimeMask m{l, std::vector<std::uint8_t>(static_cast<std::size_t>(l.size()), 0)};
  for (int t = 0; t < l.nt; ++t)
    for (int x = 0; x < l.n; ++x) m.cells[static_cast<std::size_t>(t) * l.n + x] = inside(x, t) ? 1 : 0;
  return m;
}

SpaceTimeMeasure measure_of(const SpaceTimeMask& mask) {
  SpaceTimeMeasure m;
  m.lattice = mask.lattice;
  m.mass = Eigen::ArrayXd::Zero(mask.lattice.size());
  for (std::size_t i = 0; i < mask.cells.size(); ++i) m.mass(static_cast<Eigen::Index>(i)) = mask.cells[i];
  return m;
}

// A shock path x = n/2 + t / 2 cells in a 1D movie with n frames.
SpaceTimeMask shock_path(int n) {
  return mask_of(Lattice{1, n, n, 1.0 / n, 1.0 / n}, [n](int x, int t) { return x == (n / 2 + t / 2) % n; });
}

std::vector<int> dyadic(int lo, int hi) {
  std::vector<int> out;
  for (int b = lo; b <= hi; b *= 2) out.push_back(b);
  return out;
}

}  // namespace

TEST_CASE("box counting") {
  SUBCASE("Cantor set") {
    const int n = 6561;  // 3^8
    const auto m = mask_of(Lattice{1, n, 1, 1.0 / n, 1.0}, [](int x, int) { return in_cantor(x, 8); });
    const auto est = box_count_dimension(m, {3, 9, 27, 81, 243});
    CHECK(std::abs(est.dimension - kCantor) < 0.05);
  }
  SUBCASE("full space-time mask") {
    const auto m = mask_of(Lattice{1, 256, 256, 1.0 / 256, 1.0 / 256}, [](int, int) { return true; });
    CHECK(std::abs(box_count_dimension(m, dyadic(1, 32)).dimension - 2.0) < 0.05);
  }
  SUBCASE("shock path") {
    CHECK(std::abs(box_count_dimension(shock_path(1024), dyadic(4, 128)).dimension - 1.0) < 0.1);
  }
  SUBCASE("Cantor set times an interval") {
    const int n = 729;
    const auto m = mask_of(Lattice{1, n, n, 1.0 / n, 1.0 / n}, [](int x, int) { return in_cantor(x, 6); });
    CHECK(std::abs(box_count_dimension(m, {1, 3, 9, 27, 81}).dimension - (1.0 + kCantor)) < 0.1);
  }
  SUBCASE("inclusion keeps the order") {
    // Coarser Cantor stages over longer time spans contain finer stages over shorter ones.
    for_all(6, 31, [&](Draw& draw) {
      const int n = 243;
      const int fine = draw.integer(1, 5), coarse = draw.integer(0, fine);
      const int t0 = draw.integer(0, 100), t1 = draw.integer(t0 + 27, n - 1);
      const int s0 = draw.integer(0, t0), s1 = draw.integer(t1, n - 1);
      const Lattice l{1, n, n, 1.0 / n, 1.0 / n};
      const auto small = mask_of(l, [&](int x, int t) { return in_cantor(x, fine) && t >= t0 && t <= t1; });
      const auto big = mask_of(l, [&](int x, int t) { return in_cantor(x, coarse) && t >= s0 && t <= s1; });
      const std::vector<int> boxes{1, 3, 9, 27};
      CHECK(box_count_dimension(small, boxes).dimension <= box_count_dimension(big, boxes).dimension + 0.05);
    });
  }
  SUBCASE("errors") {
    const auto empty = mask_of(Lattice{1, 64, 1, 1.0 / 64, 1.0}, [](int, int) { return false; });
    CHECK_THROWS_AS(box_count_dimension(empty, {1, 2, 4, 8}), Error);
    const auto full = mask_of(Lattice{1, 64, 1, 1.0 / 64, 1.0}, [](int, int) { return true; });
    CHECK_THROWS_AS(box_count_dimension(full, {1, 2, 4}), Error);
    CHECK_THROWS_AS(box_count_dimension(full, {1, 4, 2, 8}), Error);
  }
}

TEST_CASE("concentration set") {
  SpaceTimeMeasure m;
  m.lattice = Lattice{1, 8, 1, 1.0 / 8, 1.0};
  m.mass = Eigen::ArrayXd::Zero(8);
  m.mass << 0.5, 0.3, 0.1, 0.05, 0.05, 0.0, 0.0, 0.0;
  const auto s = concentration_set(m, 0.85);
  CHECK(s.mask.count() == 3);
  CHECK(s.retained >= 0.85);
  CHECK(concentration_set(m, 0.99).mask.count() == 5);
}

TEST_CASE("covering sums") {
  SUBCASE("uniform measure at full dimension") {
    const auto m = measure_of(mask_of(Lattice{1, 256, 256, 1.0 / 256, 1.0 / 256}, [](int, int) { return true; }));
    const auto c = covering_mass_estimate(m, 2.0, dyadic(2, 32));
    for (double s : c.sums) CHECK(std::abs(s - 1.0) < 0.2);
  }
  SUBCASE("shock path") {
    const auto m = measure_of(shock_path(1024));
    const auto length = covering_mass_estimate(m, 1.0, dyadic(4, 64));
    for (std::size_t k = 1; k < length.sums.size(); ++k)
      CHECK(std::abs(length.sums[k] / length.sums[k - 1] - 1.0) < 0.2);
    const auto half = covering_mass_estimate(m, 0.5, dyadic(4, 64));
    for (std::size_t k = 1; k < half.sums.size(); ++k) {
      const double growth = half.sums[k - 1] / half.sums[k];
      CHECK(growth > 1.3);
      CHECK(growth < 1.6);
    }
  }
}

TEST_CASE("density exponents") {
  CHECK(density_exponent_prediction(1.0 / 3.0, 3.0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(density_exponent_prediction(1.0 / 3.0, INFINITY, 3) - 4.0) < 1e-12);

  SUBCASE("uniform measure") {
    const auto m = measure_of(mask_of(Lattice{1, 256, 256, 1.0 / 256, 1.0 / 256}, [](int, int) { return true; }));
    const auto r = density_exponent_fit(m, 8, {4, 8, 16, 32}, 1.0 / 256, 1.0 / 3.0, 3.0);
    for (const auto& f : r.fits) CHECK(std::abs(f.exponent - 2.0) < 0.05);
    CHECK(r.pass);
  }
  SUBCASE("Cantor set times an interval") {
    const int n = 729;
    const auto m = measure_of(mask_of(Lattice{1, n, n, 1.0 / n, 1.0 / n}, [](int x, int) { return in_cantor(x, 6); }));
    const auto r = density_exponent_fit(m, 6, {4, 13, 40, 121}, 1.0 / n, 1.0 / 3.0, 3.0);
    double mean = 0.0;
    for (const auto& f : r.fits) mean += f.exponent / static_cast<double>(r.fits.size());
    CHECK(std::abs(mean - (1.0 + kCantor)) < 0.1);
  }
  SUBCASE("shock path beats the bounded-density prediction") {
    const auto m = measure_of(shock_path(512));
    const auto r = density_exponent_fit(m, 8, {4, 8, 16, 32, 64}, 1.0 / 512, 1.0 / 3.0, 3.0);
    CHECK(std::abs(r.min_exponent - 1.0) < 0.1);
    CHECK(r.pass);
  }
  SUBCASE("radii below the mollifier floor are rejected") {
    const auto m = measure_of(shock_path(64));
    CHECK_THROWS_AS(density_exponent_fit(m, 4, {1, 2, 3}, 1.0 / 8, 1.0 / 3.0, 3.0), Error);
  }
}
