#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include <doctest.h>

#include "disslab/field.hpp"
#include "disslab/synth.hpp"

namespace disslab::testing {

// Seeded draws for property checks. Each case gets its own stream so a failure reports the
// case index and can be replayed alone.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t seed() { return rng_(); }
  template <typename T>
  const T& pick(const std::initializer_list<T>& xs) {
    return *(xs.begin() + integer(0, static_cast<int>(xs.size()) - 1));
  }

 private:
  std::mt19937_64 rng_;
};

template <typename Body>
void for_all(int cases, std::uint64_t seed, Body body) {
  for (int c = 0; c < cases; ++c) {
    CAPTURE(c);
    Draw draw(seed * 1000003ULL + static_cast<std::uint64_t>(c));
    body(draw);
  }
}

// Single-frame scalar sampled from f(x, y); y is 0 in one dimension.
inline SpaceTimeField scalar_field(const PeriodicGrid& g, const std::function<double(double, double)>& f) {
  SpaceTimeField out(g, 1);
  for (Eigen::Index i = 0; i < g.points(); ++i) {
    const auto c = unravel(i, g.d, g.n);
    out.component(0, 0)(i) = f(c[0] * g.dx(), g.d > 1 ? c[1] * g.dx() : 0.0);
  }
  return out;
}

inline SpaceTimeField taylor_green_2d(int n) {
  return synth_field(make_grid(2, n), SynthKind::taylor_green);
}

}  // namespace disslab::testing
