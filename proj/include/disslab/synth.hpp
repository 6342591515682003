#pragma once

#include <cstdint>
#include <string>

#include "disslab/field.hpp"

namespace disslab {

enum class SynthKind {
  constant,
  fourier_mode,
  taylor_green,
  sawtooth,
  random_phase_besov,
  weierstrass,
  solenoidal_besov,
};

struct SynthParams {
  double value = 0.0;       // constant
  int mode = 1;             // fourier_mode wavenumber
  int axis = 0;             // fourier_mode, sawtooth, weierstrass direction
  double amplitude = 1.0;
  int shocks = 1;           // sawtooth
  double jump = 2.0;        // sawtooth drop across each discontinuity
  double sigma = 1.0 / 3.0; // random families: Besov exponent of the spectrum
  std::uint64_t seed = 0;
  double kmin = 1.0;        // random families: lattice band |m| in [kmin, kmax]
  double kmax = -1.0;       // negative: up to n/2 - 1
  double rms = 0.0;         // > 0: rescale so that the first frame has this RMS
  double drift = 0.0;       // random families: phase speed rate*|m|^(1-sigma) per unit time
};

// Deterministic synthetic fields. Random families draw one phase per lattice wavevector from
// a counter-based splitmix64 stream, so a given seed yields the same band-limited function at
// every resolution that resolves the band.
SpaceTimeField synth_field(const PeriodicGrid& grid, SynthKind kind, const SynthParams& params = {});

SynthKind parse_synth_kind(const std::string& name);
std::string to_string(SynthKind kind);

// splitmix64 finalizer and a uniform draw in [0,1) keyed by (seed, counters).
std::uint64_t splitmix64(std::uint64_t x);
double keyed_uniform(std::uint64_t seed, std::initializer_list<std::int64_t> counters);

}  // namespace disslab
