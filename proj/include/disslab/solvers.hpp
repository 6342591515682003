#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "disslab/field.hpp"

namespace disslab {

struct SolverConfig {
  double nu = 1e-3;     // viscosity (Burgers, Navier-Stokes)
  double kappa = 0.0;   // diffusivity (advection)
  double T = 1.0;
  double cfl = 0.5;
  bool dealias = true;  // 2/3 rule
  int stride = 10;      // output interval in units of the initial CFL step
  int frames = 0;       // > 0 overrides stride: number of output intervals over [0, T]
  double forcing_kmin = 0.0;
  double forcing_kmax = 0.0;
  double forcing_amplitude = 0.0;
  std::uint64_t seed = 0;
};

// Key-value text: one "key = value" per line, '#' comments. Keys: nu, kappa, T, cfl,
// dealias, stride, frames, forcing_shell ("kmin,kmax"), forcing_amplitude, seed.
SolverConfig parse_solver_config(const std::string& text);
SolverConfig read_solver_config(const std::string& path);

struct SolverDiagnostics {
  std::vector<double> energy;      // per output frame
  std::vector<double> dissipated;  // cumulative diffusive loss at each frame
  std::vector<double> injected;    // cumulative forcing input at each frame
  double budget_residual = 0.0;    // max_t |E(t) - E(0) + lost - injected| / E(0) / max(t, 1)
  long steps = 0;
};

struct SolverRun {
  SpaceTimeField movie;
  SolverDiagnostics diagnostics;
};

// d = 1 viscous Burgers u_t + (u^2/2)_x = nu u_xx (+ forcing).
SolverRun solve_burgers(const SpaceTimeField& u0, const SolverConfig& config);

// d = 2 Navier-Stokes in vorticity form. Returns the velocity movie.
SolverRun solve_ns2d(const SpaceTimeField& omega0, const SolverConfig& config);

// Passive scalar theta_t + div(theta v) = kappa Delta theta with a divergence-free v given
// either as a single frame (steady) or as a movie covering [0, T] (linear in time between frames).
SolverRun solve_advection(const SpaceTimeField& theta0, const SpaceTimeField& velocity,
                          const SolverConfig& config);

// Vorticity of a 2D velocity frame: dv/dx - du/dy.
SpaceTimeField vorticity(const SpaceTimeField& velocity);

}  // namespace disslab
