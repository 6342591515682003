#pragma once

#include <string>
#include <vector>

#include "disslab/duchon_robert.hpp"
#include "disslab/field.hpp"
#include "disslab/fit.hpp"
#include "disslab/test_function.hpp"

namespace disslab {

// One member of a viscosity sweep.
struct SweepMember {
  double nu = 0.0;
  SpaceTimeField movie;
  std::string source;              // movie path or generator tag
  double total_dissipation = 0.0;  // int int nu |grad u|^2 dx dt (trapezoid in time)
  std::vector<double> pairings;    // <D + loss, phi> for the sweep's test functions
  double sigma = 0.0;              // L^3 Besov fit, per slice
  bool sigma_saturated = false;
  double resolved_scale = 0.0;     // nu^(1/(4 sigma) + 0.05), sigma capped at 1
};

struct SweepRecord {
  BalanceLaw law = BalanceLaw::incompressible;
  std::vector<SweepMember> members;  // nu strictly decreasing
  std::vector<std::string> phi_ids;
  // Regularity used by every prediction: the fit at the smallest viscosity, capped at 1.
  double sigma() const;
};

// Sorts nothing: members must arrive with strictly decreasing nu on one spatial grid.
SweepRecord build_sweep(BalanceLaw law, std::vector<double> nus, std::vector<SpaceTimeField> movies,
                        const std::vector<TestFunction>& phis,
                        std::vector<std::string> sources = {});

// Closed-form exponents.
double modulus_exponent(double sigma);             // min(2 sigma / (1 - sigma), 1)
double quasi_singularity_exponent(double sigma);   // (3 sigma - 1) / (1 + sigma)
double resolved_scale_exponent(double sigma);      // 1 / (4 sigma)
double four_fifths_scale_exponent(double sigma);   // 1 / (2 (1 - sigma))
double resolved_scale(double nu, double sigma);    // nu^(1/(4 sigma) + 0.05)

struct ModulusReport {
  std::vector<double> lags;
  std::vector<double> values;  // sup_t |e(t + lag) - e(t)|
  std::vector<double> energy;  // e(t) per frame
  ScalingFit fit;
  double predicted = 0.0;
  bool degenerate = false;     // energy constant to round-off
  bool pass = false;
};
// e(t) = 1/2 int |u|^2 dx. Lags are dyadic frame counts up to nt/4. Needs nt >= 64.
ModulusReport kinetic_energy_modulus(const SpaceTimeField& u, double sigma);

struct QuasiSingularityReport {
  std::vector<double> nus;
  std::vector<double> values;  // |<D + loss, phi>|
  ScalingFit fit;
  double sigma = 0.0;
  double predicted = 0.0;
  bool pass = false;
};
// phi_index selects one of the sweep's test functions. Needs 3 viscosities.
QuasiSingularityReport quasi_singularity_fit(const SweepRecord& sweep, int phi_index);

struct FourFifthsRow {
  double nu = 0.0;
  double ell_I = 0.0;
  double ell_nu = 0.0;
  double balance = 0.0;  // sup over the window of |<D + loss + C^l, eta>|
  double sf = 0.0;       // sup over the window of |<S_par(l)/l - C^l, eta>|
};
struct FourFifthsReport {
  std::vector<FourFifthsRow> rows;
  std::vector<double> ell_I;
  double limit_dissipation = 0.0;  // power-law extrapolation of <D + loss, eta> to nu = 0
  std::vector<double> limit_balance, limit_sf;  // vanishing-viscosity proxies per ell_I
  std::vector<double> bound;       // int |E^{ell_I}| |eta| at the smallest viscosity
  ScalingFit balance_fit, sf_fit, bound_fit;
  double scale = 0.0;              // floor reference: largest weak-term magnitude
  bool vanishes = false;           // both proxies below 1e-10 * scale at every ell_I
  double rate = 0.0;
  double predicted = 0.0;          // 2 sigma
  bool pass = false;
};
// ell_I is given in grid steps (powers of two, at most n/4). Window scales are the dyadic
// steps l with ell_nu <= l dx <= ell_I dx. eta is a time window with a constant profile.
FourFifthsReport four_fifths_residual(const SweepRecord& sweep, const std::vector<int>& ell_I_steps,
                                      const TimeBump& eta, int directions = 16);

struct ResolvedScaleRow {
  double nu = 0.0;
  double ell_nu = 0.0;
  double coarse = 0.0;  // nu int |grad u_{ell_nu}|^2 eta
  double total = 0.0;   // <D + loss, eta>
  double coarse_ratio = 0.0;  // relative to the largest viscosity
  double total_ratio = 0.0;
};
struct ResolvedScaleReport {
  std::vector<ResolvedScaleRow> rows;
  double sigma = 0.0;
  double base_exponent = 0.0;
  bool hypothesis = false;  // coarse ratio at the smallest viscosity <= 0.1
  bool pass = false;        // total ratio <= 1.1 coarse ratio whenever the hypothesis holds
};
ResolvedScaleReport resolved_scale_check(const SweepRecord& sweep, const TimeBump& eta);

struct UniformBesovReport {
  std::vector<double> nus;
  std::vector<MollifiedPairingRates> rates;
  std::vector<double> difference_exponents, mollified_exponents;
  double sigma = 0.0;
  double p = 3.0;
  double target_difference = 0.0;  // 2 sigma
  double target_mollified = 0.0;   // 2 sigma - 2
  double spread = 0.0;             // max over both exponent families of (max - min)
  bool trivial = false;
  bool pass_targets = false;
  bool pass_uniform = false;
};
UniformBesovReport uniform_viscous_besov(const SweepRecord& sweep, const std::vector<TestFunction>& phis,
                                         const std::vector<double>& deltas, double p,
                                         double time_ratio = 1.0);

}  // namespace disslab
