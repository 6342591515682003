#pragma once

#include <string>
#include <vector>

#include "disslab/field.hpp"
#include "disslab/fit.hpp"
#include "disslab/mollify.hpp"
#include "disslab/spectral.hpp"
#include "disslab/test_function.hpp"

namespace disslab {

// Energy balances handled by the pairing code: incompressible flows (e = |u|^2/2, flux
// (e + q) u) and one-dimensional Burgers (e = u^2/2, flux u^3/3, no pressure).
enum class BalanceLaw { incompressible, burgers };

// Zero-mean q with -Lap q = div div(u (x) u), products dealiased. Rejects velocity frames
// whose divergence exceeds 1e-8 relative to the gradient.
Eigen::ArrayXd pressure_frame(const SpectralOps& ops, const Eigen::Ref<const Eigen::ArrayXXd>& u);
SpaceTimeField solve_pressure(const SpaceTimeField& u);

// Coarse-graining decomposition of an incompressible velocity movie at scale ell.
// With w = u - u_l:  E = |w|^2/2,  Q = (E + q - q_l) w,  R = u_l (x) u_l - (u (x) u)_l
// (upper triangle),  C = w . div R + (w (x) w) : grad u_l,  gradsq = |grad u_l|^2,
// cross = grad u : grad u_l.
struct DecompositionTerms {
  double ell = 0.0;
  SpaceTimeField E, Q, R, C, gradsq, cross;
};
DecompositionTerms decomposition_terms(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                       double ell, double nu, int power = 4);

// One row of a pairing table. lhs = -<D, phi>; rhs is the weak form of the decomposition at
// scale ell. total = <D + loss, phi> where loss is the pointwise diffusive dissipation
// (nu |grad u|^2 for flows). coarse_loss uses the mollified field instead.
struct PairingRow {
  std::string phi_id;
  double delta = 0.0;
  double ell = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double guard = 0.0;
  double flux = 0.0;         // int C phi
  double loss = 0.0;         // int loss phi
  double coarse_loss = 0.0;  // same with the mollified field
  double total = 0.0;        // <D, phi> + loss
};

// Weak dissipation pairings for a list of test functions:
// <D, phi> = int e (phi_t + nu Lap phi) + (e + q) u . grad phi - nu int |grad u|^2 phi.
struct DissipationPairing {
  double dissipation = 0.0;  // <D, phi>
  double loss = 0.0;         // nu int |grad u|^2 phi
  double total = 0.0;        // <D, phi> + loss
  double magnitude = 0.0;    // sum of int |integrand| over the weak terms
};
std::vector<DissipationPairing> dr_pairings(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                            double nu, const std::vector<TestFunction>& phis,
                                            BalanceLaw law = BalanceLaw::incompressible);
double dr_pairing(const SpaceTimeField& u, const SpaceTimeField* pressure, double nu,
                  const TestFunction& phi);

// Identity table for every (phi, ell). Residual = |lhs - rhs| / (|lhs| + |rhs| + guard) with
// guard = max(max(|Q|_1, |C|_1) |phi|_inf, sum of int |integrand| over all weak terms).
std::vector<PairingRow> identity_table(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                       double nu, const std::vector<double>& ells,
                                       const std::vector<TestFunction>& phis, int power = 4);
double identity_residual(const SpaceTimeField& u, const SpaceTimeField* pressure, double nu,
                         double ell, const TestFunction& phi);

// Mollified dissipation D * rho_delta on the grid (frames trimmed by the mollifier reach).
// Built from the balance: -dt(rho * e) + nu Lap(rho * e) - div(rho * F) - rho * loss, where
// e, F are density and flux of the energy balance. Without the loss term the sample is the
// total dissipation D + loss. Needs a time radius spanning at least two frames.
struct DissipationSample {
  double delta = 0.0;
  double delta_t = 0.0;
  int first_frame = 0;
  SpaceTimeField field;
  std::vector<std::pair<std::string, double>> pairings;
};
DissipationSample dissipation_sample(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                     double nu, double delta, double delta_t, BalanceLaw law,
                                     bool include_loss = true, int power = 4);

// |<D - D*rho_delta, phi>| and |<D*rho_delta, phi>| against delta for each test function,
// evaluated as <D, phi - phi*rho> and <D, phi*rho>. Time radius is time_ratio * delta.
// With target = total the measure paired is D + loss instead of D.
enum class PairingTarget { dissipation, total };
struct MollifiedPairingRates {
  std::vector<double> deltas;
  std::vector<std::vector<double>> difference;  // [phi][delta]
  std::vector<std::vector<double>> mollified;
  std::vector<ScalingFit> difference_fits, mollified_fits;
  double difference_exponent = 0.0;  // mean over test functions
  double mollified_exponent = 0.0;
  double sigma = 0.0;
  double predicted_difference = 0.0;  // 2 sigma / (1 - sigma)
  double predicted_mollified = 0.0;   // 2 sigma / (1 - sigma) - 1
  bool pass_difference = false;
  bool pass_mollified = false;
  bool trivial = false;
};
MollifiedPairingRates dr_mollification_rates(const SpaceTimeField& u, const SpaceTimeField* pressure,
                                             double nu, const std::vector<TestFunction>& phis,
                                             const std::vector<double>& deltas, double sigma,
                                             double time_ratio = 1.0, int power = 4,
                                             BalanceLaw law = BalanceLaw::incompressible,
                                             PairingTarget target = PairingTarget::dissipation);

double onsager_rate(double sigma);  // 2 sigma / (1 - sigma)

}  // namespace disslab
