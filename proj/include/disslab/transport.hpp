#pragma once

#include <vector>

#include "disslab/duchon_robert.hpp"
#include "disslab/field.hpp"
#include "disslab/test_function.hpp"

namespace disslab {

// Scalar theta carried by a divergence-free velocity v (a movie with the same frames, or a
// single steady frame). With w = theta - theta_l and v' = v - v_l:
// E = w^2/2,  Q = E v',  R = theta_l v_l - (theta v)_l,  C = w (v' . grad theta_l + div R).
struct TransportTerms {
  double ell = 0.0;
  SpaceTimeField E, Q, R, C;
};
TransportTerms transport_terms(const SpaceTimeField& theta, const SpaceTimeField& velocity,
                               double ell, int power = 4);

// <D, phi> = int theta^2/2 (phi_t + kappa Lap phi) + theta^2/2 v . grad phi
//            - kappa int |grad theta|^2 phi.
std::vector<DissipationPairing> scalar_dissipation_pairings(const SpaceTimeField& theta,
                                                            const SpaceTimeField& velocity,
                                                            double kappa,
                                                            const std::vector<TestFunction>& phis);

// rhs = int [-E (phi_t + kappa Lap phi) - E v_l . grad phi - Q . grad phi + C phi
//            + kappa |grad(theta_l - theta)|^2 phi], compared with lhs = -<D, phi>.
std::vector<PairingRow> transport_identity_table(const SpaceTimeField& theta,
                                                 const SpaceTimeField& velocity, double kappa,
                                                 const std::vector<double>& ells,
                                                 const std::vector<TestFunction>& phis,
                                                 int power = 4);
double transport_identity_residual(const SpaceTimeField& theta, const SpaceTimeField& velocity,
                                   double kappa, double ell, const TestFunction& phi);

// One-dimensional Burgers, flux u^2/2. With w = u - u_l:
// E = w^2/2,  Q = w^3/3,  R = u_l^2 - (u^2)_l,  C = w (R_x + w (u_l)_x) / 2, and
// dt E + (u_l E + Q)_x + C - nu E_xx + nu w_x^2 = -D.
struct BurgersTerms {
  double ell = 0.0;
  SpaceTimeField E, Q, R, C;
};
BurgersTerms burgers_terms(const SpaceTimeField& u, double ell, int power = 4);

// rhs = int [-E (phi_t + nu phi_xx) - (u_l E + Q) phi_x + C phi + nu w_x^2 phi],
// lhs = -<D, phi> with
// <D, phi> = int u^2/2 (phi_t + nu phi_xx) + u^3/3 phi_x - nu int u_x^2 phi.
std::vector<PairingRow> burgers_identity_table(const SpaceTimeField& u, double nu,
                                               const std::vector<double>& ells,
                                               const std::vector<TestFunction>& phis,
                                               int power = 4);
double burgers_identity_residual(const SpaceTimeField& u, double nu, double ell,
                                 const TestFunction& phi);

}  // namespace disslab
