#pragma once

#include <string>
#include <utility>
#include <vector>

namespace disslab {

// p = infinity is accepted wherever p appears and handled through (p - 3)/p -> 1.

// zeta*_p = p/3 - 2 kappa (p - 3) p / (9p - 3 kappa (p - 3)), kappa = d + 1 - gamma.
// Needs p in [3, inf) and kappa in [0, 3].
double zeta_star(double p, double kappa);
// d zeta* / dp; equals (3 - 2 kappa) / 9 at p = 3.
double zeta_star_slope(double p, double kappa);
// Samples (p, zeta*) on `points` uniformly spaced p in [p_lo, p_hi].
std::vector<std::pair<double, double>> zeta_star_curve(double p_lo, double p_hi, int points,
                                                       double kappa);

enum class Verdict { consistent, boundary, violation };
std::string to_string(Verdict v);

struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs for gamma_condition, rhs - lhs for upper bounds
  bool holds = false;
};

// 2 sigma / (1 - sigma) > 1 - (p - 3)/p (d + 1 - gamma). holds iff margin > 1e-12.
Inequality gamma_condition(double sigma, double p, double gamma, int d);

// (2 sigma / (1 - sigma) - 1, p / 3).
std::pair<double, double> dissipation_besov_exponent(double sigma, double p);

struct ObukhovCorrsin {
  Inequality refined;    // 2 beta / (1 - sigma) <= 1 - (p(s - 2) - s)/(ps) (d + 1 - gamma)
  Inequality classical;  // 2 beta / (1 - sigma) <= 1
  Verdict refined_verdict = Verdict::consistent;
  Verdict classical_verdict = Verdict::consistent;
  bool integrability_ok = true;  // 1/p + 2/s <= 1
};
ObukhovCorrsin obukhov_corrsin_bound(double sigma, double beta, double s, double p, double gamma,
                                     int d);

struct ExponentEntry {
  double p = 3.0;
  double zeta = 1.0;
  double r2 = 1.0;
  double zeta_error = 0.0;  // fit standard error of zeta
  std::string source;
};
struct ExponentTable {
  std::vector<ExponentEntry> entries;
  double gamma = 4.0;
  std::string gamma_method = "given";
  int d = 3;
};

struct ConsistencyEntry {
  double p = 0.0;
  double zeta = 0.0;
  double sigma = 0.0;
  double zeta_star = 0.0;
  Inequality condition;  // gamma_condition at (sigma, p, gamma, d)
  double tolerance = 0.0;
  Verdict verdict = Verdict::consistent;
};
struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  Verdict overall = Verdict::consistent;
  double kappa = 0.0;
  std::vector<std::pair<double, double>> curve;  // zeta* over the table's p-range
};
// An entry violates the bound iff gamma_condition holds at sigma_p = zeta_p / p beyond the
// tolerance carried by the fit error; margins inside the tolerance are boundary verdicts.
ConsistencyReport consistency_report(const ExponentTable& table, int curve_points = 31);

}  // namespace disslab
