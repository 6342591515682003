#include "disslab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "disslab/field.hpp"

namespace disslab {

namespace {

constexpr double kTie = 1e-12;

double tail(double p) { return std::isinf(p) ? 1.0 : (p - 3.0) / p; }

void check_p(double p) {
  if (!(p >= 3.0)) throw Error("p must lie in [3, inf]");
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw Error("sigma must lie in (0, 1)");
}

void check_gamma(double gamma, int d) {
  if (d < 1 || d > 3) throw Error("dimension must be 1, 2 or 3");
  if (!(gamma >= 0.0 && gamma <= d + 1)) throw Error("gamma must lie in [0, d + 1]");
}

Verdict upper_verdict(double margin) {
  if (std::abs(margin) <= kTie) return Verdict::boundary;
  return margin > 0.0 ? Verdict::consistent : Verdict::violation;
}

}  // namespace

double zeta_star(double p, double kappa) {
  if (!(p >= 3.0) || std::isinf(p)) throw Error("zeta* needs p in [3, inf)");
  if (!(kappa >= 0.0 && kappa <= 3.0)) throw Error("codimension must lie in [0, 3]");
  const double den = 9.0 * p - 3.0 * kappa * (p - 3.0);
  if (!(den > 0.0)) throw Error("zeta* denominator is not positive for these parameters");
  return p / 3.0 - 2.0 * kappa * (p - 3.0) * p / den;
}

double zeta_star_slope(double p, double kappa) {
  zeta_star(p, kappa);
  const double f = (p - 3.0) * p, df = 2.0 * p - 3.0;
  const double g = 9.0 * p - 3.0 * kappa * (p - 3.0), dg = 9.0 - 3.0 * kappa;
  return 1.0 / 3.0 - 2.0 * kappa * (df * g - f * dg) / (g * g);
}

std::vector<std::pair<double, double>> zeta_star_curve(double p_lo, double p_hi, int points,
                                                       double kappa) {
  if (points < 2 || !(p_hi > p_lo)) throw Error("curve needs p_lo < p_hi and at least 2 points");
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < points; ++i) {
    const double p = i == points - 1 ? p_hi : p_lo + (p_hi - p_lo) * i / (points - 1);
    out.emplace_back(p, zeta_star(p, kappa));
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::boundary: return "boundary";
    case Verdict::violation: return "violation";
  }
  return "unknown";
}

Inequality gamma_condition(double sigma, double p, double gamma, int d) {
  check_sigma(sigma);
  check_p(p);
  check_gamma(gamma, d);
  Inequality q;
  q.lhs = 2.0 * sigma / (1.0 - sigma);
  q.rhs = 1.0 - tail(p) * (d + 1 - gamma);
  q.margin = q.lhs - q.rhs;
  q.holds = q.margin > kTie;
  return q;
}

std::pair<double, double> dissipation_besov_exponent(double sigma, double p) {
  check_sigma(sigma);
  check_p(p);
  return {2.0 * sigma / (1.0 - sigma) - 1.0, p / 3.0};
}

ObukhovCorrsin obukhov_corrsin_bound(double sigma, double beta, double s, double p, double gamma,
                                     int d) {
  check_sigma(sigma);
  check_gamma(gamma, d);
  if (!(p > 0.0 && s > 0.0)) throw Error("integrability exponents must be positive");
  ObukhovCorrsin r;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p, inv_s = std::isinf(s) ? 0.0 : 1.0 / s;
  r.integrability_ok = inv_p + 2.0 * inv_s <= 1.0 + kTie;
  const double lhs = 2.0 * beta / (1.0 - sigma);
  // (p(s - 2) - s) / (ps) = 1 - 2/s - 1/p
  const double factor = 1.0 - 2.0 * inv_s - inv_p;
  r.refined = Inequality{lhs, 1.0 - factor * (d + 1 - gamma), 0.0, false};
  r.refined.margin = r.refined.rhs - lhs;
  r.refined.holds = r.refined.margin >= -kTie;
  r.classical = Inequality{lhs, 1.0, 1.0 - lhs, 1.0 - lhs >= -kTie};
  r.refined_verdict = upper_verdict(r.refined.margin);
  r.classical_verdict = upper_verdict(r.classical.margin);
  return r;
}

ConsistencyReport consistency_report(const ExponentTable& table, int curve_points) {
  if (table.entries.empty()) throw Error("empty exponent table");
  check_gamma(table.gamma, table.d);
  std::vector<ExponentEntry> entries = table.entries;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ExponentEntry& a, const ExponentEntry& b) { return a.p < b.p; });
  ConsistencyReport r;
  r.kappa = table.d + 1 - table.gamma;
  bool any_boundary = false, any_violation = false;
  for (const auto& e : entries) {
    check_p(e.p);
    if (std::isinf(e.p)) throw Error("exponent tables need finite p");
    ConsistencyEntry c;
    c.p = e.p;
    c.zeta = e.zeta;
    c.sigma = e.zeta / e.p;
    c.condition = gamma_condition(c.sigma, e.p, table.gamma, table.d);
    if (r.kappa <= 3.0) c.zeta_star = zeta_star(e.p, r.kappa);
    const double dlhs = 2.0 / ((1.0 - c.sigma) * (1.0 - c.sigma));
    c.tolerance = std::max(kTie, dlhs * e.zeta_error / e.p);
    if (std::abs(c.condition.margin) <= c.tolerance) {
      c.verdict = Verdict::boundary;
      any_boundary = true;
    } else if (c.condition.margin > 0.0) {
      c.verdict = Verdict::violation;
      any_violation = true;
    }
    r.entries.push_back(c);
  }
  r.overall = any_violation ? Verdict::violation : any_boundary ? Verdict::boundary : Verdict::consistent;
  const double lo = r.entries.front().p, hi = r.entries.back().p;
  if (r.kappa <= 3.0 && hi > lo) r.curve = zeta_star_curve(lo, hi, curve_points, r.kappa);
  return r;
}

}  // namespace disslab
