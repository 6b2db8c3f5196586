#pragma once

// Parameter-region analysis for the (beta, D) family of linearly coupled
// boson field models: admissibility windows, the affine map u, the
// two-branch exponent theta_eps, the map q_eps, the four bound functions
// f4/f3/f11/f12 and the closed-form maximum of their lower envelope.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nibc {

// breakpoints of the piecewise admissibility bound
inline constexpr double kBreakLeft = 0.8284271247461900976;   // 2(sqrt(2)-1)
inline constexpr double kBreakRight = 1.2360679774997896964;  // sqrt(5)-1

struct ModelParameters {
  double alpha = 0.5;  // form factor exponent: |v(k)| <= |k|^-alpha
  double beta = 1.0;   // dispersion exponent: |k|^beta <= omega(k)
  double mass = 0.0;   // dispersion offset m >= 0
  double mu = 1.0;     // default spectral shift, >= 1
  double coupling_lower_c = 1.0;  // constant c in c(1+|k|^alpha)^-1 <= |v|

  double D() const { return 1.0 - 2.0 * alpha; }

  // Throws std::invalid_argument naming the violated rule. The window on
  // D = 1 - 2 alpha is the construction-level one: 0 <= D < beta for
  // beta < 2 and 0 < D < 2 at beta = 2. The sharper region bound is a
  // separate verdict, see classify().
  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.5))
      throw std::invalid_argument("ModelParameters: alpha must lie in [0, 3/2)");
    if (!(beta > 0.0 && beta <= 2.0))
      throw std::invalid_argument("ModelParameters: beta must lie in (0, 2]");
    const double d = D();
    if (beta < 2.0) {
      if (!(d >= 0.0 && d < beta))
        throw std::invalid_argument("ModelParameters: D = 1 - 2 alpha must lie in [0, beta)");
    } else {
      if (!(d > 0.0 && d < 2.0))
        throw std::invalid_argument("ModelParameters: D must lie in (0, 2) at beta = 2");
    }
    if (!(mu >= 1.0)) throw std::invalid_argument("ModelParameters: mu must be >= 1");
    if (!(mass >= 0.0)) throw std::invalid_argument("ModelParameters: mass must be >= 0");
    if (!(coupling_lower_c > 0.0 && coupling_lower_c <= 1.0))
      throw std::invalid_argument("ModelParameters: coupling_lower_c must lie in (0, 1]");
  }
};

struct RegionVerdict {
  bool condition1 = false;      // sharp self-adjointness region
  double condition1_bound = 0;  // upper bound on D at this beta
  bool prop_reverse = false;    // D < beta/2 (0 < D < 1 at beta = 2)
  bool general = false;         // D < beta  (0 < D < 2 at beta = 2)
  bool old_condition = false;   // D < 2 beta^2 / (beta^2 + 8)
};

// u(s) = (beta s - D) / 2, affine and increasing in s.
inline double u_map(double s, double beta, double D) { return 0.5 * (beta * s - D); }

inline double u_map(double s, const ModelParameters& p) { return u_map(s, p.beta, p.D()); }

// Two-branch exponent. Requires 0 < eps < eps0 with eps0 = beta - D; at
// beta = 2 the branch test always selects the lower branch under that
// hypothesis, so the 2 - beta denominator is never touched.
inline double theta_eps(double beta, double D, double eps) {
  const double eps0 = beta - D;
  if (!(eps > 0.0 && eps < eps0))
    throw std::invalid_argument("theta_eps: eps must lie in (0, beta - D)");
  const double branch_cut = (3.0 * beta - 2.0) / beta - eps;
  if (D > branch_cut) return (2.0 - D - eps) / (2.0 - beta);
  return std::max(1.0 / beta, 1.0);
}

inline double theta_eps(const ModelParameters& p, double eps) {
  return theta_eps(p.beta, p.D(), eps);
}

// q_eps(eta) = max(0, eta + eps - (beta + 2 - 2D) / (4 beta))
inline double q_map(double eta, double eps, double beta, double D) {
  if (!(eta >= 0.0 && eps >= 0.0))
    throw std::invalid_argument("q_map: eta and eps must be nonnegative");
  return std::max(0.0, eta + eps - (beta + 2.0 - 2.0 * D) / (4.0 * beta));
}

inline double q_map(double eta, double eps, const ModelParameters& p) {
  return q_map(eta, eps, p.beta, p.D());
}

// Piecewise upper bound on D, half-open intervals as printed.
inline double condition1_bound(double beta) {
  if (!(beta > 0.0 && beta <= 2.0))
    throw std::invalid_argument("condition1_bound: beta must lie in (0, 2]");
  if (beta < kBreakLeft) return 0.5 * beta * beta;
  if (beta < kBreakRight) return 2.0 * beta / (beta + 4.0);
  if (beta < 2.0) return (beta * beta - 2.0 * beta + 2.0) / (beta + 1.0);
  return 2.0 / 3.0;
}

struct BoundFunctions {
  double f4;   // beta s - 2          (active as a lower bound on D)
  double f3;   // s beta^2/(beta+2)
  double f11;  // 2 - s (2 - beta)
  double f12;  // (2 - s beta (2-beta)) / (beta+1)
};

inline BoundFunctions bound_functions(double s, double beta) {
  BoundFunctions f;
  f.f4 = beta * s - 2.0;
  f.f3 = s * beta * beta / (beta + 2.0);
  f.f11 = 2.0 - s * (2.0 - beta);
  f.f12 = (2.0 - s * beta * (2.0 - beta)) / (beta + 1.0);
  return f;
}

struct MaxF {
  double value;
  double argmax_s;
};

// Closed-form maximum of F = min(f3, f11, f12) over s in [1, 2/beta).
inline MaxF max_F(double beta) {
  if (!(beta > 0.0 && beta < 2.0))
    throw std::invalid_argument("max_F: beta must lie in (0, 2)");
  if (beta < kBreakLeft) {
    const double s = 0.5 * (beta + 2.0);  // f3 = f11 crossing
    return {0.5 * beta * beta, s};
  }
  if (beta < kBreakRight) {
    const double s = 2.0 * (beta + 2.0) / (beta * (beta + 4.0));  // f3 = f12 crossing
    return {2.0 * beta / (beta + 4.0), s};
  }
  return {(beta * beta - 2.0 * beta + 2.0) / (beta + 1.0), 1.0};
}

// Region classification for a raw pair; strict inequalities, and at
// beta = 2 every verdict additionally requires D > 0.
inline RegionVerdict classify_pair(double beta, double D) {
  RegionVerdict v;
  v.condition1_bound = condition1_bound(beta);
  const bool positive_at_two = (beta < 2.0) || (D > 0.0);
  v.condition1 = (D >= 0.0) && (D < v.condition1_bound) && positive_at_two;
  const double half_bound = (beta < 2.0) ? 0.5 * beta : 1.0;
  v.prop_reverse = (D >= 0.0) && (D < half_bound) && positive_at_two;
  v.general = (D >= 0.0) && (D < beta) && positive_at_two;
  v.old_condition = (D >= 0.0) && (D < 2.0 * beta * beta / (beta * beta + 8.0));
  return v;
}

inline RegionVerdict classify(const ModelParameters& p) {
  p.validate();
  return classify_pair(p.beta, p.D());
}

// One row of the admissible-pairs figure.
struct RegionCurveRow {
  double beta;
  double selected;   // condition1_bound(beta)
  double left;       // beta^2/2
  double mid;        // 2 beta/(beta+4)
  double right;      // (beta^2-2beta+2)/(beta+1)
  double old_bound;  // 2 beta^2/(beta^2+8)
  double half_beta;  // beta/2
};

inline RegionCurveRow region_curve_row(double beta) {
  RegionCurveRow r;
  r.beta = beta;
  r.selected = condition1_bound(beta);
  r.left = 0.5 * beta * beta;
  r.mid = 2.0 * beta / (beta + 4.0);
  r.right = (beta * beta - 2.0 * beta + 2.0) / (beta + 1.0);
  r.old_bound = 2.0 * beta * beta / (beta * beta + 8.0);
  r.half_beta = 0.5 * beta;
  return r;
}

// Sampled table over (0, 2]; the interval breakpoints are always included
// so continuity of the selected bound can be read off the table itself.
inline std::vector<RegionCurveRow> region_curve_table(int beta_samples) {
  if (beta_samples < 2)
    throw std::invalid_argument("region_curve_table: need at least 2 samples");
  std::vector<double> betas;
  betas.reserve(static_cast<std::size_t>(beta_samples) + 2);
  for (int i = 1; i <= beta_samples; ++i)
    betas.push_back(2.0 * static_cast<double>(i) / static_cast<double>(beta_samples));
  betas.push_back(kBreakLeft);
  betas.push_back(kBreakRight);
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  std::vector<RegionCurveRow> rows;
  rows.reserve(betas.size());
  for (double b : betas) rows.push_back(region_curve_row(b));
  return rows;
}

}  // namespace nibc
