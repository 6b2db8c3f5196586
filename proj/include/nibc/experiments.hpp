#pragma once

// The three headline experiments: renormalized cutoff convergence, the
// ||G_mu|| sweep, and the domain-threshold exponent fits, plus their
// report types and CSV serialization.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nibc/ibc.hpp"
#include "nibc/io.hpp"
#include "nibc/lanczos.hpp"
#include "nibc/model.hpp"
#include "nibc/parallel.hpp"

namespace nibc {

// ---------------------------------------------------------------------------
// renormalized convergence

struct ConvergenceReport {
  std::vector<double> Lambda_values;
  std::vector<double> E_Lambda_values;
  std::vector<double> raw_ground_energies;          // E0(H_Lambda)
  std::vector<double> renormalized_ground_energies; // E0(H_Lambda) + E_Lambda
  std::vector<double> successive_differences;       // of the renormalized column
  std::vector<double> residual_norms;
  bool solver_converged = true;

  void to_csv(const std::string& path) const {
    CsvWriter csv(path, {"Lambda", "E_Lambda", "E0_raw", "E0_renormalized",
                         "successive_difference", "residual"});
    for (std::size_t i = 0; i < Lambda_values.size(); ++i)
      csv.row({Lambda_values[i], E_Lambda_values[i], raw_ground_energies[i],
               renormalized_ground_energies[i],
               i == 0 ? 0.0 : successive_differences[i - 1], residual_norms[i]});
  }
};

inline ConvergenceReport convergence_study(const FockSpace& space,
                                           const std::vector<double>& Lambdas,
                                           double solver_tol = 1e-9,
                                           const QuadratureSpec& spec = {}, int threads = 1,
                                           const LanczosOptions& opts = {}) {
  ConvergenceReport rep;
  const std::size_t n = Lambdas.size();
  rep.Lambda_values = Lambdas;
  rep.E_Lambda_values.resize(n);
  rep.raw_ground_energies.resize(n);
  rep.renormalized_ground_energies.resize(n);
  rep.residual_norms.resize(n);
  std::vector<char> ok(n, 1);
  parallel_for(n, threads, [&](std::size_t i) {
    const double L = Lambdas[i];
    rep.E_Lambda_values[i] = E_Lambda(space.model(), L, spec);
    OperatorHandle h = build_H_Lambda(space, L);
    SpectralResult sr = lowest_eigenvalues(h, 1, solver_tol, opts);
    rep.raw_ground_energies[i] = sr.eigenvalues.at(0);
    rep.renormalized_ground_energies[i] = sr.eigenvalues.at(0) + rep.E_Lambda_values[i];
    rep.residual_norms[i] = sr.residual_norms.at(0);
    ok[i] = sr.converged ? 1 : 0;
  });
  for (std::size_t i = 0; i < n; ++i) rep.solver_converged = rep.solver_converged && ok[i];
  for (std::size_t i = 1; i < n; ++i)
    rep.successive_differences.push_back(rep.renormalized_ground_energies[i] -
                                         rep.renormalized_ground_energies[i - 1]);
  return rep;
}

// ---------------------------------------------------------------------------
// IBC Hamiltonian vs renormalized cutoff column

struct IbcVsCutoffReport {
  double ibc_ground_energy = 0.0;
  std::vector<double> Lambda_values;
  std::vector<double> renormalized_ground_energies;
  std::vector<double> gaps;  // E0(IBC) - (E0(H_Lambda) + E_Lambda)
  bool solver_converged = true;

  void to_csv(const std::string& path) const {
    CsvWriter csv(path, {"Lambda", "E0_renormalized", "E0_ibc", "gap"});
    for (std::size_t i = 0; i < Lambda_values.size(); ++i)
      csv.row({Lambda_values[i], renormalized_ground_energies[i], ibc_ground_energy,
               gaps[i]});
  }
};

inline IbcVsCutoffReport ibc_vs_cutoff(const FockSpace& space,
                                       const std::vector<double>& Lambdas,
                                       const IbcConfig& cfg, double solver_tol = 1e-9,
                                       const QuadratureSpec& spec = {}, int threads = 1,
                                       const LanczosOptions& opts = {}) {
  IbcVsCutoffReport rep;
  OperatorHandle h = build_ibc_H(space, cfg);
  SpectralResult sr = lowest_eigenvalues(h, 1, solver_tol, opts);
  rep.ibc_ground_energy = sr.eigenvalues.at(0);
  rep.solver_converged = sr.converged;
  ConvergenceReport conv = convergence_study(space, Lambdas, solver_tol, spec, threads, opts);
  rep.Lambda_values = conv.Lambda_values;
  rep.renormalized_ground_energies = conv.renormalized_ground_energies;
  for (double r : rep.renormalized_ground_energies)
    rep.gaps.push_back(rep.ibc_ground_energy - r);
  rep.solver_converged = rep.solver_converged && conv.solver_converged;
  return rep;
}

// ---------------------------------------------------------------------------
// ||G_mu|| sweep

struct GNormSweep {
  std::vector<double> mu_values;
  std::vector<double> norms;
  bool nonincreasing = true;
  bool converged = true;

  void to_csv(const std::string& path) const {
    CsvWriter csv(path, {"mu", "g_norm"});
    for (std::size_t i = 0; i < mu_values.size(); ++i) csv.row({mu_values[i], norms[i]});
  }
};

inline GNormSweep g_norm_sweep(const FockSpace& space, const std::vector<double>& mus,
                               double tol = 1e-8, int threads = 1) {
  GNormSweep sweep;
  sweep.mu_values = mus;
  sweep.norms.resize(mus.size());
  std::vector<char> ok(mus.size(), 1);
  parallel_for(mus.size(), threads, [&](std::size_t i) {
    IbcConfig cfg;
    cfg.mu = mus[i];
    GNormResult r = g_norm_estimate(space, cfg, tol);
    sweep.norms[i] = r.value;
    ok[i] = r.converged ? 1 : 0;
  });
  for (std::size_t i = 0; i < mus.size(); ++i) sweep.converged = sweep.converged && ok[i];
  for (std::size_t i = 1; i < sweep.norms.size(); ++i)
    if (sweep.norms[i] > sweep.norms[i - 1] * (1.0 + 1e-9)) sweep.nonincreasing = false;
  return sweep;
}

// ---------------------------------------------------------------------------
// threshold experiment: growth of ||Xi^x G_mu probe|| in the cutoff, where
// the probe is a unit-width Gaussian on the vacuum sector and Xi is L_mu or
// Omega_mu on the one-boson sector.

enum class ThresholdTarget { L_power, Omega_power };

struct ThresholdReport {
  ThresholdTarget target = ThresholdTarget::L_power;
  std::vector<double> exponent_grid;
  std::vector<double> cutoff_grid;
  std::vector<std::vector<double>> norm_table;  // [exponent][cutoff]
  std::vector<double> slopes;                   // fitted log-log slope per exponent
  double fitted_threshold = 0.0;
  bool degenerate = false;  // all slopes on one side of zero

  void to_csv(const std::string& path) const {
    std::vector<std::string> header{"exponent"};
    for (double c : cutoff_grid) header.push_back("norm_cutoff_" + format_g17(c));
    header.push_back("slope");
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < exponent_grid.size(); ++i) {
      std::vector<double> row{exponent_grid[i]};
      for (double nv : norm_table[i]) row.push_back(nv);
      row.push_back(slopes[i]);
      csv.row(row);
    }
  }
};

namespace detail {

// int_{-1}^{1} (A - B c)^q dc, stable for small B and for q near -1
inline double angular_power_integral(double A, double B, double q) {
  if (B < 1e-9 * A) return 2.0 * std::pow(A, q);
  const double e = q + 1.0;
  const double u = std::log(A + B), v = std::log(A - B);
  if (std::abs(e) < 1e-6) {
    // ((A+B)^e - (A-B)^e) / e expanded in e
    const double d1 = u - v, s1 = u + v;
    return (d1 + 0.5 * e * d1 * s1 + e * e * (u * u * u - v * v * v) / 6.0) / B;
  }
  return (std::exp(e * u) - std::exp(e * v)) / (B * e);
}

}  // namespace detail

// squared norm contribution of the radial shell (r_lo, r_hi)
inline double threshold_shell_integral(const Model& model, ThresholdTarget target,
                                       double exponent, double mu, double r_lo, double r_hi,
                                       const QuadratureSpec& spec) {
  auto inner = [&](double p) {
    auto f = [&](double r) {
      const double w = model.omega(r);
      const double vk = model.v(r);
      const double A = p * p + r * r + w + mu;
      const double B = 2.0 * p * r;
      double ang;
      if (target == ThresholdTarget::Omega_power) {
        ang = std::pow(w + mu, 2.0 * exponent) * detail::angular_power_integral(A, B, -2.0);
      } else {
        ang = detail::angular_power_integral(A, B, 2.0 * exponent - 2.0);
      }
      return r * r * vk * vk * ang;
    };
    return integrate_adaptive(f, r_lo, r_hi, spec);
  };
  auto outer = [&](double p) { return p * p * std::exp(-p * p) * inner(p); };
  // the Gaussian probe makes the p-integrand negligible beyond p = 9
  return 2.0 * M_PI * kFourPi * integrate_adaptive(outer, 0.0, 9.0, spec);
}

inline ThresholdReport threshold_experiment(const Model& model, ThresholdTarget target,
                                            const std::vector<double>& exponents,
                                            const std::vector<double>& cutoffs,
                                            double mu = 1.0, QuadratureSpec spec = {},
                                            int threads = 1) {
  if (exponents.size() < 2 || cutoffs.size() < 3)
    throw std::invalid_argument("threshold_experiment: need >= 2 exponents, >= 3 cutoffs");
  for (std::size_t j = 1; j < cutoffs.size(); ++j)
    if (!(cutoffs[j] > cutoffs[j - 1]))
      throw std::invalid_argument("threshold_experiment: cutoffs must increase");
  spec.rel_tol = std::max(spec.rel_tol, 1e-9);
  ThresholdReport rep;
  rep.target = target;
  rep.exponent_grid = exponents;
  rep.cutoff_grid = cutoffs;
  rep.norm_table.assign(exponents.size(), std::vector<double>(cutoffs.size(), 0.0));
  parallel_for(exponents.size(), threads, [&](std::size_t i) {
    double acc = 0.0;
    double lo = 0.0;
    for (std::size_t j = 0; j < cutoffs.size(); ++j) {
      acc += threshold_shell_integral(model, target, exponents[i], mu, lo, cutoffs[j], spec);
      rep.norm_table[i][j] = std::sqrt(acc);
      lo = cutoffs[j];
    }
  });

  // least-squares slope of log norm vs log cutoff on the last half of points
  const std::size_t half = cutoffs.size() / 2;
  rep.slopes.resize(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto npts = static_cast<double>(cutoffs.size() - half);
    for (std::size_t j = half; j < cutoffs.size(); ++j) {
      const double lx = std::log(cutoffs[j]);
      const double ly = std::log(rep.norm_table[i][j]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    rep.slopes[i] = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  }

  // zero crossing of the slope as a function of the exponent
  rep.degenerate = true;
  for (std::size_t i = 0; i + 1 < exponents.size(); ++i) {
    if (rep.slopes[i] <= 0.0 && rep.slopes[i + 1] > 0.0) {
      const double s0 = rep.slopes[i], s1 = rep.slopes[i + 1];
      rep.fitted_threshold =
          exponents[i] - s0 * (exponents[i + 1] - exponents[i]) / (s1 - s0);
      rep.degenerate = false;
      break;
    }
  }
  return rep;
}

}  // namespace nibc
