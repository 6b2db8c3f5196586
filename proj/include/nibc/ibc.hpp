#pragma once

// The interior-boundary-condition operators on the truncated space:
// G_mu = -L_mu^{-1} a*(V), its adjoint, the extended annihilation pieces
// T_d / T_od, the full extension A and the Hamiltonian in its symmetric
// form, plus the discrete verifications of the structural identities and
// the power-iteration estimate of ||G_mu||.
//
// Truncation contract: operators mapping upward (a*, G) drop the sector
// above n_max. Inside A, H and the identity checks the action of T on the
// top sector is dropped as well, which is what makes the identities
//   L_mu G_mu = -a*,  T^mu - T^lambda = (mu-lambda) G_mu* G_lambda,
//   A^mu = A^lambda,  H^mu = H^lambda
// hold exactly on the truncated space. The per-sector formulas on the top
// sector remain reachable through IbcConfig::top_sector_T.

#include <cmath>
#include <random>
#include <stdexcept>

#include "nibc/fock.hpp"
#include "nibc/model.hpp"
#include "nibc/quadrature.hpp"

namespace nibc {

enum class DiagonalQuadrature { grid, adaptive };

struct IbcConfig {
  double mu = 1.0;
  double Lambda = kNoCutoff;  // finite: cutoff mode (no subtraction)
  DiagonalQuadrature diag = DiagonalQuadrature::grid;
  bool top_sector_T = false;
  QuadratureSpec quadrature{};

  bool regularized() const { return std::isinf(Lambda); }
  void validate() const {
    if (!(mu >= 1.0)) throw std::invalid_argument("IbcConfig: mu must be >= 1");
    if (!(Lambda >= 0.0)) throw std::invalid_argument("IbcConfig: Lambda must be >= 0");
    quadrature.validate();
  }
};

// ---------------------------------------------------------------------------
// free operators

inline FockVector apply_free(const FockSpace& space, const FockVector& in, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("apply_free: mu must be >= 0");
  FockVector out = space.zero();
  for (int n = 0; n <= space.n_max(); ++n)
    out.sectors[static_cast<std::size_t>(n)] =
        (space.kinetic_symbol(n).array() + mu) *
        in.sectors[static_cast<std::size_t>(n)].array();
  return out;
}

inline FockVector apply_free_inverse(const FockSpace& space, const FockVector& in, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("apply_free_inverse: mu must be > 0");
  FockVector out = space.zero();
  for (int n = 0; n <= space.n_max(); ++n)
    out.sectors[static_cast<std::size_t>(n)] =
        in.sectors[static_cast<std::size_t>(n)].array() /
        (space.kinetic_symbol(n).array() + mu);
  return out;
}

inline FockVector apply_number(const FockSpace& space, const FockVector& in) {
  FockVector out = in;
  for (int n = 0; n <= space.n_max(); ++n) out.sectors[static_cast<std::size_t>(n)] *= n;
  return out;
}

inline FockVector apply_field_energy(const FockSpace& space, const FockVector& in) {
  FockVector out = space.zero();
  for (int n = 0; n <= space.n_max(); ++n)
    out.sectors[static_cast<std::size_t>(n)] =
        space.omega_symbol(n).array() * in.sectors[static_cast<std::size_t>(n)].array();
  return out;
}

inline FockVector apply_annihilation(const FockSpace& space, const FockVector& in,
                                     double Lambda) {
  FockVector out = space.zero();
  space.annihilate(in, Lambda, out);
  return out;
}

inline FockVector apply_creation(const FockSpace& space, const FockVector& in, double Lambda) {
  FockVector out = space.zero();
  space.create(in, Lambda, out);
  return out;
}

// cutoff Hamiltonian L + a(chi_Lambda V) + a*(chi_Lambda V)
inline FockVector apply_H_Lambda(const FockSpace& space, const FockVector& in, double Lambda) {
  FockVector out = apply_free(space, in, 0.0);
  FockVector tmp = space.zero();
  space.annihilate(in, Lambda, tmp);
  out += tmp;
  space.create(in, Lambda, tmp);
  out += tmp;
  return out;
}

// ---------------------------------------------------------------------------
// IBC operators

inline FockVector apply_G(const FockSpace& space, const FockVector& in, const IbcConfig& cfg) {
  cfg.validate();
  FockVector out = space.zero();
  space.create(in, cfg.Lambda, out);
  for (int n = 0; n <= space.n_max(); ++n)
    out.sectors[static_cast<std::size_t>(n)] =
        -out.sectors[static_cast<std::size_t>(n)].array() /
        (space.kinetic_symbol(n).array() + cfg.mu);
  return out;
}

inline FockVector apply_G_adjoint(const FockSpace& space, const FockVector& in,
                                  const IbcConfig& cfg) {
  cfg.validate();
  FockVector tmp = apply_free_inverse(space, in, cfg.mu);
  FockVector out = space.zero();
  space.annihilate(tmp, cfg.Lambda, out);
  for (auto& s : out.sectors) s = -s;
  return out;
}

inline FockVector apply_T_d(const FockSpace& space, const FockVector& in, const IbcConfig& cfg) {
  cfg.validate();
  FockVector out = space.zero();
  const int hi = cfg.top_sector_T ? space.n_max() : space.n_max() - 1;
  for (int n = 0; n <= hi; ++n) {
    Eigen::VectorXd mult;
    if (cfg.diag == DiagonalQuadrature::grid) {
      mult = space.t_diag_multiplier(n, cfg.mu, cfg.Lambda, cfg.regularized());
    } else {
      mult.resize(space.sector_dim(n));
      for (Eigen::Index i = 0; i < mult.size(); ++i) {
        const double p = space.p_magnitude(n, i);
        const double om = space.omega_symbol(n)[i];
        mult[i] = cfg.regularized()
                      ? i_mu_scalar(space.model(), p, om, cfg.mu, cfg.quadrature)
                      : i_mu_cutoff_scalar(space.model(), p, om, cfg.mu, cfg.Lambda,
                                           cfg.quadrature);
      }
    }
    out.sectors[static_cast<std::size_t>(n)] =
        -mult.array() * in.sectors[static_cast<std::size_t>(n)].array();
  }
  return out;
}

inline FockVector apply_T_od(const FockSpace& space, const FockVector& in,
                             const IbcConfig& cfg) {
  cfg.validate();
  FockVector out = space.zero();
  space.t_offdiag(in, cfg.mu, cfg.Lambda, cfg.top_sector_T, out);
  return out;
}

inline FockVector apply_T(const FockSpace& space, const FockVector& in, const IbcConfig& cfg) {
  FockVector out = apply_T_d(space, in, cfg);
  out += apply_T_od(space, in, cfg);
  return out;
}

// A = a(V)(1 - G_mu) + T^mu
inline FockVector apply_A(const FockSpace& space, const FockVector& in, const IbcConfig& cfg) {
  cfg.validate();
  FockVector reg = in;
  reg -= apply_G(space, in, cfg);
  FockVector out = space.zero();
  space.annihilate(reg, cfg.Lambda, out);
  out += apply_T(space, in, cfg);
  return out;
}

// H = (1 - G_mu)* L_mu (1 - G_mu) + T^mu - mu
inline FockVector apply_H(const FockSpace& space, const FockVector& in, const IbcConfig& cfg) {
  cfg.validate();
  FockVector reg = in;
  reg -= apply_G(space, in, cfg);
  FockVector lreg = apply_free(space, reg, cfg.mu);
  FockVector out = lreg;
  out -= apply_G_adjoint(space, lreg, cfg);
  out += apply_T(space, in, cfg);
  FockVector shift = in;
  shift *= cfg.mu;
  out -= shift;
  return out;
}

// ---------------------------------------------------------------------------
// operator handles in orthonormal coordinates for the eigensolver

struct OperatorHandle {
  Eigen::Index dim = 0;
  bool is_symmetric = true;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
};

namespace detail {

inline Eigen::VectorXd flat_sqrt_weights(const FockSpace& space) {
  Eigen::VectorXd sw(space.total_dim());
  Eigen::Index o = 0;
  for (int n = 0; n <= space.n_max(); ++n) {
    sw.segment(o, space.sector_dim(n)) = space.sector_weights(n).array().sqrt();
    o += space.sector_dim(n);
  }
  return sw;
}

}  // namespace detail

template <class Op>
OperatorHandle make_operator(const FockSpace& space, Op op) {
  OperatorHandle h;
  h.dim = space.total_dim();
  h.is_symmetric = true;
  Eigen::VectorXd sw = detail::flat_sqrt_weights(space);
  h.apply = [&space, op = std::move(op), sw = std::move(sw)](const Eigen::VectorXd& x,
                                                             Eigen::VectorXd& y) {
    FockVector psi = space.zero();
    Eigen::Index o = 0;
    for (int n = 0; n <= space.n_max(); ++n) {
      const auto d = space.sector_dim(n);
      psi.sectors[static_cast<std::size_t>(n)] =
          x.segment(o, d).array() / sw.segment(o, d).array();
      o += d;
    }
    FockVector res = op(psi);
    y.resize(x.size());
    o = 0;
    for (int n = 0; n <= space.n_max(); ++n) {
      const auto d = space.sector_dim(n);
      y.segment(o, d) =
          res.sectors[static_cast<std::size_t>(n)].array() * sw.segment(o, d).array();
      o += d;
    }
  };
  return h;
}

inline OperatorHandle build_H_Lambda(const FockSpace& space, double Lambda) {
  return make_operator(space, [&space, Lambda](const FockVector& psi) {
    return apply_H_Lambda(space, psi, Lambda);
  });
}

inline OperatorHandle build_ibc_H(const FockSpace& space, const IbcConfig& cfg) {
  cfg.validate();
  return make_operator(
      space, [&space, cfg](const FockVector& psi) { return apply_H(space, psi, cfg); });
}

// ---------------------------------------------------------------------------
// randomized identity checks

inline FockVector random_vector(const FockSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  FockVector v = space.zero();
  for (auto& s : v.sectors)
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = gauss(rng);
  const double nn = space.norm(v);
  if (nn > 0.0) v *= 1.0 / nn;
  return v;
}

// max over trials of ||(T^mu - T^lam) psi - (mu - lam) G_mu* G_lam psi|| / ||psi||
inline double check_T_difference_identity(const FockSpace& space, const IbcConfig& cfg_mu,
                                          const IbcConfig& cfg_lambda, int trials,
                                          std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector psi = random_vector(space, rng);
    FockVector lhs = apply_T(space, psi, cfg_mu);
    lhs -= apply_T(space, psi, cfg_lambda);
    FockVector rhs = apply_G_adjoint(space, apply_G(space, psi, cfg_lambda), cfg_mu);
    rhs *= (cfg_mu.mu - cfg_lambda.mu);
    lhs -= rhs;
    worst = std::max(worst, space.norm(lhs));
  }
  return worst;
}

// max defect of 1 - G_mu = (1 - G_lam) - (lam - mu) L_mu^{-1} G_lam
inline double check_one_minus_G_identity(const FockSpace& space, const IbcConfig& cfg_mu,
                                         const IbcConfig& cfg_lambda, int trials,
                                         std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector psi = random_vector(space, rng);
    FockVector glam = apply_G(space, psi, cfg_lambda);
    FockVector lhs = psi;
    lhs -= apply_G(space, psi, cfg_mu);
    FockVector rhs = psi;
    rhs -= glam;
    FockVector corr = apply_free_inverse(space, glam, cfg_mu.mu);
    corr *= (cfg_lambda.mu - cfg_mu.mu);
    rhs -= corr;
    lhs -= rhs;
    worst = std::max(worst, space.norm(lhs));
  }
  return worst;
}

// max of ||A^mu psi - A^lam psi|| over unit vectors
inline double check_A_mu_independence(const FockSpace& space, const IbcConfig& cfg_mu,
                                      const IbcConfig& cfg_lambda, int trials,
                                      std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector psi = random_vector(space, rng);
    FockVector d = apply_A(space, psi, cfg_mu);
    d -= apply_A(space, psi, cfg_lambda);
    worst = std::max(worst, space.norm(d));
  }
  return worst;
}

inline double check_H_mu_independence(const FockSpace& space, const IbcConfig& cfg_mu,
                                      const IbcConfig& cfg_lambda, int trials,
                                      std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector psi = random_vector(space, rng);
    FockVector d = apply_H(space, psi, cfg_mu);
    FockVector h2 = apply_H(space, psi, cfg_lambda);
    const double scale = std::max(1.0, space.norm(h2));
    d -= h2;
    worst = std::max(worst, space.norm(d) / scale);
  }
  return worst;
}

// ||L_mu G_mu psi + a* psi|| (structural identity, exact up to rounding)
inline double check_LG_identity(const FockSpace& space, const IbcConfig& cfg, int trials,
                                std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector psi = random_vector(space, rng);
    FockVector lhs = apply_free(space, apply_G(space, psi, cfg), cfg.mu);
    lhs += apply_creation(space, psi, cfg.Lambda);
    worst = std::max(worst, space.norm(lhs));
  }
  return worst;
}

// |<phi, Op psi> - <Op phi, psi>| normalized by the pairing scale
template <class Op>
double symmetry_defect(const FockSpace& space, Op op, int trials, std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector phi = random_vector(space, rng);
    FockVector psi = random_vector(space, rng);
    FockVector op_psi = op(psi);
    FockVector op_phi = op(phi);
    const double a = space.dot(phi, op_psi);
    const double b = space.dot(op_phi, psi);
    const double scale =
        std::max(1.0, space.norm(op_phi) + space.norm(op_psi));
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

// |<a* phi, psi> - <phi, a psi>| normalized by the pairing scale
inline double adjointness_defect(const FockSpace& space, double Lambda, int trials,
                                 std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    FockVector phi = random_vector(space, rng);
    FockVector psi = random_vector(space, rng);
    FockVector astar_phi = apply_creation(space, phi, Lambda);
    FockVector a_psi = apply_annihilation(space, psi, Lambda);
    const double a = space.dot(astar_phi, psi);
    const double b = space.dot(phi, a_psi);
    const double scale =
        std::max(1.0, space.norm(astar_phi) + space.norm(a_psi));
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// power iteration on G_mu* G_mu

struct GNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline GNormResult g_norm_estimate(const FockSpace& space, const IbcConfig& cfg, double tol,
                                   int max_iterations = 10000) {
  cfg.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("g_norm_estimate: tol must be > 0");
  GNormResult res;
  FockVector v = space.zero();
  for (auto& s : v.sectors) s.setOnes();
  const double n0 = space.norm(v);
  if (n0 == 0.0) return res;
  v *= 1.0 / n0;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    FockVector w = apply_G_adjoint(space, apply_G(space, v, cfg), cfg);
    const double lambda = space.dot(v, w);
    const double wn = space.norm(w);
    res.iterations = it;
    if (wn == 0.0 || lambda <= 0.0) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
      res.value = std::sqrt(lambda);
      res.converged = true;
      return res;
    }
    lambda_prev = lambda;
    w *= 1.0 / wn;
    v = w;
  }
  res.value = std::sqrt(std::max(0.0, lambda_prev));
  res.converged = false;
  return res;
}

}  // namespace nibc
