#pragma once

// Dispersion / form-factor evaluation, the sector symbol L_mu(p,K), the
// renormalization constant E_Lambda, and the regularized diagonal integral
// I_mu. The angular part of every 3-D integral is done in closed form
// (log kernel from the cos-theta integral), leaving 1-D radial quadrature.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "nibc/params.hpp"
#include "nibc/quadrature.hpp"

namespace nibc {

inline constexpr double kFourPi = 4.0 * M_PI;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

enum class DispersionKind { power, massive_relativistic };

struct Dispersion {
  DispersionKind kind = DispersionKind::power;
  double beta = 1.0;
  double mass = 0.0;

  // omega(|k|); satisfies |k|^beta <= omega <= |k|^beta + mass
  double omega(double r) const {
    if (kind == DispersionKind::power) return std::pow(r, beta) + mass;
    return std::sqrt(r * r + mass * mass);
  }

  void validate() const {
    if (!(beta > 0.0 && beta <= 2.0))
      throw std::invalid_argument("Dispersion: beta must lie in (0, 2]");
    if (!(mass >= 0.0)) throw std::invalid_argument("Dispersion: mass must be >= 0");
    if (kind == DispersionKind::massive_relativistic && beta != 1.0)
      throw std::invalid_argument("Dispersion: relativistic kind requires beta = 1");
  }
};

enum class FormFactorKind { power, inverse_sqrt_omega };

struct FormFactor {
  FormFactorKind kind = FormFactorKind::inverse_sqrt_omega;
  double alpha = 0.5;
  double coupling = 1.0;  // optional overall multiplier, default 1
};

struct Model {
  ModelParameters params;
  Dispersion dispersion;
  FormFactor form_factor;

  double omega(double r) const { return dispersion.omega(r); }

  double v(double r) const {
    if (form_factor.kind == FormFactorKind::power)
      return form_factor.coupling * std::pow(r, -form_factor.alpha);
    return form_factor.coupling / std::sqrt(dispersion.omega(r));
  }

  void validate() const {
    params.validate();
    dispersion.validate();
    if (dispersion.beta != params.beta)
      throw std::invalid_argument("Model: dispersion beta must match params.beta");
    if (!(dispersion.mass == params.mass))
      throw std::invalid_argument("Model: dispersion mass must match params.mass");
    if (form_factor.alpha != params.alpha)
      throw std::invalid_argument("Model: form factor alpha must match params.alpha");
    if (form_factor.kind == FormFactorKind::inverse_sqrt_omega &&
        std::abs(form_factor.alpha - 0.5 * params.beta) > 1e-14)
      throw std::invalid_argument("Model: v = omega^{-1/2} requires alpha = beta/2");
    if (!(form_factor.coupling >= 0.0))
      throw std::invalid_argument("Model: coupling must be >= 0");
  }

  // omega = |k|, v = |k|^{-1/2}: (beta, D) = (1, 0)
  static Model nelson_massless() {
    Model m;
    m.params = ModelParameters{0.5, 1.0, 0.0, 1.0, 1.0};
    m.dispersion = Dispersion{DispersionKind::power, 1.0, 0.0};
    m.form_factor = FormFactor{FormFactorKind::inverse_sqrt_omega, 0.5, 1.0};
    return m;
  }

  static Model power_model(double alpha, double beta, double mass = 0.0) {
    Model m;
    m.params = ModelParameters{alpha, beta, mass, 1.0, 1.0};
    m.dispersion = Dispersion{DispersionKind::power, beta, mass};
    m.form_factor = FormFactor{FormFactorKind::power, alpha, 1.0};
    return m;
  }
};

// L_mu(p, K) = p^2 + sum_i omega(k_i) + mu
inline double sector_symbol_L(const Vec3& p, std::span<const Vec3> K, double mu,
                              const Model& model) {
  if (!(mu >= 0.0)) throw std::invalid_argument("sector_symbol_L: mu must be >= 0");
  double s = p.norm2() + mu;
  for (const Vec3& k : K) s += model.omega(k.norm());
  return s;
}

// Angular mean (over directions of k) of 1/((p-k)^2 + C), times 4 pi:
//   int_{S^2} dOmega / (p^2 + r^2 - 2 p r c + C)
// with the small-(2pr/A) series taking over near p = 0.
inline double angular_inverse_kernel(double p, double r, double C) {
  const double A = p * p + r * r + C;
  const double B = 2.0 * p * r;
  if (B < 1e-3 * A) {
    const double q = B / A, q2 = q * q;
    return (kFourPi / A) * (1.0 + q2 / 3.0 + q2 * q2 / 5.0 + q2 * q2 * q2 / 7.0);
  }
  return (2.0 * M_PI / B) * std::log((A + B) / (A - B));
}

// Angular integral of the subtracted pair
//   1/((p-k)^2 + shift + omega) - 1/(k^2 + omega),
// written so the large-k cancellation happens algebraically: the leading
// difference is -(p^2 + shift) / (A (k^2 + omega)) exactly.
inline double angular_subtracted_kernel(double p, double r, double shift, double omega_r) {
  const double A = p * p + r * r + shift + omega_r;
  const double B = 2.0 * p * r;
  const double denom0 = r * r + omega_r;
  if (B < 1e-3 * A) {
    const double q = B / A, q2 = q * q;
    return kFourPi *
           (-(p * p + shift) / (A * denom0) + (q2 / 3.0 + q2 * q2 / 5.0 + q2 * q2 * q2 / 7.0) / A);
  }
  return (2.0 * M_PI / B) * std::log((A + B) / (A - B)) - kFourPi / denom0;
}

// E_Lambda = int_{|k| <= Lambda} |v|^2 / (k^2 + omega) d^3k
inline double E_Lambda(const Model& model, double Lambda, const QuadratureSpec& spec = {},
                       QuadBackend backend = QuadBackend::adaptive) {
  if (!(Lambda >= 0.0)) throw std::invalid_argument("E_Lambda: Lambda must be >= 0");
  if (Lambda == 0.0) return 0.0;
  auto f = [&](double r) {
    const double vk = model.v(r);
    return kFourPi * r * r * vk * vk / (r * r + model.omega(r));
  };
  return integrate(f, 0.0, Lambda, spec, backend);
}

// Regularized diagonal integral with the shifted symbol
//   I = int |v(k)|^2 [ 1/((p-k)^2 + Omega_K + mu + omega(k)) - 1/(k^2 + omega(k)) ] d^3k,
// depending on the boson content only through the scalar Omega_K = Omega(K).
inline double i_mu_scalar(const Model& model, double p_mag, double Omega_K, double mu,
                          const QuadratureSpec& spec = {},
                          QuadBackend backend = QuadBackend::adaptive) {
  if (!(mu >= 0.0 && Omega_K >= 0.0))
    throw std::invalid_argument("i_mu_scalar: mu and Omega_K must be >= 0");
  const double shift = Omega_K + mu;
  auto f = [&](double r) {
    const double vk = model.v(r);
    const double w = model.omega(r);
    return r * r * vk * vk * angular_subtracted_kernel(p_mag, r, shift, w);
  };
  return integrate(f, 0.0, std::numeric_limits<double>::infinity(), spec, backend);
}

inline double i_mu(const Model& model, const Vec3& p, std::span<const Vec3> K, double mu,
                   const QuadratureSpec& spec = {},
                   QuadBackend backend = QuadBackend::adaptive) {
  double Omega_K = 0.0;
  for (const Vec3& k : K) Omega_K += model.omega(k.norm());
  return i_mu_scalar(model, p.norm(), Omega_K, mu, spec, backend);
}

// Unsubtracted cutoff variant, int_{|k| <= Lambda} |v|^2 / L_mu; grows like
// E_Lambda as the cutoff is removed. The renormalized combination
// i_mu_cutoff - E_Lambda converges to i_mu.
inline double i_mu_cutoff_scalar(const Model& model, double p_mag, double Omega_K, double mu,
                                 double Lambda, const QuadratureSpec& spec = {},
                                 QuadBackend backend = QuadBackend::adaptive) {
  if (!(Lambda >= 0.0)) throw std::invalid_argument("i_mu_cutoff: Lambda must be >= 0");
  if (Lambda == 0.0) return 0.0;
  const double shift = Omega_K + mu;
  auto f = [&](double r) {
    const double vk = model.v(r);
    return r * r * vk * vk * angular_inverse_kernel(p_mag, r, shift + model.omega(r));
  };
  return integrate(f, 0.0, Lambda, spec, backend);
}

inline double i_mu_cutoff(const Model& model, const Vec3& p, std::span<const Vec3> K,
                          double mu, double Lambda, const QuadratureSpec& spec = {},
                          QuadBackend backend = QuadBackend::adaptive) {
  double Omega_K = 0.0;
  for (const Vec3& k : K) Omega_K += model.omega(k.norm());
  return i_mu_cutoff_scalar(model, p.norm(), Omega_K, mu, Lambda, spec, backend);
}

}  // namespace nibc
