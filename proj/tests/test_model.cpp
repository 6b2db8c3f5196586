#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "nibc/model.hpp"

using namespace nibc;

namespace {

Model random_admissible_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double beta = 0.4 + 1.6 * uni(rng);
  double D;
  if (beta < 2.0)
    D = uni(rng) * std::min(0.95 * beta, 1.0);
  else
    D = 0.05 + 0.9 * uni(rng);
  const double alpha = 0.5 * (1.0 - D);
  const double mass = (uni(rng) < 0.5) ? 0.0 : uni(rng);
  return Model::power_model(alpha, beta, mass);
}

}  // namespace

TEST_CASE("dispersion and form factor bounds by sampling") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Model m = random_admissible_model(rng);
    m.validate();
    for (int i = 0; i < 40; ++i) {
      const double k = std::pow(10.0, -3.0 + 6.0 * uni(rng));
      const double w = m.omega(k);
      CHECK(w >= std::pow(k, m.params.beta) - 1e-12);
      CHECK(w <= std::pow(k, m.params.beta) + m.params.mass + 1e-12);
      const double v = m.v(k);
      CHECK(v <= std::pow(k, -m.params.alpha) * (1.0 + 1e-12));
      CHECK(v >= m.params.coupling_lower_c * 0.99 / (1.0 + std::pow(k, m.params.alpha)));
    }
  }
  // Nelson form factor v = omega^{-1/2}
  Model nelson = Model::nelson_massless();
  nelson.validate();
  CHECK(nelson.v(4.0) == Catch::Approx(0.5));
  // relativistic dispersion sits between the power bounds
  Model rel = Model::nelson_massless();
  rel.params.mass = 0.7;
  rel.dispersion = Dispersion{DispersionKind::massive_relativistic, 1.0, 0.7};
  rel.validate();
  for (double k : {0.01, 0.5, 3.0, 50.0}) {
    CHECK(rel.omega(k) >= k);
    CHECK(rel.omega(k) <= k + 0.7);
  }
}

TEST_CASE("sector symbol") {
  Model m = Model::nelson_massless();
  CHECK(sector_symbol_L({0, 0, 0}, {}, 1.0, m) == 1.0);
  std::vector<Vec3> K{{0, 0, 2}};
  CHECK(sector_symbol_L({1, 0, 0}, K, 0.0, m) == Catch::Approx(3.0));
  const double base = sector_symbol_L({0.3, -1.0, 0.2}, K, 0.0, m);
  CHECK(sector_symbol_L({0.3, -1.0, 0.2}, K, 2.5, m) == base + 2.5);
  CHECK_THROWS_AS(sector_symbol_L({0, 0, 0}, {}, -1.0, m), std::invalid_argument);
}

TEST_CASE("E_Lambda matches the Nelson closed form") {
  Model m = Model::nelson_massless();
  CHECK(E_Lambda(m, 0.0) == 0.0);
  for (double L : {1.0, 10.0, 100.0, 1000.0}) {
    const double exact = kFourPi * std::log1p(L);
    CHECK(std::abs(E_Lambda(m, L) - exact) <= 1e-8 * exact);
  }
  CHECK(E_Lambda(m, 9.0) == Catch::Approx(kFourPi * std::log(10.0)).epsilon(1e-10));
  // nondecreasing in Lambda
  CHECK(E_Lambda(m, 20.0) > E_Lambda(m, 10.0));
}

TEST_CASE("I_mu vanishing and sign baselines") {
  Model m = Model::nelson_massless();
  CHECK(std::abs(i_mu_scalar(m, 0.0, 0.0, 0.0)) <= 1e-12);
  // closed form at mu = 1: -4 pi^2 / (3 sqrt 3)
  const double exact = -4.0 * M_PI * M_PI / (3.0 * std::sqrt(3.0));
  const double adaptive = i_mu_scalar(m, 0.0, 0.0, 1.0);
  const double mapped =
      i_mu_scalar(m, 0.0, 0.0, 1.0, QuadratureSpec{}, QuadBackend::mapped_gauss);
  CHECK(adaptive == Catch::Approx(exact).epsilon(1e-8));
  CHECK(mapped == Catch::Approx(exact).epsilon(1e-8));
  CHECK(adaptive < 0.0);
}

TEST_CASE("I_mu backend agreement and mu monotonicity on random inputs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Model m = random_admissible_model(rng);
    const double p = 3.0 * uni(rng);
    const double Om = 3.0 * uni(rng);
    const double mu1 = 0.2 + 2.0 * uni(rng);
    const double mu2 = mu1 + 0.5 + 2.0 * uni(rng);
    const double a = i_mu_scalar(m, p, Om, mu1);
    const double b = i_mu_scalar(m, p, Om, mu1, QuadratureSpec{}, QuadBackend::mapped_gauss);
    INFO("model beta=" << m.params.beta << " alpha=" << m.params.alpha << " p=" << p
                       << " Om=" << Om << " mu=" << mu1);
    CHECK(std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1e-8}));
    CHECK(i_mu_scalar(m, p, Om, mu2) < a);
  }
}

TEST_CASE("I_mu depends on K only through Omega(K)") {
  Model m = Model::nelson_massless();
  std::vector<Vec3> K1{{0.5, 0, 0}, {0, 1.5, 0}};
  std::vector<Vec3> K2{{0, 0, 1.5}, {0, 0.5, 0}};  // permuted / rotated
  const Vec3 p{0.4, -0.3, 1.0};
  const Vec3 p_rot{std::sqrt(p.norm2()), 0.0, 0.0};
  CHECK(i_mu(m, p, K1, 1.0) == i_mu(m, p_rot, K2, 1.0));
}

TEST_CASE("large-momentum growth stays logarithmic") {
  Model m = Model::nelson_massless();
  double prev_ratio = 0.0;
  for (double p : {1.0, 10.0, 100.0, 1000.0}) {
    const double r = i_mu_scalar(m, 2.0 * p, 0.0, 1.0) / i_mu_scalar(m, p, 0.0, 1.0);
    CHECK(r > 0.0);
    CHECK(r <= 3.0);
    prev_ratio = r;
  }
  CHECK(prev_ratio <= 1.2);  // ln(2p)/ln(p) tail
}

TEST_CASE("cutoff integral: divergence rate and renormalized convergence") {
  Model m = Model::nelson_massless();
  CHECK(i_mu_cutoff_scalar(m, 0.0, 0.0, 1.0, 0.0) == 0.0);
  // the unsubtracted integral grows ~ 4 pi ln Lambda
  const double slope = (i_mu_cutoff_scalar(m, 0.0, 0.0, 1.0, std::exp(9.0)) -
                        i_mu_cutoff_scalar(m, 0.0, 0.0, 1.0, std::exp(7.0))) /
                       2.0;
  CHECK(slope == Catch::Approx(kFourPi).epsilon(2e-3));
  // subtracting E_Lambda converges to the regularized integral
  const double target = i_mu_scalar(m, 0.0, 0.0, 1.0);
  double prev_err = 1e100;
  for (double L : {10.0, 100.0, 1000.0, 10000.0}) {
    const double ren = i_mu_cutoff_scalar(m, 0.0, 0.0, 1.0, L) - E_Lambda(m, L);
    const double err = std::abs(ren - target);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 1e-3);
}

TEST_CASE("model validation rejects inconsistent blocks") {
  Model m = Model::nelson_massless();
  m.form_factor.alpha = 0.3;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = Model::nelson_massless();
  m.dispersion.beta = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
