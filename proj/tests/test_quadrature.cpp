#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nibc/quadrature.hpp"

using namespace nibc;

TEST_CASE("gauss_legendre_rule integrates polynomials exactly") {
  std::vector<double> x, w;
  for (int n : {2, 5, 16, 24}) {
    detail::gauss_legendre_rule(n, x, w);
    double wsum = 0.0;
    for (double wi : w) wsum += wi;
    CHECK(wsum == Catch::Approx(2.0).margin(1e-14));
    // degree 2n-1 exactness on an odd-degree-free monomial
    const int deg = 2 * n - 2;
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) quad += w[i] * std::pow(x[i], deg);
    CHECK(quad == Catch::Approx(2.0 / (deg + 1)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive quadrature on finite intervals") {
  QuadratureSpec spec;
  auto f = [](double t) { return std::exp(-t) * std::cos(10.0 * t); };
  const double exact = (1.0 - std::exp(-1.0) * (std::cos(10.0) - 10.0 * std::sin(10.0))) / 101.0;
  CHECK(integrate_adaptive(f, 0.0, 1.0, spec) == Catch::Approx(exact).epsilon(1e-10));
  // endpoint algebraic singularity
  auto g = [](double t) { return 1.0 / std::sqrt(t); };
  CHECK(integrate_adaptive(g, 1e-300, 1.0, spec) == Catch::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("semi-infinite integrals agree across backends and with boost") {
  QuadratureSpec spec;
  auto f = [](double k) { return k / ((k * k + 1.0) * (k * k + 4.0)); };
  const double exact = std::log(4.0) / 6.0;  // log(b/a)/(2(b-a)) with a=1, b=4
  const double adaptive = integrate_semi_infinite_adaptive(f, 0.0, spec);
  const double mapped =
      integrate_mapped_gauss(f, 0.0, std::numeric_limits<double>::infinity(), spec);
  double boost_err = 0.0;
  const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 12, 1e-10, &boost_err);
  CHECK(adaptive == Catch::Approx(exact).epsilon(1e-9));
  CHECK(mapped == Catch::Approx(exact).epsilon(1e-9));
  CHECK(adaptive == Catch::Approx(ref).epsilon(1e-9));

  spec.tail_map = TailMap::exp_map;
  auto gaussian = [](double k) { return k * k * std::exp(-k * k); };
  const double exact_g = std::sqrt(M_PI) / 4.0;
  CHECK(integrate_semi_infinite_adaptive(gaussian, 0.0, spec) ==
        Catch::Approx(exact_g).epsilon(1e-9));
}

TEST_CASE("mapped gauss on finite intervals") {
  QuadratureSpec spec;
  auto f = [](double t) { return std::sin(t); };
  CHECK(integrate_mapped_gauss(f, 0.0, M_PI, spec) == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("power-law tails at the slow-decay end") {
  QuadratureSpec spec;
  // k^{-2.2} tail: the weakest decay the admissible form factors produce
  auto f = [](double k) { return 1.0 / (1.0 + std::pow(k, 2.2)); };
  const double adaptive = integrate_semi_infinite_adaptive(f, 0.0, spec);
  const double mapped =
      integrate_mapped_gauss(f, 0.0, std::numeric_limits<double>::infinity(), spec);
  CHECK(adaptive == Catch::Approx(mapped).epsilon(1e-7));
}

TEST_CASE("non-convergence is diagnosed with the achieved estimate") {
  QuadratureSpec spec;
  spec.max_subdivisions = 4;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-16;
  auto f = [](double t) { return std::cos(200.0 * t * t); };
  try {
    integrate_adaptive(f, 0.0, 3.0, spec);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.estimate > 0.0);
  }
}

TEST_CASE("spec validation") {
  QuadratureSpec spec;
  spec.rel_tol = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
