#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nibc/grid.hpp"

using namespace nibc;

TEST_CASE("midpoint two-node rule") {
  auto g = build_grid(2, 1.0, GridScheme::midpoint);
  REQUIRE(g.size() == 2);
  CHECK(g.nodes[0] == Catch::Approx(0.25));
  CHECK(g.nodes[1] == Catch::Approx(0.75));
  double wsum = g.weights[0] + g.weights[1];
  // ball volume to midpoint order
  CHECK(wsum == Catch::Approx(4.0 * M_PI / 3.0).epsilon(0.07));
}

TEST_CASE("gauss schemes integrate the radial measure accurately") {
  for (auto scheme : {GridScheme::gauss_legendre, GridScheme::gauss_log_panels}) {
    auto g = build_grid(32, 32.0, scheme);
    REQUIRE(g.size() == 32);
    double vol = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      vol += g.weights[i];
      r2 += g.weights[i] * g.nodes[i] * g.nodes[i];
    }
    const double L = 32.0;
    CHECK(vol == Catch::Approx(4.0 * M_PI * L * L * L / 3.0).epsilon(1e-12));
    CHECK(r2 == Catch::Approx(4.0 * M_PI * std::pow(L, 5.0) / 5.0).epsilon(1e-12));
  }
}

TEST_CASE("log panels resolve every dyadic shell") {
  auto g = build_grid(32, 32.0, GridScheme::gauss_log_panels, 8);
  // four nodes strictly inside each of (16,32], (8,16], (4,8]
  int hi = 0, mid = 0, low = 0;
  for (double r : g.nodes) {
    if (r > 16.0) ++hi;
    else if (r > 8.0) ++mid;
    else if (r > 4.0) ++low;
  }
  CHECK(hi == 4);
  CHECK(mid == 4);
  CHECK(low == 4);
  g.validate();
}

TEST_CASE("grid argument validation") {
  CHECK_THROWS_AS(build_grid(0, 1.0, GridScheme::midpoint), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, 1.0, GridScheme::midpoint), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(8, -1.0, GridScheme::midpoint), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(9, 1.0, GridScheme::gauss_log_panels, 4), std::invalid_argument);
  RadialGrid bad;
  bad.nodes = {1.0, 0.5};
  bad.weights = {1.0, 1.0};
  bad.Lambda_grid = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("cosine grid") {
  auto c = build_cosine_grid(16);
  double s = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    s += c.weights[j];
    m2 += c.weights[j] * c.nodes[j] * c.nodes[j];
  }
  CHECK(s == Catch::Approx(2.0).margin(1e-13));
  CHECK(m2 == Catch::Approx(2.0 / 3.0).margin(1e-13));
}
