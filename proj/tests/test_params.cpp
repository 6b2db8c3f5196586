#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "nibc/params.hpp"
#include "support/oracles.hpp"

using namespace nibc;

TEST_CASE("u_map examples") {
  CHECK(u_map(1.0, 1.0, 0.0) == 0.5);
  CHECK(u_map(0.0, 1.3, 0.4) == -0.2);
  CHECK(u_map(2.0 / 0.7, 0.7, 0.3) == Catch::Approx(1.0 - 0.15).margin(1e-15));
  // affine and increasing in s
  CHECK(u_map(2.0, 0.5, 0.1) > u_map(1.0, 0.5, 0.1));
}

TEST_CASE("theta_eps branches and guards") {
  CHECK(theta_eps(1.0, 0.0, 0.1) == 1.0);  // lower branch, max(1,1)
  CHECK(theta_eps(0.5, 0.45, 0.01) == Catch::Approx((2.0 - 0.45 - 0.01) / 1.5).epsilon(1e-14));
  CHECK(theta_eps(2.0, 0.5, 0.01) == 1.0);   // lower branch forced at beta = 2
  CHECK(theta_eps(0.8, 0.0, 0.1) == 1.25);   // max(1/beta, 1) with beta < 1
  CHECK(theta_eps(0.5, 0.0, 0.1) == Catch::Approx(1.9 / 1.5));  // cut is negative here
  CHECK_THROWS_AS(theta_eps(1.0, 0.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(theta_eps(1.0, 0.5, 0.5), std::invalid_argument);  // eps = eps0
  CHECK_THROWS_AS(theta_eps(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("theta_eps satisfies the mapping-lemma conclusions") {
  // theta >= 1, u(theta) < 1, and 1 + u(theta) - theta >= eps/2. The last
  // constant is the one the two-branch construction actually attains: the
  // upper branch gives equality with eps/2 by direct algebra.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double beta = 0.05 + 1.95 * uni(rng);
    double D = (beta < 2.0) ? uni(rng) * std::min(beta * 0.999, 1.0) : 0.01 + 0.98 * uni(rng);
    const double eps = uni(rng) * (beta - D) * 0.999;
    if (!(eps > 0.0)) continue;
    const double th = theta_eps(beta, D, eps);
    INFO("beta=" << beta << " D=" << D << " eps=" << eps << " theta=" << th);
    CHECK(th >= 1.0);
    CHECK(u_map(th, beta, D) < 1.0);
    CHECK(1.0 + u_map(th, beta, D) - th >= 0.5 * eps - 1e-12);
  }
}

TEST_CASE("q_map") {
  CHECK(q_map(0.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(q_map(0.5, 0.0, 1.0, 0.0) == 0.0);
  CHECK(q_map(0.9, 0.1, 1.0, 0.0) == Catch::Approx(0.25).margin(1e-15));
  CHECK(q_map(0.3, 0.0, 0.7, 0.2) >= 0.0);
  CHECK_THROWS_AS(q_map(-0.1, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("condition1_bound values and continuity") {
  CHECK(condition1_bound(1.0) == Catch::Approx(0.4).margin(1e-15));
  CHECK(condition1_bound(0.5) == Catch::Approx(0.125).margin(1e-15));
  CHECK(condition1_bound(2.0) == Catch::Approx(2.0 / 3.0).margin(1e-15));
  // continuity at the two interior breakpoints and at beta -> 2-
  const double b1 = kBreakLeft, b2 = kBreakRight;
  CHECK(std::abs(0.5 * b1 * b1 - 2.0 * b1 / (b1 + 4.0)) <= 1e-9);
  CHECK(std::abs(2.0 * b2 / (b2 + 4.0) - (b2 * b2 - 2.0 * b2 + 2.0) / (b2 + 1.0)) <= 1e-9);
  CHECK(std::abs(condition1_bound(2.0 - 1e-12) - 2.0 / 3.0) <= 1e-9);
  CHECK_THROWS_AS(condition1_bound(0.0), std::invalid_argument);
  CHECK_THROWS_AS(condition1_bound(2.5), std::invalid_argument);
}

TEST_CASE("bound_functions substitution") {
  auto f = bound_functions(1.0, 1.0);
  CHECK(f.f4 == Catch::Approx(-1.0));
  CHECK(f.f3 == Catch::Approx(1.0 / 3.0));
  CHECK(f.f11 == Catch::Approx(1.0));
  CHECK(f.f12 == Catch::Approx(0.5));
  auto g = bound_functions(1.2, 1.0);
  CHECK(g.f3 == Catch::Approx(0.4));
  CHECK(g.f11 == Catch::Approx(0.8));
  CHECK(g.f12 == Catch::Approx(0.4));
  // f11 endpoint algebra at s = 2/beta
  const double beta = 0.8;
  auto h = bound_functions(2.0 / beta, beta);
  CHECK(h.f11 == Catch::Approx(2.0 - (2.0 / beta) * (2.0 - beta)));
}

TEST_CASE("f4 stays below any admissible D on [1, 2/beta)") {
  for (double beta : {0.3, 0.9, 1.5, 1.95}) {
    for (int i = 0; i < 200; ++i) {
      const double s = 1.0 + (2.0 / beta - 1.0 - 1e-9) * i / 199.0;
      CHECK(bound_functions(s, beta).f4 < 0.0);
    }
  }
}

TEST_CASE("max_F closed form matches examples") {
  auto m1 = max_F(1.0);
  CHECK(m1.value == Catch::Approx(0.4).margin(1e-12));
  CHECK(m1.argmax_s == Catch::Approx(1.2).margin(1e-12));
  auto m2 = max_F(0.5);
  CHECK(m2.value == Catch::Approx(0.125).margin(1e-12));
  CHECK(m2.argmax_s == Catch::Approx(1.25).margin(1e-12));
  auto m3 = max_F(1.8);
  CHECK(m3.value == Catch::Approx(1.64 / 2.8).margin(1e-12));
  CHECK(m3.argmax_s == 1.0);
  CHECK_THROWS_AS(max_F(2.0), std::invalid_argument);
}

TEST_CASE("max_F equals brute-force maximization") {
  for (int i = 0; i < 40; ++i) {
    const double beta = 0.01 + (1.99 - 0.01) * i / 39.0;
    const double closed = max_F(beta).value;
    const double brute = test::brute_force_max_F(beta);
    INFO("beta=" << beta);
    CHECK(std::abs(closed - brute) <= 1e-9);
    CHECK(closed == Catch::Approx(condition1_bound(beta)).margin(1e-12));
  }
}

TEST_CASE("classify regions") {
  auto nelson = classify_pair(1.0, 0.0);
  CHECK(nelson.condition1);
  CHECK(nelson.prop_reverse);
  CHECK(nelson.general);
  CHECK(nelson.old_condition);
  CHECK(nelson.condition1_bound == Catch::Approx(0.4));

  auto corner = classify_pair(2.0, 0.0);  // excluded point
  CHECK_FALSE(corner.condition1);
  CHECK_FALSE(corner.general);
  CHECK(corner.old_condition);  // the massive-case bound admits it

  auto mid = classify_pair(1.0, 0.45);
  CHECK_FALSE(mid.condition1);
  CHECK(mid.prop_reverse);
  CHECK(mid.general);
}

TEST_CASE("region nesting condition1 => prop_reverse => general") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double beta = 0.02 + 1.98 * uni(rng);
    const double D = uni(rng) * 1.2;
    auto v = classify_pair(beta, D);
    if (v.condition1) CHECK(v.prop_reverse);
    if (v.prop_reverse) CHECK(v.general);
  }
}

TEST_CASE("ModelParameters validation") {
  ModelParameters p{0.5, 1.0, 0.0, 1.0, 1.0};
  CHECK_NOTHROW(p.validate());
  CHECK(p.D() == 0.0);
  p.alpha = 1.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParameters{0.5, 2.0, 0.0, 1.0, 1.0};  // D = 0 at beta = 2
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParameters{0.4, 2.0, 0.0, 1.0, 1.0};  // D = 0.2
  CHECK_NOTHROW(p.validate());
  p = ModelParameters{0.2, 0.5, 0.0, 1.0, 1.0};  // D = 0.6 >= beta
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParameters{0.5, 1.0, 0.0, 0.5, 1.0};  // mu < 1
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("region curve table") {
  auto rows = region_curve_table(100);
  bool saw_b1 = false, saw_b2 = false;
  for (const auto& r : rows) {
    CHECK(r.selected == Catch::Approx(condition1_bound(r.beta)).margin(1e-15));
    if (r.beta == kBreakLeft) saw_b1 = true;
    if (r.beta == kBreakRight) saw_b2 = true;
  }
  CHECK(saw_b1);
  CHECK(saw_b2);
  // at beta = 2 the dash-dotted old bound meets the selected bound
  auto last = rows.back();
  CHECK(last.beta == 2.0);
  CHECK(std::abs(last.old_bound - last.selected) <= 1e-12);
}
