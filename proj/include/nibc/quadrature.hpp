#pragma once

// 1-D quadrature used throughout: an adaptive Gauss-Kronrod 15(7)
// subdivision scheme and an independent composite Gauss-Legendre backend
// on a geometric panel ladder ("mapped Gauss"). Semi-infinite domains are
// reduced to (0,1) with a rational or exponential tail map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace nibc {

enum class TailMap { rational_map, exp_map };

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
  TailMap tail_map = TailMap::rational_map;

  void validate() const {
    if (!(rel_tol > 0.0 && abs_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 1)
      throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
  }
};

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double value_, double estimate_)
      : std::runtime_error(what), value(value_), estimate(estimate_) {}
  double value;     // best available value
  double estimate;  // achieved error estimate
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(const F& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  result = resk * h;
  err = std::abs((resk - resg) * h);
}

struct Interval {
  double a, b, value, err;
  bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace detail

// Adaptive Gauss-Kronrod subdivision on a finite interval.
template <class F>
double integrate_adaptive(const F& f, double a, double b, const QuadratureSpec& spec,
                          double* achieved_error = nullptr) {
  spec.validate();
  if (!(b > a)) return 0.0;
  std::priority_queue<detail::Interval> heap;
  detail::Interval root{a, b, 0.0, 0.0};
  detail::gk15(f, a, b, root.value, root.err);
  heap.push(root);
  double total = root.value;
  double total_err = root.err;
  int used = 1;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) &&
         used < spec.max_subdivisions) {
    detail::Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Interval lo{worst.a, mid, 0.0, 0.0}, hi{mid, worst.b, 0.0, 0.0};
    detail::gk15(f, lo.a, lo.b, lo.value, lo.err);
    detail::gk15(f, hi.a, hi.b, hi.value, hi.err);
    total += lo.value + hi.value - worst.value;
    total_err += lo.err + hi.err - worst.err;
    heap.push(lo);
    heap.push(hi);
    ++used;
  }
  if (achieved_error) *achieved_error = total_err;
  if (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
    throw QuadratureError("adaptive quadrature did not converge within max_subdivisions",
                          total, total_err);
  return total;
}

// Adaptive integral over (a, infinity) via the configured tail map.
template <class F>
double integrate_semi_infinite_adaptive(const F& f, double a, const QuadratureSpec& spec) {
  if (spec.tail_map == TailMap::rational_map) {
    // k = a + t/(1-t), dk = dt/(1-t)^2
    auto g = [&](double t) {
      const double om = 1.0 - t;
      const double k = a + t / om;
      return f(k) / (om * om);
    };
    return integrate_adaptive(g, 0.0, 1.0, spec);
  }
  // k = a - log(1-t), dk = dt/(1-t)
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double k = a - std::log(om);
    return f(k) / om;
  };
  return integrate_adaptive(g, 0.0, 1.0, spec);
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_rule: n must be >= 1");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
}

template <class F>
double gl_panel(const F& f, double a, double b, const std::vector<double>& x,
                const std::vector<double>& w) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

}  // namespace detail

// Independent backend: composite 24-node Gauss-Legendre on a geometric
// panel ladder around the unit scale, extended downward until the inner
// panel is negligible and upward until the tail is negligible. Suited to
// the smooth power-law-tailed radial integrands appearing here.
template <class F>
double integrate_mapped_gauss(const F& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  const bool to_infinity = std::isinf(b);
  if (!to_infinity && !(b > a)) return 0.0;
  static thread_local std::vector<double> x, w;
  if (x.empty()) detail::gauss_legendre_rule(24, x, w);

  const double scale = std::max(1.0, a);
  double lo_edge = std::min(to_infinity ? scale : std::min(scale, b - a), b - a);
  if (to_infinity) lo_edge = scale;

  // panel edges relative to a: e_0 = 0, then lo_edge * 2^j upward
  auto eval = [&](int down_levels, int up_levels, double& last_up) {
    double total = 0.0;
    double inner = lo_edge * std::pow(0.5, down_levels);
    // innermost panel (a, a + inner)
    total += detail::gl_panel(f, a, a + inner, x, w);
    double lo = inner;
    while (lo < lo_edge * 0.999999) {
      total += detail::gl_panel(f, a + lo, a + 2.0 * lo, x, w);
      lo *= 2.0;
    }
    double hi = lo_edge;
    last_up = 0.0;
    for (int j = 0; j < up_levels; ++j) {
      double top = a + 2.0 * hi;
      bool final_panel = false;
      if (!to_infinity && top >= b) {
        top = b;
        final_panel = true;
      }
      last_up = detail::gl_panel(f, a + hi, top, x, w);
      total += last_up;
      hi *= 2.0;
      if (final_panel) {
        last_up = 0.0;
        break;
      }
    }
    return total;
  };

  int down = 6, up = to_infinity ? 24 : 64;
  double last_up = 0.0;
  double prev = eval(down, up, last_up);
  for (int refine = 0; refine < 12; ++refine) {
    down += 4;
    up += to_infinity ? 8 : 0;
    double cur = eval(down, up, last_up);
    const double diff = std::abs(cur - prev);
    const double tail = std::abs(last_up);  // geometric-tail remainder proxy
    if (diff + tail <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureError("mapped Gauss quadrature did not converge", prev, std::abs(last_up));
}

enum class QuadBackend { adaptive, mapped_gauss };

template <class F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec,
                 QuadBackend backend = QuadBackend::adaptive) {
  if (backend == QuadBackend::mapped_gauss) return integrate_mapped_gauss(f, a, b, spec);
  if (std::isinf(b)) return integrate_semi_infinite_adaptive(f, a, spec);
  return integrate_adaptive(f, a, b, spec);
}

}  // namespace nibc
