#pragma once

// Quadrature-weighted momentum discretizations: the radial grid carries the
// full 4 pi r^2 measure in its weights, so sums over nodes approximate
// integrals over the ball |k| <= Lambda_grid.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nibc/quadrature.hpp"

namespace nibc {

enum class GridScheme { midpoint, gauss_legendre, gauss_log_panels };

struct RadialGrid {
  std::vector<double> nodes;    // strictly increasing, > 0
  std::vector<double> weights;  // include the 4 pi r^2 measure, > 0
  double Lambda_grid = 0.0;

  std::size_t size() const { return nodes.size(); }

  void validate() const {
    if (nodes.empty() || nodes.size() != weights.size())
      throw std::invalid_argument("RadialGrid: nodes/weights must be nonempty and aligned");
    double prev = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!(nodes[i] > prev)) throw std::invalid_argument("RadialGrid: nodes must increase");
      if (!(weights[i] > 0.0)) throw std::invalid_argument("RadialGrid: weights must be > 0");
      prev = nodes[i];
    }
    if (!(nodes.back() <= Lambda_grid))
      throw std::invalid_argument("RadialGrid: nodes must lie within Lambda_grid");
  }
};

namespace detail {

inline void append_gl_panel(double a, double b, int m, RadialGrid& g) {
  std::vector<double> x, w;
  gauss_legendre_rule(m, x, w);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    const double r = c + h * x[static_cast<std::size_t>(i)];
    g.nodes.push_back(r);
    g.weights.push_back(4.0 * M_PI * r * r * h * w[static_cast<std::size_t>(i)]);
  }
}

}  // namespace detail

// Gauss-type nodes/weights on (0, Lambda_grid). The log-panel scheme lays
// Gauss-Legendre rules on dyadic shells (Lambda 2^{-j}, Lambda 2^{-j+1}],
// which resolves the unit scale and makes dyadic cutoffs land on panel
// edges. panels is ignored by the other schemes.
inline RadialGrid build_grid(int M, double Lambda_grid, GridScheme scheme, int panels = 0) {
  if (M < 2) throw std::invalid_argument("build_grid: need at least 2 nodes");
  if (!(Lambda_grid > 0.0)) throw std::invalid_argument("build_grid: Lambda_grid must be > 0");
  RadialGrid g;
  g.Lambda_grid = Lambda_grid;
  g.nodes.reserve(static_cast<std::size_t>(M));
  g.weights.reserve(static_cast<std::size_t>(M));
  switch (scheme) {
    case GridScheme::midpoint: {
      const double h = Lambda_grid / M;
      for (int i = 0; i < M; ++i) {
        const double r = (i + 0.5) * h;
        g.nodes.push_back(r);
        g.weights.push_back(4.0 * M_PI * r * r * h);
      }
      break;
    }
    case GridScheme::gauss_legendre:
      detail::append_gl_panel(0.0, Lambda_grid, M, g);
      break;
    case GridScheme::gauss_log_panels: {
      if (panels <= 0) panels = std::max(2, std::min(8, M / 4));
      if (M % panels != 0)
        throw std::invalid_argument("build_grid: M must be divisible by the panel count");
      const int per = M / panels;
      double hi = Lambda_grid;
      std::vector<std::pair<double, double>> edges;
      for (int j = 0; j < panels - 1; ++j) {
        edges.emplace_back(hi * 0.5, hi);
        hi *= 0.5;
      }
      edges.emplace_back(0.0, hi);
      for (auto it = edges.rbegin(); it != edges.rend(); ++it)
        detail::append_gl_panel(it->first, it->second, per, g);
      break;
    }
    default:
      throw std::invalid_argument("build_grid: unknown scheme");
  }
  g.validate();
  return g;
}

// Gauss-Legendre rule on (-1, 1) for the relative-angle variable.
struct CosineGrid {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 2
  std::size_t size() const { return nodes.size(); }
};

inline CosineGrid build_cosine_grid(int n) {
  if (n < 1) throw std::invalid_argument("build_cosine_grid: need at least 1 node");
  CosineGrid c;
  detail::gauss_legendre_rule(n, c.nodes, c.weights);
  return c;
}

}  // namespace nibc
