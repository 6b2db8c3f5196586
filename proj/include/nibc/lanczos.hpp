#pragma once

// Matrix-free symmetric eigensolver: Lanczos with full reorthogonalization,
// deflated restarts for k > 1, and true-residual verification of every
// reported pair.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nibc/ibc.hpp"

namespace nibc {

struct SpectralResult {
  std::vector<double> eigenvalues;     // sorted ascending
  std::vector<double> residual_norms;  // ||H x - E x|| per reported pair
  int iterations = 0;                  // operator applications
  bool converged = true;
};

struct LanczosOptions {
  int max_iterations = 20000;  // cap on operator applications
  int max_basis = 300;         // restart length
  std::uint64_t seed = 20240601;
};

namespace detail {

inline void orthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) w -= q.dot(w) * q;
}

}  // namespace detail

inline SpectralResult lowest_eigenvalues(const OperatorHandle& op, int k, double tol,
                                         const LanczosOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("lowest_eigenvalues: k must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("lowest_eigenvalues: tol must be > 0");
  if (op.dim < 1) throw std::invalid_argument("lowest_eigenvalues: empty operator");
  if (k > op.dim) throw std::invalid_argument("lowest_eigenvalues: k exceeds dimension");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto dim = op.dim;

  std::vector<Eigen::VectorXd> locked_vecs;
  std::vector<double> locked_vals;
  SpectralResult result;
  int applies = 0;

  Eigen::VectorXd carry;  // best unconverged Ritz vector, seeds the next sweep
  auto start_vector = [&]() {
    Eigen::VectorXd v;
    if (carry.size() == dim) {
      v = carry;
      carry.resize(0);
      detail::orthogonalize(v, locked_vecs);
      if (v.norm() > 1e-8) return Eigen::VectorXd(v / v.norm());
    }
    v.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    detail::orthogonalize(v, locked_vecs);
    const double nn = v.norm();
    if (nn > 0.0) v /= nn;
    return v;
  };

  while (static_cast<int>(locked_vals.size()) < k && applies < opts.max_iterations) {
    const int m_cap = static_cast<int>(
        std::min<Eigen::Index>(opts.max_basis, dim - static_cast<Eigen::Index>(locked_vecs.size())));
    if (m_cap < 1) break;

    std::vector<Eigen::VectorXd> basis;
    basis.reserve(static_cast<std::size_t>(m_cap));
    std::vector<double> alpha, beta;
    basis.push_back(start_vector());

    Eigen::VectorXd w(dim);
    while (applies < opts.max_iterations) {
      const auto& v = basis.back();
      op.apply(v, w);
      ++applies;
      const double a = v.dot(w);
      alpha.push_back(a);
      w -= a * v;
      if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
      detail::orthogonalize(w, locked_vecs);
      detail::orthogonalize(w, basis);
      const double b = w.norm();
      const int m = static_cast<int>(alpha.size());

      const bool breakdown = (b < 1e-13);
      const bool at_cap = (m == m_cap);
      if (breakdown || at_cap) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          T(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i + 1 < m) {
            T(i, i + 1) = beta[static_cast<std::size_t>(i)];
            T(i + 1, i) = beta[static_cast<std::size_t>(i)];
          }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        auto ritz_vector = [&](int j) {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
          for (int i = 0; i < m; ++i)
            x += es.eigenvectors()(i, j) * basis[static_cast<std::size_t>(i)];
          return x;
        };
        const int want = k - static_cast<int>(locked_vals.size());
        int j = 0;
        for (int taken = 0; j < m && taken < want; ++j) {
          const double theta = es.eigenvalues()[j];
          const double est = breakdown ? 0.0 : std::abs(b * es.eigenvectors()(m - 1, j));
          if (est > 0.5 * tol * std::max(1.0, std::abs(theta))) break;
          Eigen::VectorXd x = ritz_vector(j);
          detail::orthogonalize(x, locked_vecs);
          const double xn = x.norm();
          if (xn < 1e-12) continue;
          locked_vecs.push_back(x / xn);
          locked_vals.push_back(theta);
          ++taken;
        }
        if (static_cast<int>(locked_vals.size()) < k && j < m && !breakdown)
          carry = ritz_vector(j);  // restart from the first unconverged pair
        break;
      }
      beta.push_back(b);
      basis.push_back(w / b);
    }

    if (static_cast<Eigen::Index>(locked_vecs.size()) >= dim) break;
  }

  // report the k lowest locked pairs with verified residuals
  std::vector<std::size_t> order(locked_vals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return locked_vals[a] < locked_vals[b]; });

  Eigen::VectorXd w(dim);
  const int have = std::min<int>(k, static_cast<int>(order.size()));
  for (int j = 0; j < have; ++j) {
    const auto& x = locked_vecs[order[static_cast<std::size_t>(j)]];
    op.apply(x, w);
    ++applies;
    const double theta = x.dot(w);
    result.eigenvalues.push_back(theta);
    result.residual_norms.push_back((w - theta * x).norm());
  }
  result.iterations = applies;
  result.converged = (have == k);
  for (int j = 0; j < have; ++j) {
    if (result.residual_norms[static_cast<std::size_t>(j)] >
        10.0 * tol * std::max(1.0, std::abs(result.eigenvalues[static_cast<std::size_t>(j)])))
      result.converged = false;
  }
  return result;
}

}  // namespace nibc
