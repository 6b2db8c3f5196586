#pragma once

// Independent oracles used by the test and acceptance suites. These stay
// deliberately naive: grid scans, golden-section refinement, direct double
// sums, and brute-force angular quadrature, never sharing code with the
// implementation paths they check.

#include <cmath>
#include <functional>
#include <vector>

#include "nibc/fock.hpp"
#include "nibc/params.hpp"

namespace nibc::test {

// Brute-force maximum of min(f3, f11, f12) over s in [1, 2/beta): coarse
// 10^4-point scan followed by golden-section refinement. The objective is
// the min of affine functions, hence concave, so the refinement converges.
inline double brute_force_max_F(double beta) {
  auto objective = [beta](double s) {
    const auto f = nibc::bound_functions(s, beta);
    return std::min(f.f3, std::min(f.f11, f.f12));
  };
  const double lo = 1.0;
  const double hi = 2.0 / beta - 1e-9;
  const int N = 10000;
  double best_s = lo, best = objective(lo);
  for (int i = 1; i <= N; ++i) {
    const double s = lo + (hi - lo) * static_cast<double>(i) / N;
    const double val = objective(s);
    if (val > best) {
      best = val;
      best_s = s;
    }
  }
  double a = std::max(lo, best_s - (hi - lo) / N);
  double b = std::min(hi, best_s + (hi - lo) / N);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

// <a* phi, psi> evaluated as an explicit double sum over basis elements,
// independent of the space's create/annihilate kernels.
inline double pairing_by_double_sum(const nibc::FockSpace& space,
                                    const nibc::FockVector& a, const nibc::FockVector& b) {
  double s = 0.0;
  for (int n = 0; n <= space.n_max(); ++n) {
    const auto& w = space.sector_weights(n);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      s += w[i] * a.sectors[static_cast<std::size_t>(n)][i] *
           b.sectors[static_cast<std::size_t>(n)][i];
  }
  return s;
}

}  // namespace nibc::test
