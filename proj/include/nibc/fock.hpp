#pragma once

// Truncated symmetric Fock space over momentum grids. Three discretizations
// share one interface:
//   SwaveSpace      rotation-invariant sectors at total momentum zero,
//                   radial nodes plus a relative-angle grid for two bosons;
//   NodeFiberSpace  fixed total momentum P, bosons on an explicit 3-D node
//                   set, sectors stored as ordered multi-indices;
//   LatticeFullSpace explicit particle momentum on a closure lattice,
//                   validation mode for tiny grids.
// Weights carry the full momentum-space measure, so the weighted inner
// product is the discretized L^2 pairing and a / a* are exact adjoints.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nibc/grid.hpp"
#include "nibc/model.hpp"

namespace nibc {

struct FockVector {
  std::vector<Eigen::VectorXd> sectors;

  void set_zero() {
    for (auto& s : sectors) s.setZero();
  }
  FockVector& operator+=(const FockVector& o) {
    for (std::size_t n = 0; n < sectors.size(); ++n) sectors[n] += o.sectors[n];
    return *this;
  }
  FockVector& operator-=(const FockVector& o) {
    for (std::size_t n = 0; n < sectors.size(); ++n) sectors[n] -= o.sectors[n];
    return *this;
  }
  FockVector& operator*=(double s) {
    for (auto& v : sectors) v *= s;
    return *this;
  }
};

inline constexpr double kNoCutoff = std::numeric_limits<double>::infinity();

class FockSpace {
 public:
  virtual ~FockSpace() = default;

  const Model& model() const { return model_; }
  int n_max() const { return n_max_; }
  int sector_count() const { return n_max_ + 1; }
  Eigen::Index sector_dim(int n) const { return weights_[static_cast<std::size_t>(n)].size(); }
  Eigen::Index total_dim() const {
    Eigen::Index d = 0;
    for (const auto& w : weights_) d += w.size();
    return d;
  }

  // measure weights restoring the symmetric-subspace inner product
  const Eigen::VectorXd& sector_weights(int n) const {
    return weights_[static_cast<std::size_t>(n)];
  }
  // p^2 + Omega(K) per basis element (the mu = 0 free symbol)
  const Eigen::VectorXd& kinetic_symbol(int n) const {
    return kinetic_[static_cast<std::size_t>(n)];
  }
  // Omega(K) per basis element
  const Eigen::VectorXd& omega_symbol(int n) const {
    return omega_[static_cast<std::size_t>(n)];
  }
  virtual double p_magnitude(int n, Eigen::Index i) const = 0;

  FockVector zero() const {
    FockVector v;
    v.sectors.reserve(static_cast<std::size_t>(sector_count()));
    for (int n = 0; n <= n_max_; ++n) v.sectors.emplace_back(Eigen::VectorXd::Zero(sector_dim(n)));
    return v;
  }

  double dot(const FockVector& a, const FockVector& b) const {
    double s = 0.0;
    for (int n = 0; n <= n_max_; ++n)
      s += (weights_[static_cast<std::size_t>(n)].array() *
            a.sectors[static_cast<std::size_t>(n)].array() *
            b.sectors[static_cast<std::size_t>(n)].array())
               .sum();
    return s;
  }
  double norm(const FockVector& a) const { return std::sqrt(dot(a, a)); }

  // sector n of the output receives sqrt(n+1) * sum over nodes <= Lambda of
  // the weighted annihilation kernel; the top sector of the output is zero
  virtual void annihilate(const FockVector& in, double Lambda, FockVector& out) const = 0;
  // discrete adjoint; creation into sector n_max + 1 is dropped
  virtual void create(const FockVector& in, double Lambda, FockVector& out) const = 0;

  virtual bool supports_t_offdiag() const { return false; }
  // exchange part of the extended annihilation, collocated on grid nodes
  virtual void t_offdiag(const FockVector&, double /*mu*/, double /*Lambda*/,
                         bool /*include_top*/, FockVector&) const {
    throw std::logic_error("t_offdiag: not supported by this space");
  }
  // grid quadrature of int |v|^2 / L_mu(union) over nodes <= Lambda, minus
  // (when subtract is set) the mu-independent reference sum
  virtual Eigen::VectorXd t_diag_multiplier(int /*n*/, double /*mu*/, double /*Lambda*/,
                                            bool /*subtract*/) const {
    throw std::logic_error("t_diag_multiplier: not supported by this space");
  }

  // grid quadrature of E_Lambda restricted to nodes <= Lambda
  double e_grid(double Lambda) const {
    double s = 0.0;
    for (std::size_t m = 0; m < node_radii_.size(); ++m) {
      if (node_radii_[m] > Lambda) continue;
      const double vm = node_v_[m];
      s += node_weights_[m] * vm * vm / (node_radii_[m] * node_radii_[m] + node_omega_[m]);
    }
    return s;
  }

 protected:
  void init_base(const Model& model, int n_max, const std::vector<double>& radii,
                 const std::vector<double>& weights) {
    model.validate();
    if (n_max < 0) throw std::invalid_argument("FockSpace: n_max must be >= 0");
    model_ = model;
    n_max_ = n_max;
    node_radii_ = radii;
    node_weights_ = weights;
    node_v_.resize(radii.size());
    node_omega_.resize(radii.size());
    for (std::size_t m = 0; m < radii.size(); ++m) {
      node_v_[m] = model_.v(radii[m]);
      node_omega_[m] = model_.omega(radii[m]);
    }
  }

  void check_cutoff(double Lambda) const {
    if (!(Lambda >= 0.0)) throw std::invalid_argument("cutoff Lambda must be >= 0");
    if (!std::isinf(Lambda) && !node_radii_.empty() && Lambda > max_radius_ * (1.0 + 1e-12))
      throw std::invalid_argument("cutoff Lambda exceeds the grid cutoff Lambda_grid");
  }

  Model model_;
  int n_max_ = 0;
  std::vector<Eigen::VectorXd> weights_, kinetic_, omega_;
  std::vector<double> node_radii_, node_weights_, node_v_, node_omega_;
  double max_radius_ = 0.0;
};

// ---------------------------------------------------------------------------
// Rotation-invariant subspace at P = 0, n_max <= 2. Sector 1 holds radial
// profiles; sector 2 holds symmetric functions of (r_a, r_b, cos theta_12)
// on ordered radial pairs times a Gauss grid in the relative angle.
class SwaveSpace : public FockSpace {
 public:
  SwaveSpace(const Model& model, RadialGrid radial, CosineGrid cosine, int n_max)
      : radial_(std::move(radial)), cos_(std::move(cosine)) {
    radial_.validate();
    if (n_max < 0 || n_max > 2)
      throw std::invalid_argument("SwaveSpace: n_max must lie in {0, 1, 2}");
    init_base(model, n_max, radial_.nodes, radial_.weights);
    max_radius_ = radial_.Lambda_grid;
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());

    weights_.resize(static_cast<std::size_t>(n_max + 1));
    kinetic_.resize(static_cast<std::size_t>(n_max + 1));
    omega_.resize(static_cast<std::size_t>(n_max + 1));

    weights_[0] = Eigen::VectorXd::Ones(1);
    kinetic_[0] = Eigen::VectorXd::Zero(1);
    omega_[0] = Eigen::VectorXd::Zero(1);
    if (n_max >= 1) {
      weights_[1].resize(M);
      kinetic_[1].resize(M);
      omega_[1].resize(M);
      for (Eigen::Index a = 0; a < M; ++a) {
        const double r = node_radii_[static_cast<std::size_t>(a)];
        const double w = node_omega_[static_cast<std::size_t>(a)];
        weights_[1][a] = node_weights_[static_cast<std::size_t>(a)];
        kinetic_[1][a] = r * r + w;  // p = -k at P = 0
        omega_[1][a] = w;
      }
    }
    if (n_max >= 2) {
      const Eigen::Index P = M * (M + 1) / 2;
      weights_[2].resize(P * NC);
      kinetic_[2].resize(P * NC);
      omega_[2].resize(P * NC);
      for (Eigen::Index a = 0; a < M; ++a) {
        const double ra = node_radii_[static_cast<std::size_t>(a)];
        const double wa = node_omega_[static_cast<std::size_t>(a)];
        for (Eigen::Index b = a; b < M; ++b) {
          const double rb = node_radii_[static_cast<std::size_t>(b)];
          const double wb = node_omega_[static_cast<std::size_t>(b)];
          const double mult = (a == b) ? 1.0 : 2.0;
          const double ww = mult * node_weights_[static_cast<std::size_t>(a)] *
                            node_weights_[static_cast<std::size_t>(b)];
          for (Eigen::Index j = 0; j < NC; ++j) {
            const Eigen::Index e = elem2(a, b, j);
            const double c = cos_.nodes[static_cast<std::size_t>(j)];
            weights_[2][e] = ww * 0.5 * cos_.weights[static_cast<std::size_t>(j)];
            kinetic_[2][e] = ra * ra + rb * rb + 2.0 * ra * rb * c + wa + wb;
            omega_[2][e] = wa + wb;
          }
        }
      }
    }
  }

  const RadialGrid& radial() const { return radial_; }
  const CosineGrid& cosine() const { return cos_; }

  Eigen::Index pair_rank(Eigen::Index a, Eigen::Index b) const {
    if (a > b) std::swap(a, b);
    const auto M = static_cast<Eigen::Index>(radial_.size());
    return a * M - a * (a + 1) / 2 + b;
  }
  Eigen::Index elem2(Eigen::Index a, Eigen::Index b, Eigen::Index j) const {
    return pair_rank(a, b) * static_cast<Eigen::Index>(cos_.size()) + j;
  }

  double p_magnitude(int n, Eigen::Index i) const override {
    if (n == 0) return 0.0;
    if (n == 1) return node_radii_[static_cast<std::size_t>(i)];
    const double q2 = kinetic_[2][i] - omega_[2][i];
    return std::sqrt(std::max(0.0, q2));
  }

  void annihilate(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());
    if (n_max_ >= 1) {
      double s = 0.0;
      for (Eigen::Index m = 0; m < M; ++m) {
        if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
        s += node_weights_[static_cast<std::size_t>(m)] * node_v_[static_cast<std::size_t>(m)] *
             in.sectors[1][m];
      }
      out.sectors[0][0] = s;
    }
    if (n_max_ >= 2) {
      const double rt2 = std::sqrt(2.0);
      for (Eigen::Index a = 0; a < M; ++a) {
        double s = 0.0;
        for (Eigen::Index b = 0; b < M; ++b) {
          if (node_radii_[static_cast<std::size_t>(b)] > Lambda) continue;
          double ang = 0.0;
          const Eigen::Index base = pair_rank(a, b) * NC;
          for (Eigen::Index j = 0; j < NC; ++j)
            ang += 0.5 * cos_.weights[static_cast<std::size_t>(j)] * in.sectors[2][base + j];
          s += node_weights_[static_cast<std::size_t>(b)] * node_v_[static_cast<std::size_t>(b)] *
               ang;
        }
        out.sectors[1][a] = rt2 * s;
      }
    }
  }

  void create(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());
    if (n_max_ >= 1) {
      for (Eigen::Index a = 0; a < M; ++a) {
        if (node_radii_[static_cast<std::size_t>(a)] > Lambda) continue;
        out.sectors[1][a] = node_v_[static_cast<std::size_t>(a)] * in.sectors[0][0];
      }
    }
    if (n_max_ >= 2) {
      const double inv_rt2 = 1.0 / std::sqrt(2.0);
      for (Eigen::Index a = 0; a < M; ++a) {
        const bool in_a = node_radii_[static_cast<std::size_t>(a)] <= Lambda;
        for (Eigen::Index b = a; b < M; ++b) {
          const bool in_b = node_radii_[static_cast<std::size_t>(b)] <= Lambda;
          double val = 0.0;
          if (in_a) val += node_v_[static_cast<std::size_t>(a)] * in.sectors[1][b];
          if (in_b) val += node_v_[static_cast<std::size_t>(b)] * in.sectors[1][a];
          val *= inv_rt2;
          const Eigen::Index base = pair_rank(a, b) * NC;
          for (Eigen::Index j = 0; j < NC; ++j) out.sectors[2][base + j] = val;
        }
      }
    }
  }

  bool supports_t_offdiag() const override { return true; }

  void t_offdiag(const FockVector& in, double mu, double Lambda, bool include_top,
                 FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());
    const int top = n_max_;
    if (n_max_ >= 1 && (1 < top || include_top)) {
      for (Eigen::Index a = 0; a < M; ++a) {
        if (node_radii_[static_cast<std::size_t>(a)] > Lambda) {
          out.sectors[1][a] = 0.0;
          continue;
        }
        double s = 0.0;
        for (Eigen::Index b = 0; b < M; ++b) {
          if (node_radii_[static_cast<std::size_t>(b)] > Lambda) continue;
          double ang = 0.0;
          for (Eigen::Index j = 0; j < NC; ++j)
            ang += 0.5 * cos_.weights[static_cast<std::size_t>(j)] /
                   pair_symbol(a, b, j, mu);
          s += node_weights_[static_cast<std::size_t>(b)] * node_v_[static_cast<std::size_t>(b)] *
               ang * in.sectors[1][b];
        }
        out.sectors[1][a] = -node_v_[static_cast<std::size_t>(a)] * s;
      }
    }
    if (n_max_ >= 2 && (2 < top || include_top)) {
      for (Eigen::Index a = 0; a < M; ++a) {
        for (Eigen::Index b = a; b < M; ++b) {
          const Eigen::Index base = pair_rank(a, b) * NC;
          for (Eigen::Index g = 0; g < NC; ++g) {
            double val = 0.0;
            val += exchange_sum(a, b, g, mu, Lambda, in);  // annihilate boson a
            val += exchange_sum(b, a, g, mu, Lambda, in);  // annihilate boson b
            out.sectors[2][base + g] = -val;
          }
        }
      }
    }
  }

  Eigen::VectorXd t_diag_multiplier(int n, double mu, double Lambda,
                                    bool subtract) const override {
    check_cutoff(Lambda);
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());
    const double sub = subtract ? e_grid(Lambda) : 0.0;
    Eigen::VectorXd mult(sector_dim(n));
    if (n == 0) {
      double s = 0.0;
      for (Eigen::Index m = 0; m < M; ++m) {
        if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
        const double vm = node_v_[static_cast<std::size_t>(m)];
        const double rm = node_radii_[static_cast<std::size_t>(m)];
        s += node_weights_[static_cast<std::size_t>(m)] * vm * vm /
             (rm * rm + node_omega_[static_cast<std::size_t>(m)] + mu);
      }
      mult[0] = s - sub;
      return mult;
    }
    if (n == 1) {
      for (Eigen::Index a = 0; a < M; ++a) {
        double s = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) {
          if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
          const double vm = node_v_[static_cast<std::size_t>(m)];
          double ang = 0.0;
          for (Eigen::Index j = 0; j < NC; ++j)
            ang += 0.5 * cos_.weights[static_cast<std::size_t>(j)] /
                   pair_symbol(a, m, j, mu);
          s += node_weights_[static_cast<std::size_t>(m)] * vm * vm * ang;
        }
        mult[a] = s - sub;
      }
      return mult;
    }
    // two-boson sector: average the two ways of referencing the created
    // boson's polar axis, keeping the multiplier exchange-symmetric
    for (Eigen::Index a = 0; a < M; ++a) {
      for (Eigen::Index b = a; b < M; ++b) {
        const Eigen::Index base = pair_rank(a, b) * NC;
        for (Eigen::Index g = 0; g < NC; ++g) {
          double s = 0.0;
          for (Eigen::Index m = 0; m < M; ++m) {
            if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
            const double vm = node_v_[static_cast<std::size_t>(m)];
            double ang = 0.0;
            for (Eigen::Index j = 0; j < NC; ++j) {
              const double uj = 0.5 * cos_.weights[static_cast<std::size_t>(j)];
              ang += uj * 0.5 *
                     (phi_kernel(a, b, g, m, j, mu) + phi_kernel(b, a, g, m, j, mu));
            }
            s += node_weights_[static_cast<std::size_t>(m)] * vm * vm * ang;
          }
          mult[base + g] = s - sub;
        }
      }
    }
    return mult;
  }

 private:
  // L_mu on a two-boson configuration (r_a, r_b, cos_j) at P = 0
  double pair_symbol(Eigen::Index a, Eigen::Index b, Eigen::Index j, double mu) const {
    const double ra = node_radii_[static_cast<std::size_t>(a)];
    const double rb = node_radii_[static_cast<std::size_t>(b)];
    const double c = cos_.nodes[static_cast<std::size_t>(j)];
    return ra * ra + rb * rb + 2.0 * ra * rb * c + node_omega_[static_cast<std::size_t>(a)] +
           node_omega_[static_cast<std::size_t>(b)] + mu;
  }

  // Azimuthal mean of 1 / L_mu(q1, q2, k) over the third boson's azimuth:
  // q1 = node x at angle cos_g to q2 = node s (the spectator), k = node m at
  // angle cos_j to the spectator. Equals 1/sqrt(A^2 - B^2).
  double phi_kernel(Eigen::Index x, Eigen::Index s, Eigen::Index g, Eigen::Index m,
                    Eigen::Index j, double mu) const {
    const double rx = node_radii_[static_cast<std::size_t>(x)];
    const double rs = node_radii_[static_cast<std::size_t>(s)];
    const double rm = node_radii_[static_cast<std::size_t>(m)];
    const double cg = cos_.nodes[static_cast<std::size_t>(g)];
    const double cj = cos_.nodes[static_cast<std::size_t>(j)];
    const double sg = std::sqrt(std::max(0.0, 1.0 - cg * cg));
    const double sj = std::sqrt(std::max(0.0, 1.0 - cj * cj));
    const double A = rx * rx + rs * rs + rm * rm + 2.0 * rx * rs * cg + 2.0 * rs * rm * cj +
                     2.0 * rx * rm * cg * cj + node_omega_[static_cast<std::size_t>(x)] +
                     node_omega_[static_cast<std::size_t>(s)] +
                     node_omega_[static_cast<std::size_t>(m)] + mu;
    const double B = 2.0 * rx * rm * sg * sj;
    return 1.0 / std::sqrt(A * A - B * B);
  }

  // Exchange term annihilating the boson at node x with spectator s: reads
  // the input pair (s, m) at every integration node m and angle node j.
  double exchange_sum(Eigen::Index x, Eigen::Index s, Eigen::Index g, double mu,
                      double Lambda, const FockVector& in) const {
    if (node_radii_[static_cast<std::size_t>(x)] > Lambda) return 0.0;
    const auto M = static_cast<Eigen::Index>(radial_.size());
    const auto NC = static_cast<Eigen::Index>(cos_.size());
    double sum = 0.0;
    for (Eigen::Index m = 0; m < M; ++m) {
      if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
      const Eigen::Index base = pair_rank(s, m) * NC;
      double acc = 0.0;
      for (Eigen::Index j = 0; j < NC; ++j)
        acc += 0.5 * cos_.weights[static_cast<std::size_t>(j)] *
               phi_kernel(x, s, g, m, j, mu) * in.sectors[2][base + j];
      sum += node_weights_[static_cast<std::size_t>(m)] * node_v_[static_cast<std::size_t>(m)] *
             acc;
    }
    return node_v_[static_cast<std::size_t>(x)] * sum;
  }

  RadialGrid radial_;
  CosineGrid cos_;
};

// ---------------------------------------------------------------------------
// Ordered multi-index machinery shared by the node-set spaces.
namespace detail {

inline std::uint64_t pack_tuple(const std::vector<int>& t) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    key |= static_cast<std::uint64_t>(t[i] + 1) << (16 * i);
  return key;
}

inline void enumerate_tuples(int M, int n, std::vector<std::vector<int>>& out) {
  out.clear();
  if (n == 0) {
    out.emplace_back();
    return;
  }
  std::vector<int> t(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(t);
    int i = n - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] == M - 1) --i;
    if (i < 0) break;
    const int v = ++t[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) t[static_cast<std::size_t>(j)] = v;
  }
}

inline double tuple_multiplicity(const std::vector<int>& t) {
  double fact = 1.0;
  for (std::size_t i = 2; i <= t.size(); ++i) fact *= static_cast<double>(i);
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t j = i;
    double rep = 1.0;
    while (j + 1 < t.size() && t[j + 1] == t[i]) {
      ++j;
      rep *= static_cast<double>(j - i + 1);
    }
    fact /= rep;
    i = j + 1;
  }
  return fact;
}

struct TupleTable {
  std::vector<std::vector<std::vector<int>>> tuples;            // per sector
  std::vector<std::unordered_map<std::uint64_t, Eigen::Index>> index;  // per sector

  void build(int M, int n_max) {
    if (n_max > 4)
      throw std::invalid_argument("node-set spaces support n_max <= 4");
    tuples.resize(static_cast<std::size_t>(n_max + 1));
    index.resize(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
      enumerate_tuples(M, n, tuples[static_cast<std::size_t>(n)]);
      auto& map = index[static_cast<std::size_t>(n)];
      map.reserve(tuples[static_cast<std::size_t>(n)].size() * 2);
      for (std::size_t i = 0; i < tuples[static_cast<std::size_t>(n)].size(); ++i)
        map.emplace(pack_tuple(tuples[static_cast<std::size_t>(n)][i]),
                    static_cast<Eigen::Index>(i));
    }
  }

  Eigen::Index lookup(int n, const std::vector<int>& t) const {
    return index[static_cast<std::size_t>(n)].at(pack_tuple(t));
  }
};

inline std::vector<int> tuple_insert(const std::vector<int>& t, int m) {
  std::vector<int> r;
  r.reserve(t.size() + 1);
  std::size_t i = 0;
  while (i < t.size() && t[i] < m) r.push_back(t[i++]);
  r.push_back(m);
  while (i < t.size()) r.push_back(t[i++]);
  return r;
}

inline std::vector<int> tuple_erase_value(const std::vector<int>& t, int m) {
  std::vector<int> r;
  r.reserve(t.size() - 1);
  bool removed = false;
  for (int x : t) {
    if (!removed && x == m) {
      removed = true;
      continue;
    }
    r.push_back(x);
  }
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bosons on an explicit 3-D node set at fixed total momentum P; the particle
// momentum is eliminated via p = P - sum k_i.
class NodeFiberSpace : public FockSpace {
 public:
  NodeFiberSpace(const Model& model, std::vector<Vec3> nodes, std::vector<double> weights,
                 Vec3 P, int n_max)
      : nodes_(std::move(nodes)), P_(P) {
    if (nodes_.empty() || nodes_.size() != weights.size())
      throw std::invalid_argument("NodeFiberSpace: nodes/weights must be nonempty, aligned");
    std::vector<double> radii(nodes_.size());
    for (std::size_t m = 0; m < nodes_.size(); ++m) {
      radii[m] = nodes_[m].norm();
      if (!(radii[m] > 0.0))
        throw std::invalid_argument("NodeFiberSpace: nodes must have positive momentum");
      if (!(weights[m] > 0.0))
        throw std::invalid_argument("NodeFiberSpace: weights must be positive");
    }
    init_base(model, n_max, radii, weights);
    for (double r : radii) max_radius_ = std::max(max_radius_, r);
    table_.build(static_cast<int>(nodes_.size()), n_max);

    weights_.resize(static_cast<std::size_t>(n_max + 1));
    kinetic_.resize(static_cast<std::size_t>(n_max + 1));
    omega_.resize(static_cast<std::size_t>(n_max + 1));
    p_mag_.resize(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const auto dim = static_cast<Eigen::Index>(tuples.size());
      weights_[static_cast<std::size_t>(n)].resize(dim);
      kinetic_[static_cast<std::size_t>(n)].resize(dim);
      omega_[static_cast<std::size_t>(n)].resize(dim);
      p_mag_[static_cast<std::size_t>(n)].resize(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& t = tuples[static_cast<std::size_t>(i)];
        double w = detail::tuple_multiplicity(t);
        double om = 0.0;
        Vec3 p = P_;
        for (int m : t) {
          w *= node_weights_[static_cast<std::size_t>(m)];
          om += node_omega_[static_cast<std::size_t>(m)];
          p = p - nodes_[static_cast<std::size_t>(m)];
        }
        weights_[static_cast<std::size_t>(n)][i] = w;
        omega_[static_cast<std::size_t>(n)][i] = om;
        kinetic_[static_cast<std::size_t>(n)][i] = p.norm2() + om;
        p_mag_[static_cast<std::size_t>(n)][i] = p.norm();
      }
    }
    build_ptot();
  }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<std::vector<int>>& tuples(int n) const {
    return table_.tuples[static_cast<std::size_t>(n)];
  }
  Eigen::Index tuple_index(int n, const std::vector<int>& t) const {
    return table_.lookup(n, t);
  }

  double p_magnitude(int n, Eigen::Index i) const override {
    return p_mag_[static_cast<std::size_t>(n)][i];
  }

  void annihilate(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const int M = static_cast<int>(nodes_.size());
    for (int n = 0; n < n_max_; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const double fac = std::sqrt(static_cast<double>(n + 1));
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        double s = 0.0;
        for (int m = 0; m < M; ++m) {
          if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
          const auto j = table_.lookup(n + 1, detail::tuple_insert(tuples[i], m));
          s += node_weights_[static_cast<std::size_t>(m)] *
               node_v_[static_cast<std::size_t>(m)] *
               in.sectors[static_cast<std::size_t>(n + 1)][j];
        }
        out.sectors[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(i)] = fac * s;
      }
    }
  }

  void create(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    for (int n = 1; n <= n_max_; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const double fac = 1.0 / std::sqrt(static_cast<double>(n));
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        double s = 0.0;
        std::size_t q = 0;
        while (q < t.size()) {
          std::size_t e = q;
          while (e + 1 < t.size() && t[e + 1] == t[q]) ++e;
          const int m = t[q];
          if (node_radii_[static_cast<std::size_t>(m)] <= Lambda) {
            const double count = static_cast<double>(e - q + 1);
            const auto j = table_.lookup(n - 1, detail::tuple_erase_value(t, m));
            s += count * node_v_[static_cast<std::size_t>(m)] *
                 in.sectors[static_cast<std::size_t>(n - 1)][j];
          }
          q = e + 1;
        }
        out.sectors[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(i)] = fac * s;
      }
    }
  }

  bool supports_t_offdiag() const override { return true; }

  void t_offdiag(const FockVector& in, double mu, double Lambda, bool include_top,
                 FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const int M = static_cast<int>(nodes_.size());
    const int hi = include_top ? n_max_ : n_max_ - 1;
    for (int n = 1; n <= hi; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        const Vec3 p = ptot_[static_cast<std::size_t>(n)][i];
        const double om = omega_[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(i)];
        double total = 0.0;
        std::size_t q = 0;
        while (q < t.size()) {
          std::size_t e = q;
          while (e + 1 < t.size() && t[e + 1] == t[q]) ++e;
          const int d = t[q];
          const double count = static_cast<double>(e - q + 1);
          q = e + 1;
          if (node_radii_[static_cast<std::size_t>(d)] > Lambda) continue;
          const auto reduced = detail::tuple_erase_value(t, d);
          double s = 0.0;
          for (int m = 0; m < M; ++m) {
            if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
            const Vec3 pm = p - nodes_[static_cast<std::size_t>(m)];
            const double L =
                pm.norm2() + om + node_omega_[static_cast<std::size_t>(m)] + mu;
            const auto j = table_.lookup(n, detail::tuple_insert(reduced, m));
            s += node_weights_[static_cast<std::size_t>(m)] *
                 node_v_[static_cast<std::size_t>(m)] *
                 in.sectors[static_cast<std::size_t>(n)][j] / L;
          }
          total += count * node_v_[static_cast<std::size_t>(d)] * s;
        }
        out.sectors[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(i)] = -total;
      }
    }
  }

  Eigen::VectorXd t_diag_multiplier(int n, double mu, double Lambda,
                                    bool subtract) const override {
    check_cutoff(Lambda);
    const int M = static_cast<int>(nodes_.size());
    const double sub = subtract ? e_grid(Lambda) : 0.0;
    const auto dim = sector_dim(n);
    Eigen::VectorXd mult(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Vec3 p = ptot_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
      const double om = omega_[static_cast<std::size_t>(n)][i];
      double s = 0.0;
      for (int m = 0; m < M; ++m) {
        if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
        const Vec3 pm = p - nodes_[static_cast<std::size_t>(m)];
        const double vm = node_v_[static_cast<std::size_t>(m)];
        s += node_weights_[static_cast<std::size_t>(m)] * vm * vm /
             (pm.norm2() + om + node_omega_[static_cast<std::size_t>(m)] + mu);
      }
      mult[i] = s - sub;
    }
    return mult;
  }

 private:
  void build_ptot() {
    ptot_.resize(static_cast<std::size_t>(n_max_ + 1));
    for (int n = 0; n <= n_max_; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      ptot_[static_cast<std::size_t>(n)].resize(tuples.size());
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        Vec3 p = P_;
        for (int m : tuples[i]) p = p - nodes_[static_cast<std::size_t>(m)];
        ptot_[static_cast<std::size_t>(n)][i] = p;
      }
    }
  }

  std::vector<Vec3> nodes_;
  Vec3 P_;
  detail::TupleTable table_;
  std::vector<Eigen::VectorXd> p_mag_;
  std::vector<std::vector<Vec3>> ptot_;  // P - sum k_i per basis element
};

// ---------------------------------------------------------------------------
// Explicit particle momentum over a finite closure lattice. Annihilation and
// creation project transitions leaving the particle set, which preserves the
// exact adjointness pair; intended for tiny cross-validation grids.
class LatticeFullSpace : public FockSpace {
 public:
  LatticeFullSpace(const Model& model, std::vector<Vec3> boson_nodes,
                   std::vector<double> boson_weights, std::vector<Vec3> particle_momenta,
                   int n_max)
      : nodes_(std::move(boson_nodes)), particles_(std::move(particle_momenta)) {
    if (nodes_.empty() || nodes_.size() != boson_weights.size())
      throw std::invalid_argument("LatticeFullSpace: nodes/weights must be nonempty, aligned");
    if (particles_.empty())
      throw std::invalid_argument("LatticeFullSpace: particle set must be nonempty");
    std::vector<double> radii(nodes_.size());
    for (std::size_t m = 0; m < nodes_.size(); ++m) {
      radii[m] = nodes_[m].norm();
      if (!(radii[m] > 0.0))
        throw std::invalid_argument("LatticeFullSpace: boson nodes must be nonzero");
    }
    init_base(model, n_max, radii, boson_weights);
    for (double r : radii) max_radius_ = std::max(max_radius_, r);
    table_.build(static_cast<int>(nodes_.size()), n_max);
    for (std::size_t ip = 0; ip < particles_.size(); ++ip)
      particle_index_.emplace(quantize(particles_[ip]), static_cast<Eigen::Index>(ip));
    if (particle_index_.size() != particles_.size())
      throw std::invalid_argument("LatticeFullSpace: duplicate particle momenta");

    weights_.resize(static_cast<std::size_t>(n_max + 1));
    kinetic_.resize(static_cast<std::size_t>(n_max + 1));
    omega_.resize(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const auto nt = static_cast<Eigen::Index>(tuples.size());
      const auto np = static_cast<Eigen::Index>(particles_.size());
      weights_[static_cast<std::size_t>(n)].resize(np * nt);
      kinetic_[static_cast<std::size_t>(n)].resize(np * nt);
      omega_[static_cast<std::size_t>(n)].resize(np * nt);
      for (Eigen::Index ip = 0; ip < np; ++ip) {
        const double p2 = particles_[static_cast<std::size_t>(ip)].norm2();
        for (Eigen::Index it = 0; it < nt; ++it) {
          double w = detail::tuple_multiplicity(tuples[static_cast<std::size_t>(it)]);
          double om = 0.0;
          for (int m : tuples[static_cast<std::size_t>(it)]) {
            w *= node_weights_[static_cast<std::size_t>(m)];
            om += node_omega_[static_cast<std::size_t>(m)];
          }
          const Eigen::Index e = ip * nt + it;
          weights_[static_cast<std::size_t>(n)][e] = w;
          omega_[static_cast<std::size_t>(n)][e] = om;
          kinetic_[static_cast<std::size_t>(n)][e] = p2 + om;
        }
      }
    }
  }

  // particle set closed under removing boson momenta from P0, up to depth n_max
  static std::vector<Vec3> make_closure(Vec3 P0, const std::vector<Vec3>& boson_nodes,
                                        int n_max) {
    std::vector<Vec3> out;
    std::vector<std::vector<int>> tuples;
    std::unordered_map<std::int64_t, bool> seen;
    for (int n = 0; n <= n_max; ++n) {
      detail::enumerate_tuples(static_cast<int>(boson_nodes.size()), n, tuples);
      for (const auto& t : tuples) {
        Vec3 p = P0;
        for (int m : t) p = p - boson_nodes[static_cast<std::size_t>(m)];
        const std::int64_t key = quantize(p);
        if (!seen.emplace(key, true).second) continue;
        out.push_back(p);
      }
    }
    return out;
  }

  const std::vector<Vec3>& particles() const { return particles_; }
  Eigen::Index tuple_count(int n) const {
    return static_cast<Eigen::Index>(table_.tuples[static_cast<std::size_t>(n)].size());
  }

  double p_magnitude(int n, Eigen::Index i) const override {
    const Eigen::Index nt = tuple_count(n);
    return particles_[static_cast<std::size_t>(i / nt)].norm();
  }

  void annihilate(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    const int M = static_cast<int>(nodes_.size());
    for (int n = 0; n < n_max_; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const Eigen::Index nt = static_cast<Eigen::Index>(tuples.size());
      const Eigen::Index nt1 = tuple_count(n + 1);
      const double fac = std::sqrt(static_cast<double>(n + 1));
      for (std::size_t ip = 0; ip < particles_.size(); ++ip) {
        for (std::size_t it = 0; it < tuples.size(); ++it) {
          double s = 0.0;
          for (int m = 0; m < M; ++m) {
            if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
            const auto shifted = find_particle(particles_[ip] - nodes_[static_cast<std::size_t>(m)]);
            if (shifted < 0) continue;
            const auto jt = table_.lookup(n + 1, detail::tuple_insert(tuples[it], m));
            s += node_weights_[static_cast<std::size_t>(m)] *
                 node_v_[static_cast<std::size_t>(m)] *
                 in.sectors[static_cast<std::size_t>(n + 1)][shifted * nt1 + jt];
          }
          out.sectors[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(ip) * nt +
                                                   static_cast<Eigen::Index>(it)] = fac * s;
        }
      }
    }
  }

  void create(const FockVector& in, double Lambda, FockVector& out) const override {
    check_cutoff(Lambda);
    out.set_zero();
    for (int n = 1; n <= n_max_; ++n) {
      const auto& tuples = table_.tuples[static_cast<std::size_t>(n)];
      const Eigen::Index nt = static_cast<Eigen::Index>(tuples.size());
      const Eigen::Index nt0 = tuple_count(n - 1);
      const double fac = 1.0 / std::sqrt(static_cast<double>(n));
      for (std::size_t ip = 0; ip < particles_.size(); ++ip) {
        for (std::size_t it = 0; it < tuples.size(); ++it) {
          const auto& t = tuples[it];
          double s = 0.0;
          std::size_t q = 0;
          while (q < t.size()) {
            std::size_t e = q;
            while (e + 1 < t.size() && t[e + 1] == t[q]) ++e;
            const int m = t[q];
            const double count = static_cast<double>(e - q + 1);
            q = e + 1;
            if (node_radii_[static_cast<std::size_t>(m)] > Lambda) continue;
            const auto shifted = find_particle(particles_[ip] + nodes_[static_cast<std::size_t>(m)]);
            if (shifted < 0) continue;
            const auto jt = table_.lookup(n - 1, detail::tuple_erase_value(t, m));
            s += count * node_v_[static_cast<std::size_t>(m)] *
                 in.sectors[static_cast<std::size_t>(n - 1)][shifted * nt0 + jt];
          }
          out.sectors[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(ip) * nt +
                                                   static_cast<Eigen::Index>(it)] = fac * s;
        }
      }
    }
  }

 private:
  static std::int64_t quantize(const Vec3& p) {
    const auto qx = static_cast<std::int64_t>(std::llround(p.x * 1048576.0)) & 0x1FFFFF;
    const auto qy = static_cast<std::int64_t>(std::llround(p.y * 1048576.0)) & 0x1FFFFF;
    const auto qz = static_cast<std::int64_t>(std::llround(p.z * 1048576.0)) & 0x1FFFFF;
    return (qx << 42) | (qy << 21) | qz;
  }

  Eigen::Index find_particle(const Vec3& p) const {
    const auto it = particle_index_.find(quantize(p));
    return it == particle_index_.end() ? -1 : it->second;
  }

  std::vector<Vec3> nodes_;
  std::vector<Vec3> particles_;
  detail::TupleTable table_;
  std::unordered_map<std::int64_t, Eigen::Index> particle_index_;
};

}  // namespace nibc
