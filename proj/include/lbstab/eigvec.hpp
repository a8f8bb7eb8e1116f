#pragma once

#include "lbstab/roots.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace lbstab {

// Kernel vector of zI - E(kappa), normalized so its first component equals
// one. The smallest singular vector gives a robust kernel direction.
inline CVecL stable_eigenvector_at(const SchemeSpec& spec, const CxL& z, const CxL& kappa) {
  const int q = spec.q;
  CMatL A = CMatL::Identity(q, q) * z - amplification_matrix(spec, kappa);
  Eigen::JacobiSVD<CMatL> svd(A, Eigen::ComputeFullV);
  CVecL v = svd.matrixV().col(q - 1);
  if (std::abs(v(0)) < 1e-12L * v.norm())
    throw SchemeError("eigenvector normalization breaks down: first component vanishes");
  return v / v(0);
}

// Eigenvector along the stable branch, |z| > 1.
inline CVecL stable_eigenvector(const SchemeSpec& spec, const CharSystem& cs, const CxL& z) {
  CxL kappa = detail::min_modulus_root(roots_at(cs, z));
  return stable_eigenvector_at(spec, z, kappa);
}

// Per-component pole orders of the stable eigenvector at a circle point,
// from a log-log slope fit along the radial ray z = zStar (1 + delta),
// delta in [1e-5, 1e-2].
struct PoleOrders {
  std::vector<int> order;
  std::vector<long double> slope;
  std::vector<bool> resolved;
  int maxOrder = 0;
  bool allResolved = true;
};

namespace detail {

inline std::vector<long double> pole_fit_grid() {
  std::vector<long double> d(10);
  const long double g = std::pow(10.0L, -1.0L / 3.0L);
  long double cur = 1e-2L;
  for (auto& v : d) {
    v = cur;
    cur *= g;
  }
  return d;
}

}  // namespace detail

inline PoleOrders eigenvector_pole_orders(const SchemeSpec& spec, const CharSystem& cs,
                                          const CxL& zStar) {
  if (cs.rBar() != 1) throw SchemeError("stable branch is not scalar (rBar != 1)");
  const std::vector<long double> delta = detail::pole_fit_grid();
  const int q = spec.q;
  std::vector<std::vector<long double>> mag(static_cast<std::size_t>(q));
  for (long double d : delta) {
    CVecL phi = stable_eigenvector(spec, cs, zStar * CxL(1 + d, 0));
    for (int i = 0; i < q; ++i) mag[static_cast<std::size_t>(i)].push_back(std::abs(phi(i)));
  }

  PoleOrders out;
  for (int i = 0; i < q; ++i) {
    const auto& m = mag[static_cast<std::size_t>(i)];
    bool vanishes = false;
    for (long double v : m)
      if (v < 1e-250L) vanishes = true;
    if (vanishes) {  // structurally zero component: continuous
      out.order.push_back(0);
      out.slope.push_back(0);
      out.resolved.push_back(true);
      continue;
    }
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const long double n = static_cast<long double>(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      long double x = std::log(delta[k]), y = std::log(m[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    long double t = -slope;
    int k = static_cast<int>(std::llround(t));
    bool res = std::abs(t - static_cast<long double>(k)) <= 0.2L;
    out.order.push_back(std::max(0, k));
    out.slope.push_back(slope);
    out.resolved.push_back(res);
    if (!res) out.allResolved = false;
  }
  for (std::size_t i = 0; i < out.order.size(); ++i)
    if (out.resolved[i]) out.maxOrder = std::max(out.maxOrder, out.order[i]);
  return out;
}

// Residue of a simple-pole component at a circle point: the radial limit of
// phi_comp(z) (z - zStar).
inline CxL eigenvector_residue(const SchemeSpec& spec, const CharSystem& cs, const CxL& zStar,
                               int comp) {
  const std::vector<long double> delta = detail::pole_fit_grid();
  std::vector<long double> u;
  std::vector<CxL> vals;
  for (long double d : delta) {
    CVecL phi = stable_eigenvector(spec, cs, zStar * CxL(1 + d, 0));
    u.push_back(std::sqrt(d));
    vals.push_back(phi(comp) * zStar * CxL(d, 0));
  }
  const std::size_t tail = 8;
  std::vector<long double> ut(u.end() - tail, u.end());
  std::vector<CxL> vt(vals.end() - tail, vals.end());
  return detail::extrapolate_to_zero(ut, vt);
}

// Adjugate of a small complex matrix by cofactor expansion.
inline CMatL cmat_adjugate(const CMatL& a) {
  const int n = static_cast<int>(a.rows());
  CMatL adj(n, n);
  if (n == 1) {
    adj(0, 0) = CxL(1);
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CMatL minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = a(r, c);
        }
        ++rr;
      }
      CxL cof = minor.determinant();
      adj(j, i) = ((i + j) % 2 == 0) ? cof : -cof;
    }
  return adj;
}

}  // namespace lbstab
