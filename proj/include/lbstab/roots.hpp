#pragma once

#include "lbstab/charsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace lbstab {

// Roots in kappa of the characteristic equation at fixed z, split by modulus.
// Degree drops at either end of the Laurent range show up as roots at the
// origin / at infinity, so stableCount/unstableCount always total the stencil
// extents.
struct KappaRoots {
  CxL z;
  std::vector<CxL> stable;    // |kappa| < 1 (excluding the origin)
  std::vector<CxL> unstable;  // 1 < |kappa| < infinity
  std::vector<CxL> onCircle;  // within tolerance of the unit circle
  int zerosAtOrigin = 0;
  int atInfinity = 0;

  int stableCount() const { return static_cast<int>(stable.size()) + zerosAtOrigin; }
  int unstableCount() const { return static_cast<int>(unstable.size()) + atInfinity; }
};

inline KappaRoots roots_at(const CharSystem& cs, CxL z) {
  CVec c = cs.kappa_poly_at(z);
  long double maxc = 0;
  for (const CxL& v : c) maxc = std::max(maxc, std::abs(v));
  if (maxc == 0) throw SchemeError("characteristic polynomial vanishes identically at this z");

  KappaRoots out;
  out.z = z;
  const long double drop = 1e-13L * maxc;
  while (c.size() > 1 && std::abs(c.back()) < drop) {
    c.pop_back();
    ++out.atInfinity;
  }
  std::size_t lowz = 0;
  while (lowz + 1 < c.size() && std::abs(c[lowz]) < drop) ++lowz;
  out.zerosAtOrigin = static_cast<int>(lowz);
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lowz));

  const long double ctol = 1e-9L;
  if (c.size() > 1) {
    for (const CxL& k : poly_roots(c)) {
      long double m = std::abs(k);
      if (m <= 1e-12L)
        ++out.zerosAtOrigin;
      else if (m < 1 - ctol)
        out.stable.push_back(k);
      else if (m > 1 + ctol)
        out.unstable.push_back(k);
      else
        out.onCircle.push_back(k);
    }
  }
  return out;
}

// Unique root inside the unit disk for |z| > 1; requires a width-one left
// stencil so that the stable branch is a single scalar function.
inline CxL stable_root(const CharSystem& cs, const CxL& z) {
  if (cs.rBar() != 1) throw SchemeError("stable branch is not scalar (rBar != 1)");
  if (std::abs(z) <= 1 + 1e-12L)
    throw SchemeError("stable_root requires |z| > 1; use stable_root_continuation on the circle");
  KappaRoots kr = roots_at(cs, z);
  if (kr.stableCount() != 1)
    throw SchemeError("expected exactly one stable kappa root at this z");
  return kr.stable.empty() ? CxL(0) : kr.stable[0];
}

namespace detail {

// Neville extrapolation of f(u_k) to u = 0, with an error estimate from the
// last two columns of the tableau.
inline CxL extrapolate_to_zero(const std::vector<long double>& u, std::vector<CxL> f,
                               long double* err = nullptr) {
  const std::size_t n = u.size();
  CxL prev = f[0];
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t k = 0; k + m < n; ++k) {
      long double denom = u[k] - u[k + m];
      f[k] = (CxL(0, 0) - CxL(u[k + m], 0)) * (f[k] - f[k + 1]) / CxL(denom, 0) + f[k + 1];
    }
    if (m + 1 == n && err) *err = std::abs(f[0] - prev);
    prev = f[0];
  }
  return f[0];
}

// for |z| > 1 and a width-one left stencil, the stable root is the unique
// minimum-modulus root
inline CxL min_modulus_root(const KappaRoots& kr) {
  CxL best(0);
  long double bm = std::numeric_limits<long double>::infinity();
  if (kr.zerosAtOrigin > 0) bm = 0;
  for (const std::vector<CxL>* grp : {&kr.stable, &kr.onCircle, &kr.unstable})
    for (const CxL& r : *grp)
      if (std::abs(r) < bm) {
        bm = std::abs(r);
        best = r;
      }
  return best;
}

inline long double min_root_gap(const KappaRoots& kr) {
  std::vector<CxL> all = kr.stable;
  all.insert(all.end(), kr.unstable.begin(), kr.unstable.end());
  all.insert(all.end(), kr.onCircle.begin(), kr.onCircle.end());
  for (int k = 0; k < kr.zerosAtOrigin; ++k) all.push_back(CxL(0));
  long double g = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) g = std::min(g, std::abs(all[i] - all[j]));
  return g;
}

}  // namespace detail

// Radial limit of the stable branch at a circle point, with the branch
// derivative. When the limit is a double root of the characteristic equation
// the derivative is recovered from the second-order expansion (node case); a
// vertical tangent (turning point) is flagged instead.
struct Continuation {
  CxL kappa;
  CxL dkdz;
  bool doubleRoot = false;
  bool turningPoint = false;
};

inline Continuation stable_root_continuation(const CharSystem& cs, const CxL& zc) {
  if (cs.rBar() != 1) throw SchemeError("stable branch is not scalar (rBar != 1)");

  Continuation out;
  const BiPoly P = cs.full();
  const BiPoly Pk = bi_dkappa(P);
  const BiPoly Pz = bi_dz(P);

  if (std::abs(zc) > 1 + 1e-8L) {
    out.kappa = stable_root(cs, zc);
    CxL pk = bi_ceval(Pk, zc, out.kappa);
    out.dkdz = -bi_ceval(Pz, zc, out.kappa) / pk;
    return out;
  }
  if (std::abs(zc) < 1 - 1e-6L)
    throw SchemeError("stable_root_continuation expects a point on or outside the unit circle");

  // sample the ray z = zc (1 + delta) on a geometric grid
  const int levels = 14;
  std::vector<long double> delta(levels), u(levels);
  std::vector<CxL> kap(levels);
  bool allClose = true;
  for (int k = 0; k < levels; ++k) {
    delta[k] = 1e-2L / std::pow(2.0L, static_cast<long double>(k));
    u[k] = std::sqrt(delta[k]);
    CxL zk = zc * CxL(1 + delta[k], 0);
    KappaRoots kr = roots_at(cs, zk);
    if (detail::min_root_gap(kr) >= 1e-9L) allClose = false;
    kap[k] = detail::min_modulus_root(kr);
  }
  if (allClose)
    throw SchemeError("degenerate continuation: two kappa roots coincide along the whole ray");

  // extrapolate in sqrt(delta): handles both analytic branches and
  // square-root branch behaviour at collision points
  const int tail = 8;
  std::vector<long double> ut(u.end() - tail, u.end());
  std::vector<CxL> kt(kap.end() - tail, kap.end());
  out.kappa = detail::extrapolate_to_zero(ut, kt);

  // branch derivative
  long double scale = 0;
  for (int k = 0; k <= Pk.deg(); ++k)
    scale += std::abs(ceval(Pk.coeff(k), zc)) * std::pow(std::abs(out.kappa), k);
  CxL pk = bi_ceval(Pk, zc, out.kappa);
  if (std::abs(pk) > 1e-6L * (scale + 1)) {
    out.dkdz = -bi_ceval(Pz, zc, out.kappa) / pk;
    return out;
  }

  out.doubleRoot = true;
  long double zscale = 0;
  for (int k = 0; k <= Pz.deg(); ++k)
    zscale += std::abs(ceval(Pz.coeff(k), zc)) * std::pow(std::abs(out.kappa), k);
  CxL pz = bi_ceval(Pz, zc, out.kappa);
  if (std::abs(pz) > 1e-6L * (zscale + 1)) {
    // gradient does not vanish: vertical tangent of the branch
    out.turningPoint = true;
    out.dkdz = CxL(std::numeric_limits<long double>::infinity(), 0);
    return out;
  }

  // ordinary double point: slopes solve (Pkk/2) a^2 + Pzk a + Pzz/2 = 0
  CxL A = bi_ceval(bi_dkappa(Pk), zc, out.kappa) / CxL(2, 0);
  CxL B = bi_ceval(bi_dz(Pk), zc, out.kappa);
  CxL Cc = bi_ceval(bi_dz(Pz), zc, out.kappa) / CxL(2, 0);
  if (std::abs(A) < 1e-14L * (1 + std::abs(B) + std::abs(Cc)))
    throw SchemeError("double root is not an ordinary node");
  CxL disc = std::sqrt(B * B - CxL(4, 0) * A * Cc);
  CxL a1 = (-B + disc) / (CxL(2, 0) * A);
  CxL a2 = (-B - disc) / (CxL(2, 0) * A);
  // pick the slope matching the sampled stable branch
  CxL m = (kap[levels - 1] - out.kappa) / (zc * CxL(delta[levels - 1], 0));
  out.dkdz = (std::abs(a1 - m) <= std::abs(a2 - m)) ? a1 : a2;
  return out;
}

}  // namespace lbstab
