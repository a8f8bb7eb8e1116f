#pragma once

#include "lbstab/poly.hpp"
#include "lbstab/scheme.hpp"

#include <utility>
#include <vector>

namespace lbstab {

// Characteristic equation of the bulk scheme,
//   det(zI - E(kappa)) = sum_{l=-rBar}^{pBar} d_l(z) kappa^l,
// stored with identically-zero extreme coefficients trimmed away.
struct CharSystem {
  std::vector<RatPoly> d;  // d[k] = d_{lo+k}(z)
  int lo = 0;

  int rBar() const { return -lo; }
  int pBar() const { return lo + static_cast<int>(d.size()) - 1; }
  bool has(int l) const { return l >= lo && l <= pBar(); }
  const RatPoly& at(int l) const {
    if (!has(l)) throw SchemeError("characteristic coefficient index out of range");
    return d[static_cast<std::size_t>(l - lo)];
  }

  // P(kappa, z) = kappa^rBar * det(zI - E(kappa)), polynomial in both variables
  BiPoly full() const {
    BiPoly p;
    p.c = d;
    p.trim();
    return p;
  }

  // coefficients (low to high in kappa) of P(kappa, z) at fixed z
  CVec kappa_poly_at(CxL z) const {
    CVec v(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) v[k] = ceval(to_cvec(d[k]), z);
    return v;
  }

  // coefficients (low to high in z) of det(zI - E(kappa)) at fixed kappa != 0
  CVec z_poly_at(CxL kappa) const {
    if (kappa == CxL(0)) throw SchemeError("kappa = 0 not admissible");
    int degz = 0;
    for (const RatPoly& p : d) degz = std::max(degz, p.deg());
    CVec v(static_cast<std::size_t>(degz) + 1, CxL(0));
    CxL kl = std::pow(kappa, static_cast<long double>(lo));
    for (std::size_t k = 0; k < d.size(); ++k) {
      for (int m = 0; m <= d[k].deg(); ++m)
        v[static_cast<std::size_t>(m)] += to_cxl(d[k].coeff(m)) * kl;
      kl *= kappa;
    }
    return v;
  }
};

// Determinant of a small matrix with bivariate polynomial entries,
// by Laplace expansion along the first column.
inline BiPoly bipoly_det(const std::vector<std::vector<BiPoly>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return BiPoly(RatPoly(Rat(1)));
  if (n == 1) return a[0][0];
  BiPoly det;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i][0].zero()) continue;
    std::vector<std::vector<BiPoly>> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      minor.emplace_back(a[r].begin() + 1, a[r].end());
    }
    BiPoly term = a[i][0] * bipoly_det(minor);
    if (i % 2)
      det = det - term;
    else
      det = det + term;
  }
  return det;
}

namespace detail {

// entries of kappa^r (zI - E(kappa)): polynomials in kappa and z
inline std::vector<std::vector<BiPoly>> bulk_bipoly_matrix(const SchemeSpec& spec) {
  const int q = spec.q;
  const int r = spec.r();
  RatPencil pen = bulk_pencil(spec);
  std::vector<std::vector<BiPoly>> a(static_cast<std::size_t>(q),
                                     std::vector<BiPoly>(static_cast<std::size_t>(q)));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      BiPoly e;
      if (i == j) e = BiPoly(RatPoly::x()).shifted(r);
      for (int l = pen.lo; l <= pen.hi(); ++l) {
        Rat v = pen.at(l)(i, j);
        if (v != 0) e = e - BiPoly(RatPoly(v)).shifted(l + r);
      }
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(e);
    }
  return a;
}

}  // namespace detail

inline CharSystem characteristic_coeffs(const SchemeSpec& spec) {
  spec.validate();
  const int q = spec.q;
  const int r = spec.r();
  std::vector<std::vector<BiPoly>> a = detail::bulk_bipoly_matrix(spec);

  BiPoly det = bipoly_det(a);  // equals kappa^{q r} det(zI - E(kappa))
  if (det.zero()) throw SchemeError("characteristic determinant vanished identically");

  std::size_t first = 0;
  while (first < det.c.size() && det.c[first].zero()) ++first;
  CharSystem cs;
  cs.lo = static_cast<int>(first) - q * r;
  cs.d.assign(det.c.begin() + static_cast<std::ptrdiff_t>(first), det.c.end());
  return cs;
}

// det(zI - sum_l B_{0,l} kappa^l) for the ghost row of the boundary scheme
inline BiPoly boundary_char_poly(const SchemeSpec& spec, const BoundarySpec& bc) {
  const int q = spec.q;
  RatPencil pen = boundary_pencil(spec, bc, 0);
  std::vector<std::vector<BiPoly>> a(static_cast<std::size_t>(q),
                                     std::vector<BiPoly>(static_cast<std::size_t>(q)));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      BiPoly e;
      if (i == j) e = BiPoly(RatPoly::x());
      for (int l = pen.lo; l <= pen.hi(); ++l) {
        Rat v = pen.at(l)(i, j);
        if (v != 0) e = e - BiPoly(RatPoly(v)).shifted(l);
      }
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(e);
    }
  return bipoly_det(a);
}

}  // namespace lbstab
