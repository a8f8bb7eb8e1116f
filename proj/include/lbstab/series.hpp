#pragma once

#include "lbstab/kl.hpp"
#include "lbstab/poly.hpp"

#include <optional>

namespace lbstab {

// Element of the quadratic extension Q(sqrt(D)): a + b*sqrt(D).
// D is carried per value; values with b == 0 are plain rationals and mix
// freely, otherwise both operands must agree on D.
struct QuadExt {
  Rat a, b, D;

  QuadExt() : a(0), b(0), D(0) {}
  QuadExt(int v) : a(v), b(0), D(0) {}
  QuadExt(Rat v) : a(std::move(v)), b(0), D(0) {}
  QuadExt(Rat a_, Rat b_, Rat D_) : a(std::move(a_)), b(std::move(b_)), D(std::move(D_)) {
    if (b == 0) D = 0;
  }

  static Rat merge_d(const QuadExt& x, const QuadExt& y) {
    if (x.b == 0) return y.D;
    if (y.b == 0) return x.D;
    if (x.D != y.D) throw std::runtime_error("mixed quadratic extensions");
    return x.D;
  }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a + y.a, x.b + y.b, merge_d(x, y));
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a - y.a, x.b - y.b, merge_d(x, y));
  }
  friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a, -x.b, x.D); }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    Rat d = merge_d(x, y);
    return QuadExt(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
  }
  QuadExt inv() const {
    Rat n = a * a - b * b * D;
    if (n == 0) throw std::runtime_error("non-invertible quadratic element");
    return QuadExt(a / n, -b / n, D);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inv(); }
  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.a == y.a && x.b == y.b && (x.b == 0 || x.D == y.D);
  }
};

inline CxL to_cxl(const QuadExt& x) {
  long double d = to_ldouble(x.D);
  CxL rad = d >= 0 ? CxL(std::sqrt(d), 0.0L) : CxL(0.0L, std::sqrt(-d));
  return CxL(to_ldouble(x.a), 0.0L) + to_ldouble(x.b) * rad;
}

// Truncated power series in one variable: coefficients of w^0..w^{len-1}.
template <class F>
struct TSeries {
  std::vector<F> c;

  explicit TSeries(int n) : c(static_cast<std::size_t>(n)) {}
  static TSeries constant(int n, F v) {
    TSeries s(n);
    s.c[0] = std::move(v);
    return s;
  }
  static TSeries var(int n) {
    TSeries s(n);
    if (n > 1) s.c[1] = F(1);
    return s;
  }

  int len() const { return static_cast<int>(c.size()); }

  // smallest index with nonzero coefficient, or len() if none
  int valuation() const {
    for (int k = 0; k < len(); ++k)
      if (!(c[static_cast<std::size_t>(k)] == F{})) return k;
    return len();
  }

  friend TSeries operator+(const TSeries& x, const TSeries& y) {
    TSeries r(std::min(x.len(), y.len()));
    for (int k = 0; k < r.len(); ++k) r.c[k] = x.c[k] + y.c[k];
    return r;
  }
  friend TSeries operator-(const TSeries& x, const TSeries& y) {
    TSeries r(std::min(x.len(), y.len()));
    for (int k = 0; k < r.len(); ++k) r.c[k] = x.c[k] - y.c[k];
    return r;
  }
  friend TSeries operator-(const TSeries& x) {
    TSeries r = x;
    for (auto& v : r.c) v = -v;
    return r;
  }
  friend TSeries operator*(const TSeries& x, const TSeries& y) {
    TSeries r(std::min(x.len(), y.len()));
    for (int i = 0; i < r.len(); ++i) {
      if (x.c[i] == F{}) continue;
      for (int j = 0; i + j < r.len(); ++j) r.c[i + j] = r.c[i + j] + x.c[i] * y.c[j];
    }
    return r;
  }
  friend TSeries operator*(const F& s, const TSeries& x) {
    TSeries r = x;
    for (auto& v : r.c) v = s * v;
    return r;
  }

  // requires c[0] != 0
  TSeries inv() const {
    if (c[0] == F{}) throw std::runtime_error("series inverse of non-unit");
    TSeries r(len());
    F u = F(1) / c[0];
    r.c[0] = u;
    for (int k = 1; k < len(); ++k) {
      F s{};
      for (int j = 1; j <= k; ++j) s = s + c[j] * r.c[k - j];
      r.c[k] = -(u * s);
    }
    return r;
  }

  TSeries truncated(int n) const {
    TSeries r(n);
    for (int k = 0; k < n && k < len(); ++k) r.c[k] = c[k];
    return r;
  }
};

// Truncated Laurent expansion: sum of c[k]*w^(off+k); known modulo w^(off+len).
template <class F>
struct Laurent {
  int off = 0;
  std::vector<F> c;

  Laurent() = default;
  Laurent(int off_, std::vector<F> c_) : off(off_), c(std::move(c_)) {}
  explicit Laurent(const TSeries<F>& s) : off(0), c(s.c) {}

  int len() const { return static_cast<int>(c.size()); }
  int upper() const { return off + len(); }  // first unknown power

  F at(int power) const {
    int k = power - off;
    if (k < 0 || k >= len()) return F{};
    return c[static_cast<std::size_t>(k)];
  }

  // drop exact leading zeros; fails if the whole window is zero
  Laurent normalized() const {
    int k = 0;
    while (k < len() && c[static_cast<std::size_t>(k)] == F{}) ++k;
    if (k == len()) throw std::runtime_error("Laurent window is identically zero");
    return Laurent(off + k, std::vector<F>(c.begin() + k, c.end()));
  }

  int order() const { return normalized().off; }
  F leading() const { return normalized().c[0]; }

  friend Laurent operator+(const Laurent& x, const Laurent& y) {
    if (x.len() == 0) return y;
    if (y.len() == 0) return x;
    int off = std::min(x.off, y.off);
    int up = std::min(x.upper(), y.upper());
    Laurent r(off, std::vector<F>(static_cast<std::size_t>(std::max(0, up - off))));
    for (int p = off; p < up; ++p) r.c[p - off] = x.at(p) + y.at(p);
    return r;
  }
  friend Laurent operator-(const Laurent& x, const Laurent& y) {
    Laurent ny = y;
    for (auto& v : ny.c) v = -v;
    return x + ny;
  }
  friend Laurent operator*(const Laurent& x, const Laurent& y) {
    int n = std::min(x.len(), y.len());
    Laurent r(x.off + y.off, std::vector<F>(static_cast<std::size_t>(std::max(0, n))));
    for (int i = 0; i < std::min<int>(n, x.len()); ++i) {
      if (x.c[i] == F{}) continue;
      for (int j = 0; i + j < n && j < y.len(); ++j) r.c[i + j] = r.c[i + j] + x.c[i] * y.c[j];
    }
    return r;
  }
  friend Laurent operator*(const F& s, const Laurent& x) {
    Laurent r = x;
    for (auto& v : r.c) v = s * v;
    return r;
  }

  Laurent inv() const {
    Laurent nz = normalized();
    TSeries<F> unit(nz.len());
    unit.c = nz.c;
    TSeries<F> iu = unit.inv();
    return Laurent(-nz.off, iu.c);
  }

  Laurent pow(int e) const {
    if (e < 0) return inv().pow(-e);
    Laurent acc(0, std::vector<F>(c.size(), F{}));
    if (!acc.c.empty()) acc.c[0] = F(1);
    Laurent b = *this;
    while (e > 0) {
      if (e & 1) acc = acc * b;
      b = b * b;
      e >>= 1;
    }
    return acc;
  }
};

// ---- branch expansions of P(z, kappa) = 0 around a point (z0, kappa0) ----
//
// All expansions are in w = z - z0.

template <class F>
F beval(const BiPoly& P, const Rat& z0, const F& k0) {
  F acc{};
  for (auto it = P.c.rbegin(); it != P.c.rend(); ++it) acc = acc * k0 + F((*it)(z0));
  return acc;
}

// P(z0 + w, S(w)) as a truncated series in w.
template <class F>
TSeries<F> eval_bipoly_at_series(const BiPoly& P, const Rat& z0, const TSeries<F>& kap) {
  int n = kap.len();
  TSeries<F> acc(n);
  for (int j = P.deg(); j >= 0; --j) {
    acc = acc * kap;
    RatPoly cj = P.coeff(j).taylor_shift(z0);
    for (int k = 0; k < n && k <= cj.deg(); ++k) acc.c[k] = acc.c[k] + F(cj.coeff(k));
  }
  return acc;
}

// Simple root in kappa: d/dkappa P(z0, kappa0) != 0.
template <class F>
TSeries<F> series_root_simple(const BiPoly& P, const Rat& z0, const F& k0, int order) {
  if (!(beval(P, z0, k0) == F{}))
    throw std::runtime_error("expansion point is not a root");
  BiPoly Pk = P.derivative();
  F mu = beval(Pk, z0, k0);
  if (mu == F{}) throw std::runtime_error("root is not simple in kappa");
  TSeries<F> s = TSeries<F>::constant(order + 1, k0);
  for (int m = 1; m <= order; ++m) {
    TSeries<F> r = eval_bipoly_at_series(P, z0, s);
    s.c[m] = -(r.c[m] / mu);
  }
  return s;
}

// Double root in kappa splitting into two branches with distinct slopes.
// The slopes solve (1/2)P_kk a^2 + P_zk a + (1/2)P_zz = 0 at (z0, kappa0).
struct SlopePair {
  QuadExt s1, s2;
};

inline SlopePair double_root_slopes(const BiPoly& P, const Rat& z0, const Rat& k0) {
  BiPoly Pk = P.derivative();
  BiPoly Pkk = Pk.derivative();
  BiPoly Pz = bi_dz(P);
  BiPoly Pzk = bi_dz(Pk);
  BiPoly Pzz = bi_dz(Pz);
  if (bi_eval(P, z0, k0) != 0 || bi_eval(Pk, z0, k0) != 0 || bi_eval(Pz, z0, k0) != 0)
    throw std::runtime_error("not a node: gradient does not vanish");
  Rat A = bi_eval(Pkk, z0, k0) / 2;
  Rat B = bi_eval(Pzk, z0, k0);
  Rat C = bi_eval(Pzz, z0, k0) / 2;
  if (A == 0) throw std::runtime_error("branch point is not an ordinary double root");
  Rat disc = B * B - 4 * A * C;
  Rat root;
  if (rat_sqrt(disc, root))
    return {QuadExt((-B + root) / (2 * A)), QuadExt((-B - root) / (2 * A))};
  return {QuadExt(-B / (2 * A), Rat(1) / (2 * A), disc),
          QuadExt(-B / (2 * A), Rat(-1) / (2 * A), disc)};
}

template <class F>
TSeries<F> series_root_double(const BiPoly& P, const Rat& z0, const F& k0, const F& slope,
                              int order) {
  int n = order + 2;  // matching at w^(m+1) needs one spare coefficient
  BiPoly Pk = P.derivative();
  TSeries<F> s = TSeries<F>::constant(n, k0);
  s.c[1] = slope;
  F mu = eval_bipoly_at_series(Pk, z0, s).c[1];
  if (mu == F{}) throw std::runtime_error("branch slopes are not distinct");
  for (int m = 2; m <= order; ++m) {
    TSeries<F> r = eval_bipoly_at_series(P, z0, s);
    s.c[m] = -(r.c[m + 1] / mu);
  }
  return s.truncated(order + 1);
}

// ---- exact expansion of the boundary scalar at a rational circle point ----
//
// Second route to the radial fits: the stable spatial root becomes a
// truncated power series in w = z - z0 over Q or a quadratic extension, the
// boundary-layer eigenvector a vector of Laurent windows, and the scalar a
// Laurent window whose order and leading coefficient are exact.

template <class F>
F feval(const RatPoly& p, const F& x) {
  F acc{};
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * x + F(*it);
  return acc;
}

inline int root_multiplicity(RatPoly p, const QuadExt& x) {
  int m = 0;
  while (!p.zero() && feval(p, x) == QuadExt()) {
    ++m;
    p = p.derivative();
  }
  return m;
}

// Exact value of a numerically known root of a rational polynomial, when the
// root is rational or quadratic over Q. Verified by substitution.
inline QuadExt recognize_root(const RatPoly& p, const CxL& target) {
  if (p.zero()) throw std::runtime_error("cannot recognize a root of the zero polynomial");
  if (std::abs(target.imag()) <= 1e-8L) {
    try {
      Rat r = rat_nearest(target.real());
      if (std::abs(to_cxl(r) - target) < 1e-6L && p(r) == 0) return QuadExt(r);
    } catch (const BadRational&) {
    }
  }
  // deflate every verified rational root; the leftover factor must be linear
  // or quadratic for the target to live in a quadratic extension
  RatPoly rem = p;
  for (const CxL& nr : poly_roots(p)) {
    if (rem.deg() < 2) break;
    if (std::abs(nr.imag()) > 1e-8L) continue;
    Rat r;
    try {
      r = rat_nearest(nr.real());
    } catch (const BadRational&) {
      continue;
    }
    if (std::abs(to_cxl(r) - nr) > 1e-6L || p(r) != 0) continue;
    RatPoly lin{-r, Rat(1)};
    for (;;) {
      auto [quo, res] = divmod(rem, lin);
      if (!res.zero() || quo.zero()) break;
      rem = quo;
      if (rem.deg() < 1) break;
    }
  }
  std::vector<QuadExt> cands;
  if (rem.deg() == 1) cands.emplace_back(-rem.coeff(0) / rem.coeff(1));
  if (rem.deg() == 2) {
    Rat a = rem.coeff(2), b = rem.coeff(1), c = rem.coeff(0);
    Rat disc = b * b - 4 * a * c, root;
    if (rat_sqrt(disc, root)) {
      cands.emplace_back((-b + root) / (2 * a));
      cands.emplace_back((-b - root) / (2 * a));
    } else {
      cands.emplace_back(-b / (2 * a), Rat(1) / (2 * a), disc);
      cands.emplace_back(-b / (2 * a), Rat(-1) / (2 * a), disc);
    }
  }
  for (const QuadExt& cand : cands)
    if (std::abs(to_cxl(cand) - target) < 1e-6L && feval(p, cand) == QuadExt()) return cand;
  throw std::runtime_error("root is neither rational nor quadratic over the rationals");
}

// Stable spatial branch at a rational point on or outside the unit circle.
struct ExactBranch {
  QuadExt kappa0;
  int multiplicity = 1;
  TSeries<QuadExt> kappa{1};
};

inline ExactBranch stable_branch_series(const CharSystem& cs, const Rat& z0, int order) {
  if (cs.rBar() != 1) throw SchemeError("stable branch is not scalar (rBar != 1)");
  const BiPoly P = bi_primitive(cs.full());
  const CxL zc = to_cxl(z0);
  if (std::abs(zc) < 1 - 1e-12L)
    throw SchemeError("branch expansion expects a point on or outside the unit circle");
  Continuation cont = stable_root_continuation(cs, zc);
  if (cont.turningPoint)
    throw SchemeError("vertical tangent: the spatial root has no power series here");
  if (std::abs(cont.kappa) < 1e-9L)
    throw SchemeError("stable root vanishes at the expansion point");

  RatPoly slice;
  for (int k = 0; k <= P.deg(); ++k) slice.c.push_back(P.coeff(k)(z0));
  slice.trim();

  ExactBranch br;
  br.kappa0 = recognize_root(slice, cont.kappa);
  br.multiplicity = root_multiplicity(slice, br.kappa0);
  if (br.multiplicity == 1) {
    br.kappa = series_root_simple<QuadExt>(P, z0, br.kappa0, order);
  } else if (br.multiplicity == 2) {
    if (br.kappa0.b != 0)
      throw SchemeError("node at an irrational spatial root is not supported");
    SlopePair sl = double_root_slopes(P, z0, br.kappa0.a);
    long double d1 = std::abs(to_cxl(sl.s1) - cont.dkdz);
    long double d2 = std::abs(to_cxl(sl.s2) - cont.dkdz);
    if (std::min(d1, d2) > 1e-5L * (1 + std::abs(cont.dkdz)))
      throw SchemeError("no branch slope matches the radial continuation");
    br.kappa = series_root_double<QuadExt>(P, z0, br.kappa0, d1 <= d2 ? sl.s1 : sl.s2, order);
  } else {
    throw SchemeError("spatial root multiplicity beyond a node is not supported");
  }
  return br;
}

// Exact window of the boundary scalar along z = z0 + w, with the
// boundary-layer eigenvector (first component normalized to one) alongside.
struct KlSeries {
  QuadExt kappa0;
  int multiplicity = 1;
  TSeries<QuadExt> kappa{1};
  std::vector<Laurent<QuadExt>> phi;
  std::vector<int> phiOrder;
  Laurent<QuadExt> value;
};

inline KlSeries kl_series(const SchemeSpec& spec, const CharSystem& cs, const BoundarySpec& bc,
                          const Rat& z0, int order = 8) {
  spec.validate();
  bc.validate(spec);
  const int q = spec.q;
  const int pi = incoming_index(spec);
  const auto A = detail::bulk_bipoly_matrix(spec);

  // adjugate entry adj(i, c) of A along the branch; any nonzero column of the
  // adjugate spans the kernel of A on the characteristic variety
  auto adj_entry = [&](int i, int c, const TSeries<QuadExt>& kap) {
    std::vector<std::vector<BiPoly>> minor;
    minor.reserve(static_cast<std::size_t>(q - 1));
    for (int r = 0; r < q; ++r) {
      if (r == c) continue;
      std::vector<BiPoly> mrow;
      mrow.reserve(static_cast<std::size_t>(q - 1));
      for (int col = 0; col < q; ++col)
        if (col != i) mrow.push_back(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
      minor.push_back(std::move(mrow));
    }
    TSeries<QuadExt> d = eval_bipoly_at_series(bipoly_det(minor), z0, kap);
    if ((i + c) % 2) d = -d;
    return d;
  };

  // first adjugate column that stays nonzero along the branch
  auto kernel_column = [&](const TSeries<QuadExt>& kap) {
    const int L = kap.len();
    for (int c = 0; c < q; ++c) {
      std::vector<TSeries<QuadExt>> col;
      bool nonzero = false;
      for (int i = 0; i < q; ++i) {
        col.push_back(adj_entry(i, c, kap));
        if (col.back().valuation() < L) nonzero = true;
      }
      if (nonzero) return col;
    }
    throw SchemeError("boundary-layer eigenvector vanishes along the branch");
  };

  ExactBranch br = stable_branch_series(cs, z0, order);
  std::vector<TSeries<QuadExt>> N = kernel_column(br.kappa);
  int v0 = N[0].valuation();
  if (v0 >= br.kappa.len())
    throw SchemeError("eigenvector normalization breaks down: first component vanishes");
  if (v0 > 0) {
    // Laurent division eats 2 v0 known coefficients; redo with a longer window
    br = stable_branch_series(cs, z0, order + 2 * v0);
    N = kernel_column(br.kappa);
  }

  KlSeries out;
  out.kappa0 = br.kappa0;
  out.multiplicity = br.multiplicity;
  out.kappa = br.kappa;

  Laurent<QuadExt> invN0 = Laurent<QuadExt>(N[0]).inv();
  for (int i = 0; i < q; ++i) {
    Laurent<QuadExt> p = Laurent<QuadExt>(N[static_cast<std::size_t>(i)]) * invN0;
    bool zero = true;
    for (const auto& coef : p.c)
      if (!(coef == QuadExt())) zero = false;
    out.phiOrder.push_back(zero ? 0 : std::max(0, -p.order()));
    out.phi.push_back(std::move(p));
  }

  RatMat MinvK = spec.M.inverse() * relaxation_matrix(spec);
  Laurent<QuadExt> lk{Laurent<QuadExt>(br.kappa)};
  Laurent<QuadExt> total;
  for (int i = 0; i < q; ++i) {
    // ghost row: population pi reads its depth-1 ghost through the boundary
    Laurent<QuadExt> row;
    if (i == pi) row = lk.pow(-1);
    for (const auto& w : bc.weights) {
      if (w.i != pi || w.j != 1 || w.l != i || w.value == 0) continue;
      row = row - QuadExt(w.value) * lk.pow(w.h);
    }
    if (row.len() == 0) continue;
    Laurent<QuadExt> psi;
    for (int j = 0; j < q; ++j) {
      if (MinvK(i, j) == 0) continue;
      psi = psi + QuadExt(MinvK(i, j)) * out.phi[static_cast<std::size_t>(j)];
    }
    total = total + row * psi;
  }
  out.value = total;
  return out;
}

inline KlSeries kl_series(const SchemeSpec& spec, const BoundarySpec& bc, const Rat& z0,
                          int order = 8) {
  CharSystem cs = characteristic_coeffs(spec);
  return kl_series(spec, cs, bc, z0, order);
}

}  // namespace lbstab
