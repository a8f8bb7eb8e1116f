#pragma once

#include "lbstab/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace lbstab {

// Dense univariate polynomial, coefficients stored low to high.
// Invariant: no trailing zero coefficients (zero polynomial = empty vector).
template <class T>
struct Poly {
  std::vector<T> c;

  Poly() = default;
  explicit Poly(T v) {
    if (!(v == T{})) c.push_back(std::move(v));
  }
  Poly(std::initializer_list<T> list) : c(list) { trim(); }
  explicit Poly(std::vector<T> v) : c(std::move(v)) { trim(); }

  static Poly x() {
    Poly p;
    p.c = {T{}, T(1)};
    return p;
  }

  void trim() {
    while (!c.empty() && c.back() == T{}) c.pop_back();
  }

  bool zero() const { return c.empty(); }
  int deg() const { return static_cast<int>(c.size()) - 1; }
  const T& lead() const { return c.back(); }
  T coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c.size())) return T{};
    return c[static_cast<std::size_t>(k)];
  }

  T operator()(const T& x) const {
    T acc{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Poly derivative() const {
    Poly d;
    for (int k = 1; k <= deg(); ++k) d.c.push_back(c[k] * T(k));
    d.trim();
    return d;
  }

  // P(x + a), by repeated synthetic division.
  Poly taylor_shift(const T& a) const {
    std::vector<T> w = c;
    Poly out;
    out.c.assign(c.size(), T{});
    for (std::size_t k = 0; k < c.size(); ++k) {
      for (std::size_t i = w.size(); i-- > 1;) w[i - 1] = w[i - 1] + w[i] * a;
      out.c[k] = w.empty() ? T{} : w.front();
      if (!w.empty()) w.erase(w.begin());
    }
    out.trim();
    return out;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (std::size_t k = 0; k < r.c.size(); ++k) {
      if (k < a.c.size()) r.c[k] = r.c[k] + a.c[k];
      if (k < b.c.size()) r.c[k] = r.c[k] + b.c[k];
    }
    r.trim();
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (std::size_t k = 0; k < r.c.size(); ++k) {
      if (k < a.c.size()) r.c[k] = r.c[k] + a.c[k];
      if (k < b.c.size()) r.c[k] = r.c[k] - b.c[k];
    }
    r.trim();
    return r;
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& v : r.c) v = T{} - v;
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.zero() || b.zero()) return Poly{};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, T{});
    for (std::size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i] == T{}) continue;
      for (std::size_t j = 0; j < b.c.size(); ++j)
        r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    }
    r.trim();
    return r;
  }
  friend Poly operator*(const T& s, const Poly& a) {
    Poly r;
    for (const auto& v : a.c) r.c.push_back(s * v);
    r.trim();
    return r;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }

  Poly shifted(int k) const {  // multiply by x^k
    if (zero()) return {};
    Poly r;
    r.c.assign(c.size() + static_cast<std::size_t>(k), T{});
    std::copy(c.begin(), c.end(), r.c.begin() + k);
    return r;
  }

  Poly pow(int e) const {
    Poly acc(T(1)), b = *this;
    while (e > 0) {
      if (e & 1) acc = acc * b;
      b = b * b;
      e >>= 1;
    }
    return acc;
  }
};

using RatPoly = Poly<Rat>;
// Bivariate: polynomial in kappa whose coefficients live in Q[z].
using BiPoly = Poly<RatPoly>;

template <class T>
std::pair<Poly<T>, Poly<T>> divmod(const Poly<T>& a, const Poly<T>& b) {
  if (b.zero()) throw std::runtime_error("polynomial division by zero");
  Poly<T> r = a, q;
  if (a.deg() >= b.deg()) q.c.assign(static_cast<std::size_t>(a.deg() - b.deg()) + 1, T{});
  while (!r.zero() && r.deg() >= b.deg()) {
    T f = r.lead() / b.lead();
    int s = r.deg() - b.deg();
    q.c[static_cast<std::size_t>(s)] = f;
    for (int k = 0; k <= b.deg(); ++k)
      r.c[static_cast<std::size_t>(k + s)] = r.c[static_cast<std::size_t>(k + s)] - f * b.c[static_cast<std::size_t>(k)];
    r.trim();
  }
  q.trim();
  return {q, r};
}

inline RatPoly exact_div(const RatPoly& a, const RatPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.zero()) throw std::runtime_error("inexact polynomial division");
  return q;
}

inline RatPoly monic(RatPoly p) {
  if (p.zero()) return p;
  Rat inv = Rat(1) / p.lead();
  for (auto& v : p.c) v *= inv;
  return p;
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
  while (!b.zero()) {
    auto [q, r] = divmod(a, b);
    (void)q;
    a = std::move(b);
    b = monic(std::move(r));
  }
  return monic(std::move(a));
}

inline std::string poly_str(const RatPoly& p, const std::string& var = "z") {
  if (p.zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = p.deg(); k >= 0; --k) {
    Rat ck = p.coeff(k);
    if (ck == 0) continue;
    if (!first) os << (ck > 0 ? " + " : " - ");
    else if (ck < 0)
      os << "-";
    Rat mag = abs(ck);
    first = false;
    if (mag != 1 || k == 0) os << rat_str(mag);
    if (k > 0) {
      if (mag != 1) os << "*";
      os << var;
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

inline std::string bipoly_str(const BiPoly& p, const std::string& kv = "k") {
  if (p.zero()) return "0";
  std::ostringstream os;
  for (int k = 0; k <= p.deg(); ++k) {
    if (p.coeff(k).zero()) continue;
    if (os.tellp() > 0) os << " + ";
    os << "(" << poly_str(p.coeff(k)) << ")";
    if (k > 0) os << "*" << kv << (k > 1 ? "^" + std::to_string(k) : "");
  }
  return os.str();
}

// ---- bivariate helpers (outer variable kappa, inner z) ----

inline BiPoly bi_dz(const BiPoly& p) {
  BiPoly r;
  for (const auto& ck : p.c) r.c.push_back(ck.derivative());
  r.trim();
  return r;
}

inline RatPoly bi_eval_kappa(const BiPoly& p, const Rat& kappa) {
  RatPoly acc;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = Poly(kappa) * acc + *it;
  return acc;
}

inline Rat bi_eval(const BiPoly& p, const Rat& z, const Rat& kappa) {
  Rat acc = 0;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * kappa + (*it)(z);
  return acc;
}

inline BiPoly bi_dkappa(const BiPoly& p) { return p.derivative(); }

inline CxL ceval(const RatPoly& p, const CxL& z) {
  CxL acc = 0;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * z + to_cxl(*it);
  return acc;
}

inline CxL bi_ceval(const BiPoly& p, const CxL& z, const CxL& kappa) {
  CxL acc = 0;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * kappa + ceval(*it, z);
  return acc;
}

// Pseudo-remainder of a by b in kappa; exact over Q[z].
inline BiPoly prem(BiPoly a, const BiPoly& b) {
  if (b.zero()) throw std::runtime_error("prem by zero");
  while (!a.zero() && a.deg() >= b.deg()) {
    RatPoly la = a.lead(), lb = b.lead();
    int s = a.deg() - b.deg();
    a = lb * a - la * b.shifted(s);
  }
  return a;
}

inline RatPoly bi_content(const BiPoly& p) {
  RatPoly g;
  for (const auto& ck : p.c) g = poly_gcd(g, ck);
  return g;
}

inline BiPoly bi_primitive(const BiPoly& p) {
  if (p.zero()) return p;
  RatPoly g = bi_content(p);
  BiPoly r;
  for (const auto& ck : p.c) r.c.push_back(ck.zero() ? RatPoly{} : exact_div(ck, g));
  r.trim();
  return r;
}

// gcd in kappa over Q(z), returned primitive; content gcd folded back in.
inline BiPoly bi_gcd_kappa(BiPoly a, BiPoly b) {
  if (a.zero()) return bi_primitive(b);
  if (b.zero()) return bi_primitive(a);
  RatPoly cg = poly_gcd(bi_content(a), bi_content(b));
  a = bi_primitive(a);
  b = bi_primitive(b);
  while (!b.zero()) {
    BiPoly r = bi_primitive(prem(a, b));
    a = std::move(b);
    b = std::move(r);
  }
  BiPoly g;
  for (const auto& ck : a.c) g.c.push_back(cg * ck);
  g.trim();
  return g;
}

// Resultant in kappa of two bivariate polynomials, exact over Q[z].
// Sylvester determinant by fraction-free Bareiss elimination.
inline RatPoly resultant_kappa(const BiPoly& P, const BiPoly& Q) {
  int m = P.deg(), n = Q.deg();
  if (P.zero() || Q.zero()) return RatPoly{};
  if (m == 0 && n == 0) return RatPoly(Rat(1));
  if (m == 0) return P.coeff(0).pow(n);
  if (n == 0) return Q.coeff(0).pow(m);

  int N = m + n;
  std::vector<std::vector<RatPoly>> S(static_cast<std::size_t>(N),
                                      std::vector<RatPoly>(static_cast<std::size_t>(N)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) S[i][i + k] = P.coeff(m - k);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) S[n + i][i + k] = Q.coeff(n - k);

  int sign = 1;
  RatPoly prev(Rat(1));
  for (int k = 0; k + 1 < N; ++k) {
    if (S[k][k].zero()) {
      int piv = -1;
      for (int i = k + 1; i < N; ++i)
        if (!S[i][k].zero()) {
          piv = i;
          break;
        }
      if (piv < 0) return RatPoly{};
      std::swap(S[k], S[static_cast<std::size_t>(piv)]);
      sign = -sign;
    }
    for (int i = k + 1; i < N; ++i) {
      for (int j = k + 1; j < N; ++j)
        S[i][j] = exact_div(S[i][j] * S[k][k] - S[i][k] * S[k][j], prev);
      S[i][k] = RatPoly{};
    }
    prev = S[k][k];
  }
  RatPoly det = S[N - 1][N - 1];
  return sign < 0 ? -det : det;
}

// ---- exact unit-disk root location (Schur-Cohn / Miller recursions) ----

namespace detail {

inline RatPoly reciprocal_adjoint(const RatPoly& p) {
  RatPoly r;
  r.c.assign(p.c.rbegin(), p.c.rend());
  r.trim();
  return r;
}

// (lc(p)*p - p(0)*p*)/z; constant term cancels exactly.
inline RatPoly schur_transform(const RatPoly& p) {
  RatPoly ps = reciprocal_adjoint(p);
  RatPoly num = p.lead() * p - p.coeff(0) * ps;
  if (num.zero()) return num;
  RatPoly r;
  r.c.assign(num.c.begin() + 1, num.c.end());
  r.trim();
  return r;
}

}  // namespace detail

// All roots strictly inside the unit disk.
inline bool schur_stable_exact(const RatPoly& p) {
  if (p.zero()) throw std::runtime_error("root location of zero polynomial");
  if (p.deg() == 0) return true;
  if (abs(p.coeff(0)) >= abs(p.lead())) return false;
  return schur_stable_exact(detail::schur_transform(p));
}

// All roots in the closed unit disk.
inline bool von_neumann_exact(const RatPoly& p) {
  if (p.zero()) throw std::runtime_error("root location of zero polynomial");
  if (p.deg() == 0) return true;
  RatPoly p1 = detail::schur_transform(p);
  if (p1.zero()) return von_neumann_exact(p.derivative());
  if (abs(p.coeff(0)) >= abs(p.lead())) return false;
  return von_neumann_exact(p1);
}

// All roots in the closed unit disk, with unit-circle roots simple.
inline bool simple_von_neumann_exact(const RatPoly& p) {
  if (p.zero()) throw std::runtime_error("root location of zero polynomial");
  if (p.deg() == 0) return true;
  RatPoly p1 = detail::schur_transform(p);
  if (p1.zero()) return schur_stable_exact(p.derivative());
  if (abs(p.coeff(0)) >= abs(p.lead())) return false;
  return simple_von_neumann_exact(p1);
}

// ---- numeric root finding ----

using CVec = std::vector<CxL>;

inline CVec to_cvec(const RatPoly& p) {
  CVec v;
  v.reserve(p.c.size());
  for (const auto& ck : p.c) v.push_back(to_cxl(ck));
  return v;
}

inline CxL ceval(const CVec& c, CxL x) {
  CxL acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline CVec cderiv(const CVec& c) {
  CVec d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<long double>(k));
  return d;
}

inline CxL polish_root(const CVec& c, CxL z, int iters = 48) {
  CVec d = cderiv(c);
  long double best = std::abs(ceval(c, z));
  for (int it = 0; it < iters; ++it) {
    CxL pv = ceval(c, z), dv = ceval(d, z);
    if (std::abs(pv) == 0.0L || std::abs(dv) == 0.0L) break;
    CxL z2 = z - pv / dv;
    long double r2 = std::abs(ceval(c, z2));
    if (r2 >= best) break;
    best = r2;
    z = z2;
  }
  return z;
}

// Roots via complex companion matrix in long double, Newton-polished.
inline CVec poly_roots(CVec c) {
  while (!c.empty() && c.back() == CxL(0)) c.pop_back();
  if (c.size() <= 1) return {};
  CVec roots;
  std::size_t nz = 0;
  while (nz + 1 < c.size() && c[nz] == CxL(0)) ++nz;
  for (std::size_t k = 0; k < nz; ++k) roots.emplace_back(0.0L, 0.0L);
  CVec red(c.begin() + static_cast<std::ptrdiff_t>(nz), c.end());
  int d = static_cast<int>(red.size()) - 1;
  if (d == 0) return roots;

  using Mat = Eigen::Matrix<CxL, Eigen::Dynamic, Eigen::Dynamic>;
  Mat A = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) A(i, d - 1) = -red[static_cast<std::size_t>(i)] / red.back();
  for (int i = 1; i < d; ++i) A(i, i - 1) = CxL(1);
  Eigen::ComplexEigenSolver<Mat> es(A, /*computeEigenvectors*/ false);
  for (int i = 0; i < d; ++i) roots.push_back(polish_root(red, es.eigenvalues()(i)));
  return roots;
}

inline CVec poly_roots(const RatPoly& p) { return poly_roots(to_cvec(p)); }

}  // namespace lbstab
