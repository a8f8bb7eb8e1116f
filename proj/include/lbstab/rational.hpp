#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lbstab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using Cx = std::complex<double>;
using CxL = std::complex<long double>;

inline double to_double(const Rat& x) { return x.convert_to<double>(); }
inline long double to_ldouble(const Rat& x) { return x.convert_to<long double>(); }
inline Cx to_cx(const Rat& x) { return Cx(to_double(x), 0.0); }
inline Cx to_cx(const CxL& x) {
  return Cx(static_cast<double>(x.real()), static_cast<double>(x.imag()));
}
inline CxL to_cxl(const Rat& x) { return CxL(to_ldouble(x), 0.0L); }

struct BadRational : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "7", "-3/4", "1.25" (decimals are converted exactly).
inline Rat parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw BadRational("empty rational literal");

  auto parse_int = [](std::string t) -> BigInt {
    bool neg = false;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
      neg = t[0] == '-';
      t.erase(0, 1);
    }
    if (t.empty()) throw BadRational("bad integer literal '" + t + "'");
    for (char ch : t)
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw BadRational("bad integer literal '" + t + "'");
    BigInt v(t);
    return neg ? -v : v;
  };

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_int(s.substr(0, slash));
    BigInt den = parse_int(s.substr(slash + 1));
    if (den == 0) throw BadRational("zero denominator in '" + text + "'");
    return Rat(num, den);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    int sign = 1;
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) {
      if (head[0] == '-') sign = -1;
      head.erase(0, 1);
    }
    if (head.empty()) head = "0";
    BigInt num = parse_int(head);
    BigInt scale = 1;
    for (char ch : tail) {
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw BadRational("bad decimal literal '" + text + "'");
      num = num * 10 + (ch - '0');
      scale *= 10;
    }
    return Rat(sign * num, scale);
  }
  return Rat(parse_int(s));
}

inline std::string rat_str(const Rat& x) {
  BigInt num = numerator(x), den = denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rat rat_pow(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw BadRational("0 raised to a negative power");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat acc = 1, b = base;
  long k = e;
  while (k > 0) {
    if (k & 1) acc *= b;
    b *= b;
    k >>= 1;
  }
  return acc;
}

// Exact square root test: returns true and sets root if x is a perfect square.
inline bool rat_sqrt(const Rat& x, Rat& root) {
  if (x < 0) return false;
  BigInt num = numerator(x), den = denominator(x);
  BigInt rn = boost::multiprecision::sqrt(num);
  BigInt rd = boost::multiprecision::sqrt(den);
  if (rn * rn != num || rd * rd != den) return false;
  root = Rat(rn, rd);
  return true;
}

// Best continued-fraction convergent to x with denominator at most maxDen.
// Reconstruction only: callers must verify the result by exact substitution.
inline Rat rat_nearest(long double x, long long maxDen = 1000000000LL) {
  if (!std::isfinite(static_cast<double>(x))) throw BadRational("cannot reconstruct a non-finite value");
  BigInt p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  long double t = x;
  for (int it = 0; it < 64; ++it) {
    long double fl = std::floor(t);
    if (std::abs(fl) > 9e17L) break;
    BigInt a = static_cast<long long>(fl);
    BigInt p = a * p1 + p2, q = a * q1 + q2;
    if (q > maxDen) break;
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
    long double frac = t - fl;
    if (frac < 1e-15L * std::max(1.0L, std::abs(x))) break;
    t = 1.0L / frac;
  }
  if (q1 == 0) throw BadRational("no convergent within the denominator bound");
  return Rat(p1, q1);
}

using RatVec = std::vector<Rat>;

struct RatMat {
  int rows = 0, cols = 0;
  std::vector<Rat> a;

  RatMat() = default;
  RatMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

  static RatMat identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rat& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const Rat& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  friend RatMat operator+(const RatMat& x, const RatMat& y) {
    RatMat r(x.rows, x.cols);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
  }
  friend RatMat operator-(const RatMat& x, const RatMat& y) {
    RatMat r(x.rows, x.cols);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = x.a[k] - y.a[k];
    return r;
  }
  friend RatMat operator*(const RatMat& x, const RatMat& y) {
    RatMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        if (x(i, k) == 0) continue;
        for (int j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }
  friend RatMat operator*(const Rat& c, const RatMat& x) {
    RatMat r(x.rows, x.cols);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = c * x.a[k];
    return r;
  }
  friend RatVec operator*(const RatMat& x, const RatVec& v) {
    RatVec r(x.rows);
    for (int i = 0; i < x.rows; ++i)
      for (int j = 0; j < x.cols; ++j) r[i] += x(i, j) * v[j];
    return r;
  }
  friend bool operator==(const RatMat& x, const RatMat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }

  RatMat transpose() const {
    RatMat r(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Rat det() const {
    if (rows != cols) throw std::runtime_error("det of non-square matrix");
    RatMat m = *this;
    Rat d = 1;
    for (int col = 0; col < cols; ++col) {
      int pivot = -1;
      for (int i = col; i < rows; ++i)
        if (m(i, col) != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) return Rat(0);
      if (pivot != col) {
        for (int j = 0; j < cols; ++j) std::swap(m(pivot, j), m(col, j));
        d = -d;
      }
      d *= m(col, col);
      Rat inv = Rat(1) / m(col, col);
      for (int i = col + 1; i < rows; ++i) {
        if (m(i, col) == 0) continue;
        Rat f = m(i, col) * inv;
        for (int j = col; j < cols; ++j) m(i, j) -= f * m(col, j);
      }
    }
    return d;
  }

  RatMat inverse() const {
    if (rows != cols) throw std::runtime_error("inverse of non-square matrix");
    int n = rows;
    RatMat m = *this, inv = identity(n);
    for (int col = 0; col < n; ++col) {
      int pivot = -1;
      for (int i = col; i < n; ++i)
        if (m(i, col) != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) throw std::runtime_error("singular matrix");
      if (pivot != col)
        for (int j = 0; j < n; ++j) {
          std::swap(m(pivot, j), m(col, j));
          std::swap(inv(pivot, j), inv(col, j));
        }
      Rat p = m(col, col);
      for (int j = 0; j < n; ++j) {
        m(col, j) /= p;
        inv(col, j) /= p;
      }
      for (int i = 0; i < n; ++i) {
        if (i == col || m(i, col) == 0) continue;
        Rat f = m(i, col);
        for (int j = 0; j < n; ++j) {
          m(i, j) -= f * m(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

  int rank() const {
    RatMat m = *this;
    int rk = 0;
    for (int col = 0; col < cols && rk < rows; ++col) {
      int pivot = -1;
      for (int i = rk; i < rows; ++i)
        if (m(i, col) != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) continue;
      if (pivot != rk)
        for (int j = 0; j < cols; ++j) std::swap(m(pivot, j), m(rk, j));
      Rat inv = Rat(1) / m(rk, col);
      for (int i = rk + 1; i < rows; ++i) {
        if (m(i, col) == 0) continue;
        Rat f = m(i, col) * inv;
        for (int j = col; j < cols; ++j) m(i, j) -= f * m(rk, j);
      }
      ++rk;
    }
    return rk;
  }

  // Basis of the right null space (reduced row echelon back-substitution).
  std::vector<RatVec> nullspace() const {
    RatMat m = *this;
    std::vector<int> pivot_col;
    int rk = 0;
    for (int col = 0; col < cols && rk < rows; ++col) {
      int pivot = -1;
      for (int i = rk; i < rows; ++i)
        if (m(i, col) != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) continue;
      if (pivot != rk)
        for (int j = 0; j < cols; ++j) std::swap(m(pivot, j), m(rk, j));
      Rat p = m(rk, col);
      for (int j = 0; j < cols; ++j) m(rk, j) /= p;
      for (int i = 0; i < rows; ++i) {
        if (i == rk || m(i, col) == 0) continue;
        Rat f = m(i, col);
        for (int j = 0; j < cols; ++j) m(i, j) -= f * m(rk, j);
      }
      pivot_col.push_back(col);
      ++rk;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<RatVec> basis;
    for (int free = 0; free < cols; ++free) {
      if (is_pivot[free]) continue;
      RatVec v(cols);
      v[free] = 1;
      for (int r = 0; r < rk; ++r) v[pivot_col[r]] = -m(r, free);
      basis.push_back(std::move(v));
    }
    return basis;
  }
};

inline RatMat outer(const RatVec& u, const RatVec& v) {
  RatMat r(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j) r(i, j) = u[i] * v[j];
  return r;
}

inline RatVec unit_vec(int n, int k) {
  RatVec v(n);
  v[k] = 1;
  return v;
}

inline Rat dot(const RatVec& u, const RatVec& v) {
  Rat s = 0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

}  // namespace lbstab
