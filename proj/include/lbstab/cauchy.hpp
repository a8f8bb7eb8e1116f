#pragma once

#include "lbstab/catalog.hpp"
#include "lbstab/charsys.hpp"

#include <cmath>
#include <optional>

namespace lbstab {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

template <class F>
long double golden_max(F f, long double a, long double b, int iters = 80) {
  const long double gr = 0.6180339887498948482045868343656L;
  long double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  long double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

inline CVecL matrix_eigenvalues(const CMatL& A) {
  Eigen::ComplexEigenSolver<CMatL> es(A, false);
  if (es.info() != Eigen::Success) throw SchemeError("eigenvalue solver failed");
  return es.eigenvalues();
}

inline long double spectral_radius(const CMatL& A, CxL* worst = nullptr) {
  CVecL ev = matrix_eigenvalues(A);
  long double rho = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > rho) {
      rho = std::abs(ev(i));
      if (worst) *worst = ev(i);
    }
  return rho;
}

inline long double spectral_radius_at(const SchemeSpec& spec, long double theta,
                                      CxL* worst = nullptr) {
  CxL kappa = std::polar(1.0L, theta);
  return spectral_radius(amplification_matrix(spec, kappa), worst);
}

struct ThetaWitness {
  double theta;
  Cx z;  // offending eigenvalue
};

struct VonNeumannScan {
  bool stable = true;
  double maxSpectralRadius = 0;
  double argmaxTheta = 0;
  std::vector<ThetaWitness> witnesses;
};

inline VonNeumannScan von_neumann_scan(const SchemeSpec& spec, int nTheta = 1024) {
  if (nTheta < 64) throw SchemeError("theta grid must have at least 64 points");
  const long double tol = 1e-10L;
  const std::size_t n = static_cast<std::size_t>(nTheta);
  std::vector<long double> rho(n);
  VonNeumannScan out;
  long double best = -1, bestTheta = 0;
  for (std::size_t k = 0; k < n; ++k) {
    long double theta = 2 * kPi * static_cast<long double>(k) / static_cast<long double>(n);
    CxL worst;
    rho[k] = spectral_radius_at(spec, theta, &worst);
    if (rho[k] > 1 + tol)
      out.witnesses.push_back({static_cast<double>(theta), to_cx(worst)});
    if (rho[k] > best) {
      best = rho[k];
      bestTheta = theta;
    }
  }
  // refine near sampled local maxima that could hide a marginal peak
  const long double h = 2 * kPi / static_cast<long double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double prev = rho[(k + n - 1) % n], next = rho[(k + 1) % n];
    if (rho[k] < prev || rho[k] < next) continue;
    if (rho[k] < 1 - 1e-6L && rho[k] < best - 1e-6L) continue;
    long double theta0 = 2 * kPi * static_cast<long double>(k) / static_cast<long double>(n);
    long double thetaStar = golden_max(
        [&](long double t) { return spectral_radius_at(spec, t); }, theta0 - h, theta0 + h);
    CxL worst;
    long double r = spectral_radius_at(spec, thetaStar, &worst);
    if (r > best) {
      best = r;
      bestTheta = thetaStar;
    }
    if (r > 1 + tol && rho[k] <= 1 + tol)
      out.witnesses.push_back({static_cast<double>(thetaStar), to_cx(worst)});
  }
  out.maxSpectralRadius = static_cast<double>(best);
  out.argmaxTheta = static_cast<double>(bestTheta);
  out.stable = best <= 1 + tol;
  return out;
}

// all roots in the closed disk, circle roots simple (clustering radius 1e-7)
inline bool simple_von_neumann_test(const CVec& p) {
  std::size_t top = p.size();
  while (top > 0 && p[top - 1] == CxL(0)) --top;
  if (top <= 1) throw SchemeError("constant polynomial has no root structure");
  CVec roots = poly_roots(CVec(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(top)));
  for (const CxL& z : roots)
    if (std::abs(z) > 1 + 1e-10L) return false;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (std::abs(roots[i]) < 1 - 1e-8L) continue;
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) <= 1e-7L) return false;
  }
  return true;
}

// tolerance-free path for rational coefficients
inline bool simple_von_neumann_test(const RatPoly& p) { return simple_von_neumann_exact(p); }

struct EigenvalueReport {
  Cx z;
  int algebraicMult = 1;
  int geometricMult = 1;
  bool semisimple = true;
  bool onCircle = false;
  bool marginal = false;        // |z| within 1e-8 of the circle
  bool illConditioned = false;  // rank decision has singular-value gap ratio < 10
};

inline std::vector<EigenvalueReport> semisimple_circle_check(const SchemeSpec& spec,
                                                             long double theta) {
  CxL kappa = std::polar(1.0L, theta);
  CMatL A = amplification_matrix(spec, kappa);
  CVecL ev = matrix_eigenvalues(A);
  const int q = spec.q;

  std::vector<std::vector<CxL>> clusters;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    bool placed = false;
    for (auto& cl : clusters) {
      bool close = false;
      for (const CxL& m : cl)
        if (std::abs(ev(i) - m) <= 1e-7L) {
          close = true;
          break;
        }
      if (close) {
        cl.push_back(ev(i));
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({ev(i)});
  }

  std::vector<EigenvalueReport> out;
  for (const auto& cl : clusters) {
    EigenvalueReport rep;
    CxL z(0);
    for (const CxL& m : cl) z += m;
    z /= static_cast<long double>(cl.size());
    rep.z = to_cx(z);
    rep.algebraicMult = static_cast<int>(cl.size());
    rep.onCircle = std::abs(z) >= 1 - 1e-8L;
    rep.marginal = std::abs(std::abs(z) - 1.0L) <= 1e-8L;
    CMatL S = A - z * CMatL::Identity(q, q);
    Eigen::JacobiSVD<CMatL> svd(S);
    const auto& sv = svd.singularValues();
    long double thresh = 1e-9L * std::max<long double>(sv(0), 1e-300L);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > thresh) ++rank;
    rep.geometricMult = q - rank;
    if (rank > 0 && rank < q) {
      long double gap = sv(rank - 1) / std::max<long double>(sv(rank), 1e-300L);
      rep.illConditioned = gap < 10;
    }
    rep.semisimple = rep.geometricMult == rep.algebraicMult;
    out.push_back(rep);
  }
  return out;
}

namespace detail {

// smallest gap between circle eigenvalues of the amplification matrix at theta
inline long double min_circle_gap(const SchemeSpec& spec, long double theta) {
  CVecL ev = matrix_eigenvalues(amplification_matrix(spec, std::polar(1.0L, theta)));
  long double gap = 1e30L;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < 1 - 1e-6L) continue;
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
      if (std::abs(ev(j)) < 1 - 1e-6L) continue;
      gap = std::min(gap, std::abs(ev(i) - ev(j)));
    }
  }
  return gap;
}

}  // namespace detail

// necessary conditions: von Neumann plus semi-simplicity of circle eigenvalues,
// with collision points located by refining gap minima between grid points
inline bool lbm_l2_necessary(const SchemeSpec& spec, int nTheta = 1024) {
  VonNeumannScan scan = von_neumann_scan(spec, nTheta);
  if (!scan.stable) return false;
  const std::size_t n = static_cast<std::size_t>(nTheta);
  const long double h = 2 * kPi / static_cast<long double>(n);
  std::vector<long double> gap(n);
  for (std::size_t k = 0; k < n; ++k)
    gap[k] = detail::min_circle_gap(spec, h * static_cast<long double>(k));
  for (std::size_t k = 0; k < n; ++k) {
    long double prev = gap[(k + n - 1) % n], next = gap[(k + 1) % n];
    if (gap[k] > prev || gap[k] > next) continue;  // keep local minima only
    if (gap[k] >= 1e29L) continue;                 // fewer than two circle eigenvalues
    long double theta0 = h * static_cast<long double>(k);
    long double thetaStar =
        golden_max([&](long double t) { return -detail::min_circle_gap(spec, t); },
                   theta0 - h, theta0 + h);
    if (detail::min_circle_gap(spec, thetaStar) > 1e-6L) continue;
    for (const EigenvalueReport& rep : semisimple_circle_check(spec, thetaStar))
      if (rep.onCircle && !rep.semisimple) return false;
  }
  return true;
}

inline bool fd_stability_verdict(const SchemeSpec& spec, int nTheta = 1024) {
  if (nTheta < 64) throw SchemeError("theta grid must have at least 64 points");
  CharSystem cs = characteristic_coeffs(spec);
  const std::size_t n = static_cast<std::size_t>(nTheta);
  for (std::size_t k = 0; k < n; ++k) {
    long double theta = 2 * kPi * static_cast<long double>(k) / static_cast<long double>(n);
    if (!simple_von_neumann_test(cs.z_poly_at(std::polar(1.0L, theta)))) return false;
  }
  return true;
}

// exact stability threshold for the second-order three-velocity scheme:
// s3 <= s3*(s2), evaluated without the removable singularity of the printed form
inline double lw_stability_boundary(double s2) {
  if (!(s2 > 0 && s2 < 2)) throw SchemeError("relaxation rate out of (0, 2)");
  double d = s2 * s2 - 8 * s2 + 8;
  double b = 2 * s2 * (2 - s2);
  return 1 + d / (std::sqrt(d * d + b * b) + b);
}

// same threshold comparison in exact rational arithmetic
inline bool lw_stable_exact(const Rat& s2, const Rat& s3) {
  Rat d = s2 * s2 - 8 * s2 + 8;
  Rat b = 2 * s2 * (2 - s2);
  Rat t = s3 - 1;
  Rat rad = d * d + b * b;
  Rat rhs = d - t * b;
  if (t <= 0) {
    if (rhs >= 0) return true;
    return t * t * rad >= rhs * rhs;
  }
  if (rhs <= 0) return false;
  return t * t * rad <= rhs * rhs;
}

inline bool stencil_bound_check(const SchemeSpec& spec) {
  CharSystem cs = characteristic_coeffs(spec);
  int right = 0, left = 0;
  for (int c : spec.velocities) {
    if (c > 0) right += c;
    if (c < 0) left -= c;
  }
  return cs.rBar() <= right && cs.pBar() <= left;
}

// recognize a catalog scheme by structure, not by name
inline std::optional<std::string> identify_catalog_scheme(const SchemeSpec& spec) {
  auto same = [&](const SchemeSpec& c) {
    return spec.velocities == c.velocities && spec.M == c.M && spec.eq == c.eq &&
           spec.s == c.s && spec.lambda == c.lambda && spec.courant == c.courant;
  };
  if (spec.q == 2) {
    if (same(make_d1q2(spec.s[1], spec.courant, spec.lambda))) return "d1q2";
  } else if (spec.q == 3 && spec.s.size() == 3) {
    if (same(make_d1q3_o4(spec.courant, spec.lambda))) return "d1q3-o4";
    if (same(make_d1q3_lw(spec.s[1], spec.s[2], spec.courant, spec.lambda))) return "d1q3-lw";
  }
  return std::nullopt;
}

struct ExactCauchy {
  bool vonNeumann, lbmL2, fdL2;
};

// closed-form characterizations where available
inline std::optional<ExactCauchy> exact_cauchy_conditions(const SchemeSpec& spec) {
  std::optional<std::string> id = identify_catalog_scheme(spec);
  if (!id) return std::nullopt;
  Rat C = spec.courant;
  Rat aC = C < 0 ? -C : C;
  if (*id == "d1q2") {
    Rat s2 = spec.s[1];
    bool vn = s2 > 0 && s2 <= 2 && aC <= 1;
    bool l2 = (s2 > 0 && s2 < 2 && aC <= 1) || (s2 == 2 && aC < 1);
    return ExactCauchy{vn, l2, l2};
  }
  if (*id == "d1q3-o4") {
    bool vn = aC <= Rat(1, 2);
    return ExactCauchy{vn, aC < Rat(1, 2), false};
  }
  Rat s2 = spec.s[1], s3 = spec.s[2];
  if (!(aC < 1 && s2 > 0 && s2 < 2 && s3 > 0 && s3 < 2)) return std::nullopt;
  bool st = lw_stable_exact(s2, s3);
  return ExactCauchy{st, st, st};
}

struct StabilityVerdict {
  bool vonNeumann = false;
  bool lbmL2 = false;  // necessary conditions, or exact characterization when known
  bool fdL2 = false;
  bool exactConditions = false;  // true when a closed-form characterization applied
  double maxSpectralRadius = 0;
  std::vector<ThetaWitness> witnesses;
};

inline StabilityVerdict cauchy_stability(const SchemeSpec& spec, int nTheta = 1024) {
  StabilityVerdict v;
  VonNeumannScan scan = von_neumann_scan(spec, nTheta);
  v.maxSpectralRadius = scan.maxSpectralRadius;
  v.witnesses = scan.witnesses;
  if (std::optional<ExactCauchy> ex = exact_cauchy_conditions(spec)) {
    v.vonNeumann = ex->vonNeumann;
    v.lbmL2 = ex->lbmL2;
    v.fdL2 = ex->fdL2;
    v.exactConditions = true;
    return v;
  }
  v.vonNeumann = scan.stable;
  v.lbmL2 = scan.stable && lbm_l2_necessary(spec, nTheta);
  v.fdL2 = v.lbmL2 && fd_stability_verdict(spec, nTheta);
  return v;
}

}  // namespace lbstab
