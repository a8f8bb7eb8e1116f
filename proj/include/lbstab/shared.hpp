#pragma once

#include "lbstab/charsys.hpp"
#include "lbstab/roots.hpp"

#include <algorithm>
#include <numbers>
#include <tuple>
#include <vector>

namespace lbstab {

// Modulus class of the spatial root kappa in a shared couple.
enum class KappaClass { Stable, Unstable, Zero };

// Common solution (z, kappa) of the bulk and boundary characteristic equations.
// isEigenvalue marks couples where kappa is the stable branch: either |z| > 1
// with kappa inside the open unit disk, or z on the circle with kappa equal to
// the radial limit of the stable branch (and inside the closed disk).
struct SharedCouple {
  CxL z{};
  CxL kappa{};
  KappaClass kind = KappaClass::Stable;
  bool isEigenvalue = false;
  long double residual = 0;  // larger scaled residual of the two polynomials
};

struct SharedReport {
  std::vector<SharedCouple> couples;
  RatPoly eliminant;        // resultant in kappa of the content-free parts
  bool degenerate = false;  // resultant vanished identically
  BiPoly commonFactor;      // kappa-gcd of the two polynomials when degenerate
  // eliminant roots with no verified kappa pairing, plus shared content roots
  // (whole solution lines z = z0) that are not strictly inside the unit disk
  std::vector<CxL> unmatchedZ;
};

namespace detail {

inline long double abs_eval(const RatPoly& p, long double x) {
  long double acc = 0, xp = 1;
  for (const auto& ck : p.c) {
    acc += std::abs(to_ldouble(ck)) * xp;
    xp *= x;
  }
  return acc;
}

inline long double bi_abs_eval(const BiPoly& p, long double z, long double k) {
  long double acc = 0, kp = 1;
  for (const auto& ck : p.c) {
    acc += abs_eval(ck, z) * kp;
    kp *= k;
  }
  return acc;
}

inline long double cvec_abs_eval(const CVec& c, long double x) {
  long double acc = 0, xp = 1;
  for (const CxL& v : c) {
    acc += std::abs(v) * xp;
    xp *= x;
  }
  return acc;
}

// Successive kappa derivatives, ladder[m] of order m.
inline std::vector<BiPoly> kappa_ladder(const BiPoly& p) {
  std::vector<BiPoly> lad{p};
  while (lad.back().deg() > 0) lad.push_back(lad.back().derivative());
  return lad;
}

// Multiplicity in kappa of the root approximated by (z, k): the first
// derivative order whose scaled value is clearly nonzero there. An m-fold
// root computed through the companion matrix splits by the m-th root of the
// arithmetic noise, so derivative magnitudes are the reliable signal.
inline int kappa_multiplicity(const std::vector<BiPoly>& lad, const CxL& z, const CxL& k) {
  for (std::size_t m = 1; m + 1 < lad.size(); ++m) {
    long double s = std::abs(bi_ceval(lad[m], z, k)) /
                    std::max(1.0L, bi_abs_eval(lad[m], std::abs(z), std::abs(k)));
    if (s > 1e-3L) return static_cast<int>(m);
  }
  return std::max(1, static_cast<int>(lad.size()) - 1);
}

inline long double pair_residual(const BiPoly& p, const CxL& z, const CxL& k) {
  long double scale = std::max(1.0L, bi_abs_eval(p, std::abs(z), std::abs(k)));
  return std::abs(bi_ceval(p, z, k)) / scale;
}

// Coefficients of p(z0, .) in kappa, with the noise-level leading entries dropped
// so the root count at z0 comes out right.
inline CVec kappa_slice(const BiPoly& p, const CxL& z0) {
  CVec c;
  c.reserve(p.c.size());
  long double scale = 0;
  for (const auto& ck : p.c) {
    c.push_back(ceval(ck, z0));
    scale = std::max(scale, std::abs(c.back()));
  }
  while (!c.empty() && std::abs(c.back()) <= 1e-11L * scale) c.pop_back();
  return c;
}

// Newton iteration on the two-equation system, keeping the best iterate.
inline void polish_pair(const BiPoly& P, const BiPoly& Pz, const BiPoly& Pk, const BiPoly& B,
                        const BiPoly& Bz, const BiPoly& Bk, CxL& z, CxL& k) {
  auto res = [&](const CxL& zz, const CxL& kk) {
    return std::max(pair_residual(P, zz, kk), pair_residual(B, zz, kk));
  };
  CxL bestZ = z, bestK = k;
  long double best = res(z, k);
  for (int it = 0; it < 48 && best > 0; ++it) {
    CxL f = bi_ceval(P, z, k), g = bi_ceval(B, z, k);
    CxL a = bi_ceval(Pz, z, k), b = bi_ceval(Pk, z, k);
    CxL c = bi_ceval(Bz, z, k), d = bi_ceval(Bk, z, k);
    CxL det = a * d - b * c;
    if (std::abs(det) < 1e-60L) break;
    z -= (f * d - b * g) / det;
    k -= (a * g - f * c) / det;
    long double r = res(z, k);
    if (r < best) {
      best = r;
      bestZ = z;
      bestK = k;
    } else if (it > 6) {
      break;
    }
  }
  z = bestZ;
  k = bestK;
}

// Merges root clusters into their means. A double root computed numerically
// splits into a tight pair whose mean is far more accurate than either member.
inline CVec cluster_means(const CVec& roots) {
  CVec means;
  std::vector<int> count;
  for (const CxL& r : roots) {
    bool placed = false;
    for (std::size_t i = 0; i < means.size() && !placed; ++i) {
      if (std::abs(r - means[i] * (1.0L / count[i])) <= 1e-6L * (1 + std::abs(r))) {
        means[i] += r;
        ++count[i];
        placed = true;
      }
    }
    if (!placed) {
      means.push_back(r);
      count.push_back(1);
    }
  }
  for (std::size_t i = 0; i < means.size(); ++i) means[i] /= static_cast<long double>(count[i]);
  return means;
}

// Derivative ladder of a polynomial: entry m holds the m-th derivative, so a
// root of multiplicity m is a simple root of entry m - 1.
inline std::vector<CVec> deriv_ladder(const CVec& c) {
  std::vector<CVec> lad{c};
  while (lad.back().size() > 1) lad.push_back(cderiv(lad.back()));
  return lad;
}

// Newton-polishes a possibly multiple root on the ladder entry where it turns
// simple. The multiplicity is read off as the first derivative order whose
// scaled magnitude is clearly nonzero.
inline CxL refine_on_ladder(const std::vector<CVec>& lad, const CxL& x0) {
  std::size_t m = 1;
  while (m + 1 < lad.size() &&
         std::abs(ceval(lad[m], x0)) <= 1e-3L * std::max(1.0L, cvec_abs_eval(lad[m], std::abs(x0))))
    ++m;
  return polish_root(lad[m - 1], x0);
}

inline long double arg2pi(const CxL& v) {
  long double a = std::arg(v);
  if (a < 0) a += 2 * std::numbers::pi_v<long double>;
  return a;
}

}  // namespace detail

// Marks a verified couple: kappa-modulus class plus the eigenvalue decision.
inline SharedCouple classify_couple(const CharSystem& cs, const CxL& z, const CxL& k,
                                    long double residual) {
  SharedCouple s;
  s.z = z;
  s.kappa = k;
  s.residual = residual;
  long double az = std::abs(z), ak = std::abs(k);
  if (ak < 1e-10L) {
    s.kind = KappaClass::Zero;
    return s;
  }
  s.kind = ak > 1 + 1e-9L ? KappaClass::Unstable : KappaClass::Stable;
  if (az > 1 + 1e-8L) {
    // outside the circle the stable roots are exactly those in the open disk
    s.isEigenvalue = ak < 1 - 1e-9L;
  } else if (az > 1 - 1e-8L && ak <= 1 + 1e-9L) {
    try {
      Continuation c = stable_root_continuation(cs, z / az);
      s.isEigenvalue = std::abs(k - c.kappa) <= 1e-6L * (1 + std::abs(c.kappa));
    } catch (const SchemeError&) {
      // ambiguous branch tracking: leave the couple unmarked
    }
  }
  return s;
}

// All common solutions of the bulk and boundary characteristic equations.
// Either polynomial may carry a content factor, a z-polynomial dividing every
// kappa coefficient; at a content root the polynomial vanishes for all kappa,
// so the resultant of the raw pair would hide those couples behind a spurious
// zero (or miss them outright once divided). Elimination therefore runs on
// the content-free parts, and content roots are restored by substituting them
// straight into the other factor. A root shared by both contents solves the
// system for every kappa at once; such a line is harmless when strictly inside
// the unit disk and is flagged in unmatchedZ otherwise. Couples with kappa = 0
// come from the boundary determinant alone (the bulk equation admits them only
// through the cleared kappa factor) and are never eigenvalues.
inline SharedReport shared_eigenvalues(const SchemeSpec& spec, const BoundarySpec& bc) {
  CharSystem cs = characteristic_coeffs(spec);
  BiPoly P = cs.full();
  BiPoly B = boundary_char_poly(spec, bc);
  RatPoly cP = bi_content(P), cB = bi_content(B);
  BiPoly Pf = bi_primitive(P), Bf = bi_primitive(B);

  SharedReport rep;
  rep.eliminant = resultant_kappa(Pf, Bf);
  if (rep.eliminant.zero()) {
    rep.degenerate = true;
    rep.commonFactor = bi_gcd_kappa(P, B);
    return rep;
  }

  auto residual_at = [&](const CxL& z, const CxL& k) {
    return std::max(detail::pair_residual(P, z, k), detail::pair_residual(B, z, k));
  };

  std::vector<BiPoly> dP = detail::kappa_ladder(Pf), dB = detail::kappa_ladder(Bf);

  // derivative ladder of the eliminant: z coordinates of couples can be
  // multiple roots (tangential intersections included), and only a refinement
  // against the exact eliminant pins them down
  std::vector<CVec> elad = detail::deriv_ladder(to_cvec(rep.eliminant));

  CVec zr;
  for (const CxL& z : poly_roots(rep.eliminant))
    if (std::abs(z) > 1e-10L) zr.push_back(z);  // z = 0: cleared kappa powers
  std::sort(zr.begin(), zr.end(), [](const CxL& a, const CxL& b) {
    return std::make_pair(a.real(), a.imag()) < std::make_pair(b.real(), b.imag());
  });
  CVec zs = detail::cluster_means(zr);

  auto match_at = [&](const CxL& z0) {
    CVec pc = detail::kappa_slice(Pf, z0), bcs = detail::kappa_slice(Bf, z0);
    // both leading coefficients dropping means the shared member ran off to
    // infinity, which threatens nothing
    bool leadDrop = pc.size() < Pf.c.size() && bcs.size() < Bf.c.size();
    if (pc.empty() || bcs.empty()) return leadDrop;
    CVec pr = detail::cluster_means(poly_roots(pc));
    CVec br = detail::cluster_means(poly_roots(bcs));
    // the pairing tolerance must absorb the splitting of multiple roots,
    // which goes like the m-th root of the coefficient noise; fake pairings
    // are weeded out by the residual gate after polishing
    bool matched = false;
    for (const CxL& kp : pr)
      for (const CxL& kb : br) {
        if (std::abs(kp - kb) > 1e-4L * (1 + std::abs(kp))) continue;
        CxL z = z0, k = (kp + kb) / 2.0L;
        int mp = detail::kappa_multiplicity(dP, z, k);
        int mb = detail::kappa_multiplicity(dB, z, k);
        // Newton on the derivative pair where both roots are simple; at an
        // m-fold root the (m-1)-th derivative vanishes exactly there too
        const BiPoly& A = dP[static_cast<std::size_t>(mp - 1)];
        const BiPoly& D = dB[static_cast<std::size_t>(mb - 1)];
        detail::polish_pair(A, bi_dz(A), dP[static_cast<std::size_t>(mp)], D, bi_dz(D),
                            dB[static_cast<std::size_t>(mb)], z, k);
        long double res = residual_at(z, k);
        if ((res > 1e-8L || std::abs(z) <= 1e-10L) && (mp > 1 || mb > 1)) {
          z = z0;
          k = (kp + kb) / 2.0L;
          detail::polish_pair(Pf, bi_dz(Pf), dP[1], Bf, bi_dz(Bf), dB[1], z, k);
          res = residual_at(z, k);
        }
        if (res > 1e-8L || std::abs(z) <= 1e-10L) continue;
        rep.couples.push_back(classify_couple(cs, z, k, res));
        matched = true;
      }
    return matched || leadDrop;
  };

  for (const CxL& zraw : zs) {
    CxL z0 = detail::refine_on_ladder(elad, zraw);
    bool ok = match_at(z0);
    if (!ok && std::abs(z0 - zraw) > 1e-11L * (1 + std::abs(zraw))) ok = match_at(zraw);
    if (!ok) rep.unmatchedZ.push_back(zraw);
  }

  // content roots of one side alone: every kappa root of the other factor's
  // slice closes a couple there
  auto near_root = [](const RatPoly& c, const CxL& z0) {
    return std::abs(ceval(c, z0)) <= 1e-9L * std::max(1.0L, detail::abs_eval(c, std::abs(z0)));
  };
  struct ContentChannel {
    const RatPoly* own;
    const RatPoly* other;
    const BiPoly* partner;
  };
  for (const ContentChannel& ch :
       {ContentChannel{&cB, &cP, &Pf}, ContentChannel{&cP, &cB, &Bf}}) {
    if (ch.own->deg() < 1) continue;
    for (const CxL& z0 : poly_roots(*ch.own)) {
      if (std::abs(z0) <= 1e-10L) continue;
      if (near_root(*ch.other, z0)) continue;  // shared content, handled below
      CVec slice = detail::kappa_slice(*ch.partner, z0);
      std::vector<CVec> lad = detail::deriv_ladder(slice);
      for (const CxL& k0 : detail::cluster_means(poly_roots(slice))) {
        if (std::abs(k0) <= 1e-10L) continue;
        CxL k = detail::refine_on_ladder(lad, k0);
        long double res = residual_at(z0, k);
        if (res > 1e-8L) {
          k = k0;
          res = residual_at(z0, k);
        }
        if (res > 1e-8L) continue;
        rep.couples.push_back(classify_couple(cs, z0, k, res));
      }
    }
  }

  RatPoly sharedContent = poly_gcd(cP, cB);
  if (sharedContent.deg() >= 1)
    for (const CxL& z0 : poly_roots(sharedContent)) {
      if (std::abs(z0) <= 1e-10L) continue;
      if (std::abs(z0) >= 1 - 1e-8L) rep.unmatchedZ.push_back(z0);
    }

  // kappa = 0 members: the ghost row admits a mode with no spatial content when
  // the zeroth boundary matrix has z0 as an eigenvalue
  RatPoly fict = B.coeff(0);
  for (const CxL& z0 : poly_roots(fict)) {
    if (std::abs(z0) <= 1e-10L) continue;
    SharedCouple s;
    s.z = z0;
    s.kappa = 0;
    s.kind = KappaClass::Zero;
    s.residual = std::abs(ceval(fict, z0)) / std::max(1.0L, detail::abs_eval(fict, std::abs(z0)));
    rep.couples.push_back(s);
  }

  auto key = [](const SharedCouple& s) {
    return std::make_tuple(-std::abs(s.z), detail::arg2pi(s.z), -std::abs(s.kappa),
                           detail::arg2pi(s.kappa));
  };
  std::sort(rep.couples.begin(), rep.couples.end(),
            [&](const SharedCouple& a, const SharedCouple& b) { return key(a) < key(b); });
  std::vector<SharedCouple> uniq;
  for (const SharedCouple& s : rep.couples) {
    bool dup = false;
    for (const SharedCouple& u : uniq)
      dup = dup || (std::abs(s.z - u.z) <= 1e-7L * (1 + std::abs(u.z)) &&
                    std::abs(s.kappa - u.kappa) <= 1e-7L * (1 + std::abs(u.kappa)));
    if (!dup) uniq.push_back(s);
  }
  rep.couples = std::move(uniq);
  return rep;
}

}  // namespace lbstab
