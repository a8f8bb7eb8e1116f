#pragma once

#include "lbstab/kl.hpp"
#include "lbstab/shared.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace lbstab {

enum class KlKind { Zero, Finite, Pole, Unresolved };
enum class SpatialCharacter { Localized, Extended };
enum class TemporalCharacter { Circle, Outside };

// Order structure of the scalar along the outgoing radial ray at a circle
// point: a zero of order k, a finite nonzero limit, or a pole of order k.
struct KlFit {
  KlKind kind = KlKind::Unresolved;
  int order = 0;       // k for Zero / Pole, 0 for Finite
  CxL coefficient{0};  // leading coefficient against (z - z0)^{+-k}, or the limit
  long double slope = 0;
};

inline KlFit kl_order_fit(const SchemeSpec& spec, const CharSystem& cs, const BoundarySpec& bc,
                          const CxL& zStar) {
  const CxL base = zStar / std::abs(zStar);
  const std::vector<long double> grid = detail::pole_fit_grid();
  const std::size_t n = grid.size();
  std::vector<CxL> f(n);
  long double top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CxL z = base * CxL(1 + grid[i], 0);
    f[i] = detail::kl_product(spec, bc, z, stable_root(cs, z));
    top = std::max(top, std::abs(f[i]));
  }
  KlFit fit;
  if (top < 1e-200L) return fit;  // vanishes along the whole ray: leave unresolved

  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double x = std::log(grid[i]);
    long double y = std::log(std::max(std::abs(f[i]), 1e-300L));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const long double nn = static_cast<long double>(n);
  fit.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  int k = static_cast<int>(std::llround(static_cast<double>(fit.slope)));
  if (std::abs(fit.slope - static_cast<long double>(k)) > 0.2L) return fit;

  // divide the detected power out and extrapolate the analytic remainder
  const std::size_t tail = 8;
  std::vector<long double> u;
  std::vector<CxL> g;
  for (std::size_t i = n - tail; i < n; ++i) {
    CxL pw = std::pow(base * CxL(grid[i], 0), static_cast<long double>(k));
    u.push_back(std::sqrt(grid[i]));
    g.push_back(f[i] / pw);
  }
  fit.coefficient = detail::extrapolate_to_zero(u, g);
  fit.order = k >= 0 ? k : -k;
  fit.kind = k > 0 ? KlKind::Zero : (k < 0 ? KlKind::Pole : KlKind::Finite);
  return fit;
}

// One candidate point, classified: continuity of the boundary-layer
// eigenvector, shared-eigenvalue membership, and the scalar's order.
struct ModeReport {
  CxL zStar{0};
  CxL kappaStar{0};
  bool isSharedEigenvalue = false;
  bool eigvecContinuous = true;
  KlFit kl;
  PoleOrders poleOrders;
  SpatialCharacter spatial = SpatialCharacter::Localized;
  TemporalCharacter temporal = TemporalCharacter::Circle;
  bool resolved = true;
  std::string note;

  std::string box() const {
    std::string s = poleOrders.allResolved ? (eigvecContinuous ? "□" : "⊠") : "?";
    s += isSharedEigenvalue ? "⊙" : "○";
    switch (kl.kind) {
      case KlKind::Zero: s += "0"; break;
      case KlKind::Finite: s += "⋆"; break;
      case KlKind::Pole: s += "∞"; break;
      case KlKind::Unresolved: s += "?"; break;
    }
    return s;
  }
};

inline ModeReport classify_mode(const SchemeSpec& spec, const CharSystem& cs,
                                const BiPoly& bpoly, const BoundarySpec& bc, const CxL& zStar) {
  ModeReport m;
  m.zStar = zStar;
  const long double az = std::abs(zStar);
  const std::size_t q = static_cast<std::size_t>(spec.q);

  if (az > 1 + 1e-8L) {
    m.temporal = TemporalCharacter::Outside;
    m.kappaStar = stable_root(cs, zStar);
    m.poleOrders.order.assign(q, 0);
    m.poleOrders.slope.assign(q, 0);
    m.poleOrders.resolved.assign(q, true);
    m.isSharedEigenvalue = detail::pair_residual(bpoly, zStar, m.kappaStar) <= 1e-6L;
    // away from the circle the scalar needs no limit, and its zeros are
    // exactly the shared eigenvalues
    m.kl.coefficient = detail::kl_product(spec, bc, zStar, m.kappaStar);
    m.kl.kind = m.isSharedEigenvalue ? KlKind::Zero : KlKind::Finite;
    m.kl.order = m.isSharedEigenvalue ? 1 : 0;
    return m;
  }
  if (az < 1 - 1e-6L) throw SchemeError("mode classification expects a point with |z| >= 1");

  const CxL base = zStar / az;
  m.zStar = base;
  Continuation cont = stable_root_continuation(cs, base);
  m.kappaStar = cont.kappa;
  m.spatial = std::abs(cont.kappa) >= 1 - 1e-6L ? SpatialCharacter::Extended
                                                : SpatialCharacter::Localized;
  m.isSharedEigenvalue = detail::pair_residual(bpoly, base, cont.kappa) <= 1e-6L;
  m.poleOrders = eigenvector_pole_orders(spec, cs, base);
  m.eigvecContinuous = m.poleOrders.maxOrder == 0;
  if (!m.poleOrders.allResolved) m.resolved = false;

  m.kl = kl_order_fit(spec, cs, bc, base);
  if (m.kl.kind == KlKind::Unresolved) m.resolved = false;
  // a zero of the scalar always sits on a shared eigenvalue
  if (m.kl.kind == KlKind::Zero && !m.isSharedEigenvalue) {
    m.resolved = false;
    m.note = "scalar vanishes off the shared-eigenvalue set";
  }
  // the scalar is linear in the eigenvector, so its pole cannot be worse
  if (m.kl.kind == KlKind::Pole && m.poleOrders.allResolved &&
      m.kl.order > m.poleOrders.maxOrder) {
    m.resolved = false;
    m.note = "scalar pole exceeds the eigenvector pole order";
  }
  return m;
}

inline ModeReport classify_mode(const SchemeSpec& spec, const BoundarySpec& bc,
                                const CxL& zStar) {
  CharSystem cs = characteristic_coeffs(spec);
  return classify_mode(spec, cs, boundary_char_poly(spec, bc), bc, zStar);
}

// V_g = -lambda (kappa_s / z) / (dkappa_s/dz) at a circle point carrying a
// propagating wave packet (|kappa_s| = 1).
inline long double group_velocity(const SchemeSpec& spec, const CharSystem& cs,
                                  const CxL& zStar) {
  if (std::abs(std::abs(zStar) - 1.0L) > 1e-8L)
    throw SchemeError("group velocity is defined at circle points only");
  Continuation cont = stable_root_continuation(cs, zStar / std::abs(zStar));
  if (std::abs(std::abs(cont.kappa) - 1.0L) > 1e-6L)
    throw SchemeError("no propagating wave packet: |kappa_s| != 1");
  if (cont.turningPoint) return 0;  // vertical branch tangent: packet stands still
  CxL v = -to_cxl(spec.lambda) * (cont.kappa / zStar) / cont.dkdz;
  if (std::abs(v.imag()) > 1e-8L * (1 + std::abs(v)))
    throw SchemeError("group velocity came out complex");
  return v.real();
}

inline long double group_velocity(const SchemeSpec& spec, const CxL& zStar) {
  CharSystem cs = characteristic_coeffs(spec);
  return group_velocity(spec, cs, zStar);
}

namespace detail {

inline BiPoly strip_kappa_power(BiPoly p) {
  std::size_t k = 0;
  while (k + 1 < p.c.size() && p.c[k].zero()) ++k;
  if (k > 0) p.c.erase(p.c.begin(), p.c.begin() + static_cast<std::ptrdiff_t>(k));
  return p;
}

}  // namespace detail

// Circle points where the normalized boundary-layer eigenvector can lose
// boundedness: the first adjugate row vanishes against the stable branch.
struct PoleScan {
  CVec z;
  bool degenerate = false;  // an adjugate entry shared a factor with the bulk polynomial
};

inline PoleScan eigenvector_pole_candidates(const SchemeSpec& spec, const CharSystem& cs) {
  const int q = spec.q;
  std::vector<std::vector<BiPoly>> A = detail::bulk_bipoly_matrix(spec);
  BiPoly P = bi_primitive(cs.full());

  PoleScan out;
  for (int j = 0; j < q; ++j) {
    // the (1, j) adjugate entry is the signed minor without row j and column 1;
    // the sign cannot move its roots
    std::vector<std::vector<BiPoly>> minor;
    for (int i = 0; i < q; ++i) {
      if (i == j) continue;
      minor.emplace_back(A[static_cast<std::size_t>(i)].begin() + 1,
                         A[static_cast<std::size_t>(i)].end());
    }
    BiPoly entry = detail::strip_kappa_power(bipoly_det(minor));
    if (entry.zero()) continue;
    RatPoly res = resultant_kappa(entry, P);
    if (res.zero()) {
      out.degenerate = true;
      continue;
    }
    // the resultant often carries multiple roots, computed only to a fractional
    // power of the precision; refine before testing against the circle
    std::vector<CVec> lad = detail::deriv_ladder(to_cvec(res));
    for (const CxL& zr : poly_roots(res)) {
      if (std::abs(std::abs(zr) - 1.0L) > 1e-4L) continue;
      CxL z = detail::refine_on_ladder(lad, zr);
      if (std::abs(z - zr) > 1e-3L * (1 + std::abs(zr))) z = zr;
      if (std::abs(std::abs(z) - 1.0L) <= 1e-7L) out.z.push_back(z / std::abs(z));
    }
  }

  std::sort(out.z.begin(), out.z.end(),
            [](const CxL& a, const CxL& b) { return detail::arg2pi(a) < detail::arg2pi(b); });
  CVec dedup;
  for (const CxL& z : out.z) {
    bool dup = false;
    for (const CxL& u : dedup) dup = dup || std::abs(z - u) <= 1e-7L;
    if (!dup) dedup.push_back(z);
  }
  out.z = std::move(dedup);
  return out;
}

// 1 - |kappa_s(z)| must shrink no faster than |z| - 1 along outgoing rays,
// otherwise no uniform resolvent bound is possible.
inline bool uniform_resolvent_check(const CharSystem& cs, int nTheta = 32) {
  const long double pi = std::acos(-1.0L);
  for (int t = 0; t < nTheta; ++t) {
    CxL base = std::polar(1.0L, 2 * pi * static_cast<long double>(t) / nTheta);
    long double prev = 0, last = 0;
    for (int e = 2; e <= 6; ++e) {
      long double dlt = std::pow(10.0L, static_cast<long double>(-e));
      CxL kappa = stable_root(cs, base * CxL(1 + dlt, 0));
      long double margin = 1 - std::abs(kappa);
      if (margin <= 0) return false;
      long double ratio = dlt / margin;
      if (e == 5) prev = ratio;
      if (e == 6) last = ratio;
    }
    if (last > 1e3L && last > 5 * prev) return false;  // ratio still growing: no bound
  }
  return true;
}

enum class VerdictValue { SS, SSOO, MU_L, MU_E, GR_L, Indeterminate };

inline const char* verdict_string(VerdictValue v) {
  switch (v) {
    case VerdictValue::SS: return "SS";
    case VerdictValue::SSOO: return "SSOO";
    case VerdictValue::MU_L: return "MU-L";
    case VerdictValue::MU_E: return "MU-E";
    case VerdictValue::GR_L: return "GR-L";
    case VerdictValue::Indeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

// larger is worse
inline int verdict_severity(VerdictValue v) {
  switch (v) {
    case VerdictValue::SS: return 0;
    case VerdictValue::SSOO: return 1;
    case VerdictValue::MU_L: return 2;
    case VerdictValue::MU_E: return 3;
    case VerdictValue::Indeterminate: return 4;
    case VerdictValue::GR_L: return 5;
  }
  return 4;
}

struct Verdict {
  VerdictValue value = VerdictValue::Indeterminate;
  std::vector<ModeReport> drivingModes;
  std::vector<ModeReport> modes;  // every classified candidate
  std::vector<bool> perComponentStable;
  SharedReport shared;
  bool uniformResolventOk = false;
  std::vector<std::string> notes;
};

inline Verdict strong_stability_verdict(const SchemeSpec& spec, const BoundarySpec& bc) {
  Verdict v;
  const int q = spec.q;
  v.perComponentStable.assign(static_cast<std::size_t>(q), false);

  CharSystem cs = characteristic_coeffs(spec);
  if (cs.rBar() == 0) {
    v.notes.push_back("no spatial decay direction: the subdiagonal coefficient vanishes");
    return v;
  }
  if (cs.rBar() != 1) {
    v.notes.push_back("wide left stencil: the stable branch is not a scalar function");
    return v;
  }

  v.shared = shared_eigenvalues(spec, bc);
  BiPoly bpoly = boundary_char_poly(spec, bc);

  // an eigenvalue outside the closed unit disk settles everything
  std::vector<ModeReport> growing;
  for (const SharedCouple& c : v.shared.couples) {
    if (!c.isEigenvalue || std::abs(c.z) <= 1 + 1e-8L) continue;
    growing.push_back(classify_mode(spec, cs, bpoly, bc, c.z));
  }
  if (!growing.empty()) {
    v.value = VerdictValue::GR_L;
    v.drivingModes = growing;
    v.modes = std::move(growing);
    return v;
  }

  if (v.shared.degenerate) {
    v.notes.push_back("bulk and boundary characteristic polynomials share a factor");
    return v;
  }
  if (!v.shared.unmatchedZ.empty()) {
    v.notes.push_back("unresolved eliminant roots on or outside the unit circle");
    return v;
  }

  // candidate circle points: shared couples plus eigenvector pole points
  std::vector<CxL> cand;
  auto push_cand = [&](const CxL& z) {
    CxL b = z / std::abs(z);
    for (const CxL& u : cand)
      if (std::abs(u - b) <= 1e-7L) return;
    cand.push_back(b);
  };
  for (const SharedCouple& c : v.shared.couples)
    if (std::abs(std::abs(c.z) - 1.0L) <= 1e-8L) push_cand(c.z);
  PoleScan ps = eigenvector_pole_candidates(spec, cs);
  if (ps.degenerate) {
    v.notes.push_back("eigenvector pole scan degenerated; candidates may be incomplete");
    return v;
  }
  for (const CxL& z : ps.z) push_cand(z);
  std::sort(cand.begin(), cand.end(),
            [](const CxL& a, const CxL& b) { return detail::arg2pi(a) < detail::arg2pi(b); });

  std::vector<ModeReport> muModes, ssooModes, badModes;
  bool muExtended = false;
  std::vector<int> worstOrder(static_cast<std::size_t>(q), 0);
  for (const CxL& z0 : cand) {
    ModeReport m;
    try {
      m = classify_mode(spec, cs, bpoly, bc, z0);
    } catch (const SchemeError& e) {
      v.notes.push_back(std::string("classification failed at a circle point: ") + e.what());
      badModes.push_back(m);
      continue;
    }
    v.modes.push_back(m);
    if (!m.resolved) {
      badModes.push_back(m);
      continue;
    }
    if (m.box() == "□⊙⋆")
      v.notes.push_back(
          "mode □⊙⋆ observed: harmless, but no example of it was known");
    if (m.kl.kind == KlKind::Zero) {
      muModes.push_back(m);
      if (m.spatial == SpatialCharacter::Extended) muExtended = true;
      continue;
    }
    if (m.kl.kind == KlKind::Finite && !m.eigvecContinuous) {
      if (m.poleOrders.order[0] > 0) {
        v.notes.push_back("conserved moment itself loses boundedness: unclassified shape");
        badModes.push_back(m);
        continue;
      }
      ssooModes.push_back(m);
      for (int i = 0; i < q; ++i)
        worstOrder[static_cast<std::size_t>(i)] =
            std::max(worstOrder[static_cast<std::size_t>(i)],
                     m.poleOrders.order[static_cast<std::size_t>(i)]);
    }
  }

  try {
    v.uniformResolventOk = uniform_resolvent_check(cs);
  } catch (const SchemeError& e) {
    v.uniformResolventOk = false;
    v.notes.push_back(std::string("resolvent probe failed: ") + e.what());
  }

  if (!badModes.empty()) {
    v.drivingModes = badModes;
    return v;  // Indeterminate: never guess past an unresolved mode
  }
  if (!muModes.empty()) {
    v.value = muExtended ? VerdictValue::MU_E : VerdictValue::MU_L;
    v.drivingModes = muModes;
    return v;
  }
  if (!v.uniformResolventOk) {
    v.notes.push_back("uniform resolvent bound not confirmed on the circle grid");
    return v;
  }
  if (!ssooModes.empty()) {
    v.value = VerdictValue::SSOO;
    v.drivingModes = ssooModes;
    for (int i = 0; i < q; ++i)
      v.perComponentStable[static_cast<std::size_t>(i)] =
          worstOrder[static_cast<std::size_t>(i)] == 0;
    return v;
  }
  v.value = VerdictValue::SS;
  v.perComponentStable.assign(static_cast<std::size_t>(q), true);
  return v;
}

}  // namespace lbstab
