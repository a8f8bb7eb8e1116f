#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "charsys.hpp"
#include "eigvec.hpp"
#include "roots.hpp"
#include "scheme.hpp"

namespace lbstab {

// Index of the single population entering the domain from the left (velocity +1).
inline int incoming_index(const SchemeSpec& spec) {
  if (spec.r() != 1) throw SchemeError("half-line boundary analysis needs max velocity +1");
  for (int i = 0; i < spec.q; ++i)
    if (spec.velocities[static_cast<std::size_t>(i)] == 1) return i;
  throw SchemeError("no population with velocity +1");
}

// Moment vectors annihilated by the rank-one matrix that advects data from the
// right neighbor. A basis can be chosen independent of z; dimension q - 1.
inline std::vector<RatVec> kernel_zero_basis(const SchemeSpec& spec) {
  int pi = incoming_index(spec);
  RatMat K = relaxation_matrix(spec);
  RatMat Em1 =
      spec.M * outer(unit_vec(spec.q, pi), unit_vec(spec.q, pi)) * spec.M.inverse() * K;
  std::vector<RatVec> basis = Em1.nullspace();
  if (static_cast<int>(basis.size()) != spec.q - 1)
    throw SchemeError("kernel dimension is not q - 1: incoming read degenerates");
  return basis;
}

// det [ M e_pi | (zI - E_0) phi_0^1 | ... | (zI - E_0) phi_0^{q-1} ].
// Polynomial in z, proportional to d_{-1}; the constant depends on the basis.
inline RatPoly sigma_bulk_poly(const SchemeSpec& spec, const std::vector<RatVec>& basis) {
  const int q = spec.q;
  int pi = incoming_index(spec);
  if (static_cast<int>(basis.size()) != q - 1)
    throw SchemeError("need q - 1 kernel vectors");
  RatMat K = relaxation_matrix(spec);
  RatMat Minv = spec.M.inverse();
  RatMat E0(q, q);
  for (int i = 0; i < q; ++i)
    if (spec.velocities[static_cast<std::size_t>(i)] == 0)
      E0 = E0 + spec.M * outer(unit_vec(q, i), unit_vec(q, i)) * Minv * K;

  std::vector<std::vector<BiPoly>> a(static_cast<std::size_t>(q),
                                     std::vector<BiPoly>(static_cast<std::size_t>(q)));
  for (int i = 0; i < q; ++i) {
    a[static_cast<std::size_t>(i)][0] = BiPoly(RatPoly(spec.M(i, pi)));
    for (int l = 1; l < q; ++l) {
      const RatVec& phi = basis[static_cast<std::size_t>(l - 1)];
      RatVec e0phi = E0 * phi;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] =
          BiPoly(RatPoly{-e0phi[static_cast<std::size_t>(i)], phi[static_cast<std::size_t>(i)]});
    }
  }
  return bipoly_det(a).coeff(0);
}

inline RatPoly sigma_bulk_poly(const SchemeSpec& spec) {
  return sigma_bulk_poly(spec, kernel_zero_basis(spec));
}

inline CxL sigma_bulk(const SchemeSpec& spec, const CxL& z) {
  return ceval(sigma_bulk_poly(spec), z);
}

// Length-two chain at the origin of the spatial variable. phi0 spans the
// kernel of the incoming read, scaled by det(M) so the closure determinants
// below carry no basis factor; phiTilde solves the next order in kappa, with
// the unconstrained component pinned to one.
struct JordanChain {
  RatVec phi0;                    // eigenvector, independent of z
  std::vector<RatPoly> phiTilde;  // generalized eigenvector, polynomial in z
};

// Available exactly when the subdiagonal characteristic coefficient vanishes
// identically (s2 = 2/(1 - C) for two velocities), which doubles the root of
// the spatial characteristic polynomial at the origin.
inline JordanChain jordan_chain_degenerate(const SchemeSpec& spec) {
  spec.validate();
  if (spec.q != 2) throw SchemeError("length-two chains are built for two-velocity schemes");
  int pi = incoming_index(spec);
  CharSystem cs = characteristic_coeffs(spec);
  if (cs.rBar() > 0)
    throw SchemeError("subdiagonal coefficient does not vanish: origin is a simple spatial root");
  if (cs.rBar() < 0) throw SchemeError("origin root multiplicity exceeds two");

  RatMat MinvK = spec.M.inverse() * relaxation_matrix(spec);
  RatVec a{spec.M(0, pi), spec.M(1, pi)};       // image of the incoming read
  RatVec w{MinvK(pi, 0), MinvK(pi, 1)};         // row annihilated by its kernel
  Rat dM = spec.M.det();
  RatVec phi0{dM * w[1], -dM * w[0]};
  if (phi0[0] == 0 && phi0[1] == 0)
    throw SchemeError("kernel direction undefined: incoming read degenerates");

  RatMat E0(2, 2);
  for (int i = 0; i < 2; ++i)
    if (spec.velocities[static_cast<std::size_t>(i)] == 0)
      E0 = E0 + spec.M * outer(unit_vec(2, i), unit_vec(2, i)) * MinvK;

  // the chain closes iff (zI - E_0) phi0 stays collinear to M e_pi for all z
  RatVec e0phi = E0 * phi0;
  std::vector<RatPoly> rhs(2);
  for (std::size_t i = 0; i < 2; ++i)
    rhs[i] = RatPoly{-e0phi[i], phi0[i]};
  std::size_t istar = a[0] != 0 ? 0 : 1;
  RatPoly rho = (Rat(1) / a[istar]) * rhs[istar];
  for (std::size_t i = 0; i < 2; ++i)
    if (!(rhs[i] - a[i] * rho).zero())
      throw SchemeError("generalized eigenvector system is inconsistent");

  std::size_t jstar = w[1] != 0 ? 1 : 0;
  std::vector<RatPoly> phiTilde(2);
  phiTilde[1 - jstar] = RatPoly(Rat(1));
  phiTilde[jstar] = (Rat(1) / w[jstar]) * (rho - RatPoly(w[1 - jstar]));
  return {phi0, phiTilde};
}

// Boundary closure of the chain solution, whose two coefficients multiply
// phi0 at depth zero and the pair (phiTilde at zero, phi0 at one). Stores the
// Cramer polynomials: delta c0 = source * datum and delta cTilde = tilde *
// datum, with tilde identically zero, so the datum feeds a single coefficient
// exactly as in the generic case.
struct DegenerateKl {
  JordanChain chain;
  std::vector<std::vector<RatPoly>> system;  // columns index the coefficients
  RatPoly delta;                             // determinant of the closure
  RatPoly source;                            // det [ M e_pi | second column ]
  RatPoly tilde;                             // det [ first column | M e_pi ]
};

inline DegenerateKl degenerate_kl_system(const SchemeSpec& spec, const BoundarySpec& bc) {
  bc.validate(spec);
  JordanChain ch = jordan_chain_degenerate(spec);
  int pi = incoming_index(spec);
  RatPencil pen = boundary_pencil(spec, bc, 0);
  RatMat B0 = pen.has(0) ? pen.at(0) : RatMat(2, 2);
  RatMat B1 = pen.has(1) ? pen.at(1) : RatMat(2, 2);

  std::vector<std::vector<RatPoly>> sys(2, std::vector<RatPoly>(2));
  for (int i = 0; i < 2; ++i) {
    sys[static_cast<std::size_t>(i)][0] = RatPoly{0, ch.phi0[static_cast<std::size_t>(i)]};
    sys[static_cast<std::size_t>(i)][1] =
        RatPoly{0, 1} * ch.phiTilde[static_cast<std::size_t>(i)];
    for (int j = 0; j < 2; ++j) {
      sys[static_cast<std::size_t>(i)][0] =
          sys[static_cast<std::size_t>(i)][0] -
          RatPoly(B0(i, j) * ch.phi0[static_cast<std::size_t>(j)]);
      sys[static_cast<std::size_t>(i)][1] =
          sys[static_cast<std::size_t>(i)][1] -
          B0(i, j) * ch.phiTilde[static_cast<std::size_t>(j)] -
          RatPoly(B1(i, j) * ch.phi0[static_cast<std::size_t>(j)]);
    }
  }

  DegenerateKl out;
  out.delta = sys[0][0] * sys[1][1] - sys[1][0] * sys[0][1];
  out.source = spec.M(0, pi) * sys[1][1] - spec.M(1, pi) * sys[0][1];
  out.tilde = spec.M(1, pi) * sys[0][0] - spec.M(0, pi) * sys[1][0];
  out.chain = std::move(ch);
  out.system = std::move(sys);
  return out;
}

// Row vector e_pi^T kappa^{-1} minus the boundary weights filling the depth-1
// ghost of the incoming population, each at kappa^(read point).
inline std::vector<CxL> incoming_ghost_row(const SchemeSpec& spec, const BoundarySpec& bc,
                                           const CxL& kappa) {
  int pi = incoming_index(spec);
  std::vector<CxL> row(static_cast<std::size_t>(spec.q));
  row[static_cast<std::size_t>(pi)] = CxL(1) / kappa;
  for (const auto& w : bc.weights) {
    if (w.i != pi || w.j != 1 || w.value == 0) continue;
    row[static_cast<std::size_t>(w.l)] -= to_cxl(w.value) * std::pow(kappa, w.h);
  }
  return row;
}

namespace detail {

inline CxL kl_product(const SchemeSpec& spec, const BoundarySpec& bc, const CxL& z,
                      const CxL& kappa) {
  const int q = spec.q;
  CVecL phi = stable_eigenvector_at(spec, z, kappa);
  RatMat MinvK = spec.M.inverse() * relaxation_matrix(spec);
  std::vector<CxL> row = incoming_ghost_row(spec, bc, kappa);
  CxL out(0);
  for (int i = 0; i < q; ++i) {
    CxL acc(0);
    for (int j = 0; j < q; ++j) acc += to_cxl(MinvK(i, j)) * phi(j);
    out += row[static_cast<std::size_t>(i)] * acc;
  }
  return out;
}

}  // namespace detail

// Scalar whose zeros on the closed exterior of the unit circle flag boundary
// modes fed by the stable spatial root. Outside the circle the value is exact
// up to rounding; on the circle it is the radial limit, which blows up when
// the eigenvector has an uncompensated pole.
inline CxL kl_scalar(const SchemeSpec& spec, const CharSystem& cs, const BoundarySpec& bc,
                     const CxL& z) {
  long double az = std::abs(z);
  if (az > 1 + 1e-8L) return detail::kl_product(spec, bc, z, stable_root(cs, z));
  if (az < 1 - 1e-6L)
    throw std::domain_error("Kreiss-Lopatinskii scalar expects a point with |z| >= 1");
  CxL base = z / az;
  std::vector<long double> grid = detail::pole_fit_grid();
  std::vector<long double> u;
  std::vector<CxL> f;
  for (long double d : grid) {
    CxL zd = base * (1 + d);
    u.push_back(std::sqrt(d));
    f.push_back(detail::kl_product(spec, bc, zd, stable_root(cs, zd)));
  }
  std::size_t tail = 8;
  std::vector<long double> ut(u.end() - tail, u.end());
  std::vector<CxL> ft(f.end() - tail, f.end());
  return detail::extrapolate_to_zero(ut, ft, nullptr);
}

inline CxL kl_scalar(const SchemeSpec& spec, const BoundarySpec& bc, const CxL& z) {
  CharSystem cs = characteristic_coeffs(spec);
  return kl_scalar(spec, cs, bc, z);
}

}  // namespace lbstab
