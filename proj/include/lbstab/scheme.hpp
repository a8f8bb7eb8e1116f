#pragma once

#include "lbstab/poly.hpp"

#include <map>
#include <string>

namespace lbstab {

using CMatL = Eigen::Matrix<CxL, Eigen::Dynamic, Eigen::Dynamic>;
using CVecL = Eigen::Matrix<CxL, Eigen::Dynamic, 1>;

struct SchemeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relax-then-transport MRT scheme for a single conserved moment.
// All data exact-rational; numeric promotion happens at evaluation sites.
struct SchemeSpec {
  std::string name = "custom";
  int q = 0;
  std::vector<int> velocities;  // dimensionless integers c_i, pairwise distinct
  RatMat M;                     // q x q moment matrix
  RatVec eq;                    // equilibrium coefficients, eq[0] = 1
  RatVec s;                     // relaxation rates, s[0] unused by the dynamics
  Rat lambda = 1;               // lattice velocity, > 0
  Rat courant = 0;              // C = V / lambda, nonzero

  int r() const {
    int m = 0;
    for (int c : velocities) m = std::max(m, c);
    return m;
  }
  int p() const {
    int m = 0;
    for (int c : velocities) m = std::max(m, -c);
    return m;
  }

  // indices of populations entering the domain through the left edge
  std::vector<int> inflow() const {
    std::vector<int> idx;
    for (int i = 0; i < q; ++i)
      if (velocities[static_cast<std::size_t>(i)] > 0) idx.push_back(i);
    return idx;
  }

  // Throws on structural violations; returns soft warnings (relaxation range).
  std::vector<std::string> validate() const {
    if (q < 2) throw SchemeError("need at least two discrete velocities");
    if (static_cast<int>(velocities.size()) != q) throw SchemeError("velocity count mismatch");
    for (std::size_t i = 0; i < velocities.size(); ++i)
      for (std::size_t j = i + 1; j < velocities.size(); ++j)
        if (velocities[i] == velocities[j]) throw SchemeError("velocities must be distinct");
    if (M.rows != q || M.cols != q) throw SchemeError("moment matrix shape mismatch");
    if (M.det() == 0) throw SchemeError("moment matrix is singular");
    if (static_cast<int>(eq.size()) != q) throw SchemeError("equilibrium length mismatch");
    if (eq[0] != 1) throw SchemeError("equilibrium must have first entry 1");
    if (static_cast<int>(s.size()) != q) throw SchemeError("relaxation length mismatch");
    if (lambda <= 0) throw SchemeError("lattice velocity must be positive");
    if (courant == 0) throw SchemeError("Courant number must be nonzero");
    if (r() < 1) throw SchemeError("no incoming velocity: boundary analysis needs max c_i >= 1");
    std::vector<std::string> warnings;
    for (int k = 1; k < q; ++k)
      if (s[static_cast<std::size_t>(k)] <= 0 || s[static_cast<std::size_t>(k)] > 2)
        warnings.push_back("relaxation rate s" + std::to_string(k + 1) + " = " +
                           rat_str(s[static_cast<std::size_t>(k)]) + " outside (0, 2]");
    return warnings;
  }
};

enum class SourceKind { dirac, constant, alternating, sampled };

inline std::string source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::dirac: return "dirac";
    case SourceKind::constant: return "constant";
    case SourceKind::alternating: return "alternating";
    case SourceKind::sampled: return "sampled";
  }
  return "?";
}

// One ghost-fill term: distribution i at ghost cell -j reads
// value * (post-relaxation distribution l at inner cell h).
struct BoundaryWeight {
  int i = 0, l = 0, j = 1, h = 0;
  Rat value;
};

struct BoundarySpec {
  std::string name = "custom";
  std::vector<BoundaryWeight> weights;
  SourceKind source = SourceKind::dirac;
  std::vector<Rat> samples;  // used when source == sampled

  int stencil_width() const {
    int w = 0;
    for (const auto& bw : weights)
      if (bw.value != 0) w = std::max(w, bw.h);
    return w;
  }

  Rat source_value(long n) const {
    switch (source) {
      case SourceKind::dirac: return n == 0 ? Rat(1) : Rat(0);
      case SourceKind::constant: return Rat(1);
      case SourceKind::alternating: return n % 2 == 0 ? Rat(1) : Rat(-1);
      case SourceKind::sampled:
        return n >= 0 && n < static_cast<long>(samples.size())
                   ? samples[static_cast<std::size_t>(n)]
                   : Rat(0);
    }
    return Rat(0);
  }

  void validate(const SchemeSpec& spec) const {
    for (const auto& bw : weights) {
      if (bw.i < 0 || bw.i >= spec.q || bw.l < 0 || bw.l >= spec.q)
        throw SchemeError("boundary weight distribution index out of range");
      int ci = spec.velocities[static_cast<std::size_t>(bw.i)];
      if (ci <= 0) throw SchemeError("boundary weights only fill incoming distributions");
      if (bw.j < 1 || bw.j > ci) throw SchemeError("ghost depth out of range for its velocity");
      if (bw.h < 0) throw SchemeError("inner stencil point must be nonnegative");
    }
  }
};

// K := I + diag(s) (eq e1^T - I); row 1 is e1^T since eq[0] = 1.
inline RatMat relaxation_matrix(const SchemeSpec& spec) {
  RatMat K = RatMat::identity(spec.q);
  for (int i = 0; i < spec.q; ++i) {
    for (int j = 0; j < spec.q; ++j) {
      Rat target = (j == 0) ? spec.eq[static_cast<std::size_t>(i)] : Rat(0);
      Rat current = (i == j) ? Rat(1) : Rat(0);
      K(i, j) = current + spec.s[static_cast<std::size_t>(i)] * (target - current);
    }
  }
  return K;
}

// Matrix pencil with integer power offsets: value(k) = sum mats[l] k^(lo+l).
struct RatPencil {
  int lo = 0;
  std::vector<RatMat> mats;

  int hi() const { return lo + static_cast<int>(mats.size()) - 1; }
  const RatMat& at(int power) const { return mats.at(static_cast<std::size_t>(power - lo)); }
  bool has(int power) const { return power >= lo && power <= hi(); }
};

// Bulk shift blocks: E_l = sum over velocities c_i = -l of M e_i e_i^T M^{-1} K.
inline RatPencil bulk_pencil(const SchemeSpec& spec) {
  RatMat K = relaxation_matrix(spec);
  RatMat Minv = spec.M.inverse();
  RatPencil pen;
  pen.lo = -spec.r();
  pen.mats.assign(static_cast<std::size_t>(spec.r() + spec.p() + 1), RatMat(spec.q, spec.q));
  for (int i = 0; i < spec.q; ++i) {
    int l = -spec.velocities[static_cast<std::size_t>(i)];
    RatMat term = spec.M * outer(unit_vec(spec.q, i), unit_vec(spec.q, i)) * Minv * K;
    pen.mats[static_cast<std::size_t>(l - pen.lo)] =
        pen.mats[static_cast<std::size_t>(l - pen.lo)] + term;
  }
  return pen;
}

// Exact amplification matrix at rational kappa != 0.
inline RatMat amplification_matrix_exact(const SchemeSpec& spec, const Rat& kappa) {
  if (kappa == 0) throw SchemeError("amplification matrix undefined at kappa = 0");
  RatPencil pen = bulk_pencil(spec);
  RatMat acc(spec.q, spec.q);
  for (int l = pen.lo; l <= pen.hi(); ++l) {
    Rat kp = rat_pow(kappa, l);
    acc = acc + kp * pen.at(l);
  }
  return acc;
}

inline CMatL to_cmat(const RatMat& m) {
  CMatL r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(i, j) = to_cxl(m(i, j));
  return r;
}

inline CMatL pencil_eval(const RatPencil& pen, CxL kappa) {
  if (kappa == CxL(0)) throw SchemeError("pencil evaluation at kappa = 0");
  int q = pen.mats.front().rows;
  CMatL acc = CMatL::Zero(q, q);
  for (int l = pen.lo; l <= pen.hi(); ++l) acc += to_cmat(pen.at(l)) * std::pow(kappa, l);
  return acc;
}

inline CMatL amplification_matrix(const SchemeSpec& spec, CxL kappa) {
  return pencil_eval(bulk_pencil(spec), kappa);
}

struct Consistency {
  bool ok = false;
  Rat residual;
};

// Transport consistency at first order: e1^T M diag(c) M^{-1} eq == C.
inline Consistency check_consistency(const SchemeSpec& spec) {
  RatMat Minv = spec.M.inverse();
  RatVec diag_c_Minv_eq(spec.q);
  RatVec Minv_eq = Minv * spec.eq;
  for (int i = 0; i < spec.q; ++i)
    diag_c_Minv_eq[static_cast<std::size_t>(i)] =
        Rat(spec.velocities[static_cast<std::size_t>(i)]) * Minv_eq[static_cast<std::size_t>(i)];
  RatVec v = spec.M * diag_c_Minv_eq;
  Rat residual = v[0] - spec.courant;
  return {residual == 0, residual};
}

// Boundary row pencil for ghost row j: incoming distributions with c_i > j are
// replaced by the kinetic ghost fill; everything else transports as in bulk.
inline RatPencil boundary_pencil(const SchemeSpec& spec, const BoundarySpec& bc, int j) {
  if (j < 0 || j >= spec.r()) throw SchemeError("boundary row index out of range");
  bc.validate(spec);
  RatMat K = relaxation_matrix(spec);
  RatMat Minv = spec.M.inverse();
  int w = bc.stencil_width();
  RatPencil pen;
  pen.lo = -j;
  int hi = std::max(spec.p(), w);
  pen.mats.assign(static_cast<std::size_t>(hi - pen.lo + 1), RatMat(spec.q, spec.q));
  auto add = [&](int power, const RatMat& term) {
    pen.mats[static_cast<std::size_t>(power - pen.lo)] =
        pen.mats[static_cast<std::size_t>(power - pen.lo)] + term;
  };
  for (int i = 0; i < spec.q; ++i) {
    int ci = spec.velocities[static_cast<std::size_t>(i)];
    if (ci <= j) {
      add(-ci, spec.M * outer(unit_vec(spec.q, i), unit_vec(spec.q, i)) * Minv * K);
      continue;
    }
    // ghost read at depth ci - j
    for (const auto& bw : bc.weights) {
      if (bw.value == 0 || bw.i != i || bw.j != ci - j) continue;
      add(bw.h - j,
          bw.value * (spec.M * outer(unit_vec(spec.q, i), unit_vec(spec.q, bw.l)) * Minv * K));
    }
  }
  return pen;
}

// Moment-space boundary source column for row j at time n:
// every incoming ghost pair carries the scalar source signal.
inline RatVec moment_source(const SchemeSpec& spec, const BoundarySpec& bc, int j, long n) {
  RatVec kinetic(static_cast<std::size_t>(spec.q));
  Rat g = bc.source_value(n);
  for (int i = 0; i < spec.q; ++i) {
    int ci = spec.velocities[static_cast<std::size_t>(i)];
    if (ci > j) kinetic[static_cast<std::size_t>(i)] = g;
  }
  return spec.M * kinetic;
}

inline RatVec moment_source(const SchemeSpec& spec, const BoundarySpec& bc, long n) {
  return moment_source(spec, bc, 0, n);
}

}  // namespace lbstab
