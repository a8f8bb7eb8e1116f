#pragma once

#include "lbstab/scheme.hpp"

namespace lbstab {

inline Rat binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rat r = 1;
  for (int t = 0; t < k; ++t) r = r * Rat(n - t) / Rat(t + 1);
  return r;
}

// Two-velocity scheme: c = (1, -1), diffusive relaxation on the flux moment.
inline SchemeSpec make_d1q2(const Rat& s2, const Rat& courant, const Rat& lambda = 1) {
  SchemeSpec sp;
  sp.name = "d1q2";
  sp.q = 2;
  sp.velocities = {1, -1};
  sp.M = RatMat(2, 2);
  sp.M(0, 0) = 1;
  sp.M(0, 1) = 1;
  sp.M(1, 0) = 1;
  sp.M(1, 1) = -1;
  sp.eq = {Rat(1), courant};
  sp.s = {Rat(0), s2};
  sp.lambda = lambda;
  sp.courant = courant;
  return sp;
}

// Three-velocity scheme generalizing Lax-Wendroff: c = (0, 1, -1).
inline SchemeSpec make_d1q3_lw(const Rat& s2, const Rat& s3, const Rat& courant,
                               const Rat& lambda = 1) {
  SchemeSpec sp;
  sp.name = "d1q3-lw";
  sp.q = 3;
  sp.velocities = {0, 1, -1};
  sp.M = RatMat(3, 3);
  sp.M(0, 0) = 1;
  sp.M(0, 1) = 1;
  sp.M(0, 2) = 1;
  sp.M(1, 1) = 1;
  sp.M(1, 2) = -1;
  sp.M(2, 1) = 1;
  sp.M(2, 2) = 1;
  sp.eq = {Rat(1), courant, courant * courant};
  sp.s = {Rat(0), s2, s3};
  sp.lambda = lambda;
  sp.courant = courant;
  return sp;
}

// Fourth-order three-velocity scheme: LW frame with tuned third equilibrium
// moment and both relaxation rates pinned at 2.
inline SchemeSpec make_d1q3_o4(const Rat& courant, const Rat& lambda = 1) {
  SchemeSpec sp = make_d1q3_lw(Rat(2), Rat(2), courant, lambda);
  sp.name = "d1q3-o4";
  sp.eq[2] = (1 + 2 * courant * courant) / 3;
  return sp;
}

struct UnknownCatalogId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& scheme_catalog_ids() {
  static const std::vector<std::string> ids = {"d1q2", "d1q3-lw", "d1q3-o4"};
  return ids;
}

inline const std::vector<std::string>& bc_catalog_ids_q2() {
  static const std::vector<std::string> ids = {
      "bounce-back",       "anti-bounce-back", "two-step-anti-bounce-back",
      "extrapolation",     "kinetic-dirichlet", "extrapolated-equilibrium",
      "future",            "invented"};
  return ids;
}

inline const std::vector<std::string>& bc_catalog_ids_q3() {
  static const std::vector<std::string> ids = {"bounce-back", "anti-bounce-back",
                                               "two-step-anti-bounce-back", "extrapolation",
                                               "kinetic-dirichlet"};
  return ids;
}

inline SchemeSpec make_catalog_scheme(const std::string& id, const Rat& s2, const Rat& s3,
                                      const Rat& courant, const Rat& lambda = 1) {
  if (id == "d1q2") return make_d1q2(s2, courant, lambda);
  if (id == "d1q3-lw") return make_d1q3_lw(s2, s3, courant, lambda);
  if (id == "d1q3-o4") return make_d1q3_o4(courant, lambda);
  throw UnknownCatalogId("unknown scheme id '" + id + "'");
}

// Boundary conditions are keyed by the velocity layout: the single incoming
// distribution (c = +1) is filled from the layout's outgoing (c = -1) and
// resting distributions. sigma parametrizes the extrapolation families.
inline BoundarySpec make_catalog_bc(const SchemeSpec& spec, const std::string& id, int sigma = 1) {
  auto inflow = spec.inflow();
  if (inflow.size() != 1 || spec.velocities[static_cast<std::size_t>(inflow[0])] != 1)
    throw UnknownCatalogId("catalog boundary conditions need exactly one incoming velocity +1");
  int in = inflow[0];
  int out = -1, rest = -1;
  for (int i = 0; i < spec.q; ++i) {
    if (spec.velocities[static_cast<std::size_t>(i)] == -1) out = i;
    if (spec.velocities[static_cast<std::size_t>(i)] == 0) rest = i;
  }
  if (out < 0) throw UnknownCatalogId("catalog boundary conditions need an outgoing velocity -1");
  if (sigma < 1 || sigma > 4) throw UnknownCatalogId("sigma must be in [1, 4]");

  BoundarySpec bc;
  bc.name = id;
  auto add = [&](int l, int h, Rat v) { bc.weights.push_back({in, l, 1, h, std::move(v)}); };

  if (id == "bounce-back") {
    add(out, 0, Rat(1));
  } else if (id == "anti-bounce-back") {
    add(out, 0, Rat(-1));
  } else if (id == "two-step-anti-bounce-back") {
    if (rest >= 0) add(rest, 0, Rat(-1));
    add(out, 1, Rat(-1));
  } else if (id == "extrapolation") {
    for (int h = 0; h < sigma; ++h)
      add(in, h, (h % 2 ? Rat(-1) : Rat(1)) * binom(sigma, h + 1));
  } else if (id == "kinetic-dirichlet") {
    // ghost value is pure source data
  } else if (id == "extrapolated-equilibrium" && spec.q == 2) {
    Rat half = (1 + spec.courant) / 2;
    for (int h = 0; h < sigma; ++h) {
      Rat v = half * (h % 2 ? Rat(-1) : Rat(1)) * binom(sigma, h + 1);
      add(in, h, v);
      add(out, h, v);
    }
  } else if (id == "future" && spec.q == 2) {
    Rat half = (1 + spec.courant) / 2;
    add(in, 0, half);
    add(out, 2, half);
  } else if (id == "invented" && spec.q == 2) {
    add(in, 0, Rat(1));
    add(out, 0, Rat(2));
  } else {
    std::string avail;
    for (const auto& x : (spec.q == 2 ? bc_catalog_ids_q2() : bc_catalog_ids_q3()))
      avail += (avail.empty() ? "" : ", ") + x;
    throw UnknownCatalogId("unknown boundary condition '" + id + "' (available: " + avail + ")");
  }
  return bc;
}

}  // namespace lbstab
