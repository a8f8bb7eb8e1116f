#include "lbstab/series.hpp"

#include "lbstab/catalog.hpp"
#include "lbstab/classify.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

using namespace lbstab;

namespace {

using RS = TSeries<Rat>;

TEST_CASE("series arithmetic and inversion") {
  RS one = RS::constant(6, Rat(1));
  RS w = RS::var(6);
  RS u = one + w;
  RS iu = u.inv();
  for (int k = 0; k < 6; ++k) CHECK(iu.c[k] == (k % 2 ? Rat(-1) : Rat(1)));
  RS prod = u * iu;
  CHECK(prod.c[0] == Rat(1));
  for (int k = 1; k < 6; ++k) CHECK(prod.c[k] == Rat(0));
  CHECK((w * w * w).valuation() == 3);
  CHECK(one.valuation() == 0);
}

TEST_CASE("quadratic extension field arithmetic") {
  QuadExt r2(Rat(1), Rat(1), Rat(2));   // 1 + sqrt(2)
  QuadExt s2(Rat(1), Rat(-1), Rat(2));  // 1 - sqrt(2)
  CHECK(r2 * s2 == QuadExt(Rat(-1)));
  CHECK(r2 + s2 == QuadExt(Rat(2)));
  QuadExt inv = r2.inv();
  CHECK(r2 * inv == QuadExt(1));
  // rationals mix with any extension
  CHECK(QuadExt(Rat(3)) * r2 == QuadExt(Rat(3), Rat(3), Rat(2)));
  CHECK(std::abs(to_cxl(r2) - CxL(2.4142135623730950488L)) < 1e-18L);
  QuadExt ineg(Rat(0), Rat(1), Rat(-4));  // 2i
  CHECK(std::abs(to_cxl(ineg) - CxL(0.0L, 2.0L)) < 1e-18L);
}

TEST_CASE("branch expansion at a simple root") {
  // kappa^2 = z around (1,1): kappa = sqrt(1+w), binomial coefficients
  RatPoly z = RatPoly::x();
  BiPoly P;
  P.c = {-z, RatPoly{}, RatPoly(Rat(1))};
  auto s = series_root_simple<Rat>(P, Rat(1), Rat(1), 4);
  CHECK(s.c[0] == Rat(1));
  CHECK(s.c[1] == Rat(1, 2));
  CHECK(s.c[2] == Rat(-1, 8));
  CHECK(s.c[3] == Rat(1, 16));
  CHECK(s.c[4] == Rat(-5, 128));

  // residual check: P(1+w, s(w)) vanishes to the truncation order
  auto r = eval_bipoly_at_series(P, Rat(1), s);
  for (int k = 0; k <= 4; ++k) CHECK(r.c[k] == Rat(0));
}

TEST_CASE("branch point with a nonzero gradient is rejected") {
  // kappa^2 - 2 z kappa + 1 at (1,1): square-root branch point, not a node
  RatPoly z = RatPoly::x();
  BiPoly P;
  P.c = {RatPoly(Rat(1)), Rat(-2) * z, RatPoly(Rat(1))};
  CHECK_THROWS(series_root_simple<Rat>(P, Rat(1), Rat(1), 3));
  CHECK_THROWS(double_root_slopes(P, Rat(1), Rat(1)));
}

TEST_CASE("node with two rational slopes") {
  // (kappa - z)(kappa - 2z) crossing at the origin
  RatPoly z = RatPoly::x();
  BiPoly P;
  P.c = {Rat(2) * (z * z), Rat(-3) * z, RatPoly(Rat(1))};
  auto sl = double_root_slopes(P, Rat(0), Rat(0));
  Rat a = sl.s1.a, b = sl.s2.a;
  CHECK(sl.s1.b == 0);
  CHECK(((a == 1 && b == 2) || (a == 2 && b == 1)));

  auto s = series_root_double<Rat>(P, Rat(0), Rat(0), Rat(1), 4);
  CHECK(s.c[1] == Rat(1));
  for (int k : {0, 2, 3, 4}) CHECK(s.c[static_cast<std::size_t>(k)] == Rat(0));
}

TEST_CASE("node with irrational slopes stays exact in the extension") {
  // kappa^2 = 2 z^2: slopes +- sqrt(2)
  RatPoly z = RatPoly::x();
  BiPoly P;
  P.c = {Rat(-2) * (z * z), RatPoly{}, RatPoly(Rat(1))};
  auto sl = double_root_slopes(P, Rat(0), Rat(0));
  CHECK(sl.s1.b != 0);
  CHECK(sl.s1.a == 0);
  CHECK(sl.s1.b * sl.s1.b * sl.s1.D == Rat(2));

  auto s = series_root_double<QuadExt>(P, Rat(0), QuadExt(0), sl.s1, 3);
  CHECK(s.c[1] == sl.s1);
  CHECK(s.c[2] == QuadExt(0));
  CHECK(s.c[3] == QuadExt(0));
}

TEST_CASE("node with curvature beyond the slope") {
  // kappa^2 = z^2 (1 + z): branches kappa = +- z sqrt(1+z)
  RatPoly z = RatPoly::x();
  BiPoly P;
  P.c = {-(z * z) - (z * z * z), RatPoly{}, RatPoly(Rat(1))};
  auto sl = double_root_slopes(P, Rat(0), Rat(0));
  Rat s1 = sl.s1.a;
  REQUIRE((s1 == 1 || s1 == -1));

  auto s = series_root_double<Rat>(P, Rat(0), Rat(0), Rat(1), 4);
  CHECK(s.c[1] == Rat(1));
  CHECK(s.c[2] == Rat(1, 2));
  CHECK(s.c[3] == Rat(-1, 8));
  CHECK(s.c[4] == Rat(1, 16));
}

TEST_CASE("Laurent windows track valuation through inversion") {
  // w^2 (1 + w)
  Laurent<Rat> l(2, {Rat(1), Rat(1), Rat(0), Rat(0)});
  CHECK(l.order() == 2);
  CHECK(l.leading() == Rat(1));

  auto li = l.inv();
  CHECK(li.off == -2);
  CHECK(li.at(-2) == Rat(1));
  CHECK(li.at(-1) == Rat(-1));
  CHECK(li.at(0) == Rat(1));

  auto prod = l * li;
  CHECK(prod.at(0) == Rat(1));
  CHECK(prod.at(1) == Rat(0));

  // negative powers
  Laurent<Rat> w(1, {Rat(1), Rat(0), Rat(0)});
  CHECK(w.pow(-3).order() == -3);
  CHECK(w.pow(-3).leading() == Rat(1));

  // sums align offsets
  auto sum = l + w;
  CHECK(sum.order() == 1);
  CHECK(sum.at(2) == Rat(1));

  // leading zeros are stripped exactly
  Laurent<Rat> lz(0, {Rat(0), Rat(0), Rat(5), Rat(1)});
  CHECK(lz.order() == 2);
  CHECK(lz.leading() == Rat(5));
}

TEST_CASE("rational reconstruction from floating point") {
  CHECK(rat_nearest(5.0L / 6.0L) == Rat(5, 6));
  CHECK(rat_nearest(-22.0L / 7.0L) == Rat(-22, 7));
  CHECK(rat_nearest(3.0L) == Rat(3));
  CHECK(rat_nearest(0.0L) == Rat(0));
  CHECK(rat_nearest(355.0L / 113.0L) == Rat(355, 113));
  // an irrational value lands on some convergent; exactness is the caller's
  // check, as in recognize_root below
  Rat pi = rat_nearest(3.14159265358979323846L, 1000);
  CHECK(denominator(pi) <= 1000);
}

TEST_CASE("recognizing roots as exact algebraic numbers") {
  // (k - 1/5)(k + 3)(k^2 - 2): rational and quadratic parts
  RatPoly p{Rat(6, 5), Rat(-28, 5), Rat(-13, 5), Rat(14, 5), Rat(1)};
  QuadExt r1 = recognize_root(p, CxL(0.2L));
  CHECK(r1 == QuadExt(Rat(1, 5)));
  QuadExt r2 = recognize_root(p, CxL(1.41421356237309515L));
  CHECK(r2.b != 0);
  CHECK(r2.b * r2.b * r2.D == Rat(2));
  CHECK(r2.a == 0);
  CHECK(feval(p, r2) == QuadExt());
  CHECK_THROWS(recognize_root(p, CxL(0.7L)));  // not a root at all

  // complex pair from a negative discriminant
  RatPoly q{Rat(5), Rat(-2), Rat(1)};  // roots 1 +- 2i
  QuadExt rc = recognize_root(q, CxL(1.0L, 2.0L));
  CHECK(rc.a == 1);
  CHECK(rc.b * rc.b * rc.D == Rat(-4));

  // multiplicity bookkeeping
  RatPoly dbl{Rat(1), Rat(-2), Rat(1)};  // (k - 1)^2
  CHECK(root_multiplicity(dbl, QuadExt(Rat(1))) == 2);
  CHECK(root_multiplicity(dbl, QuadExt(Rat(2))) == 0);
}

TEST_CASE("exact branch of the spatial root at circle points") {
  SchemeSpec sp = make_d1q2(Rat(3, 2), Rat(-1, 2));
  CharSystem cs = characteristic_coeffs(sp);
  ExactBranch br = stable_branch_series(cs, Rat(1), 4);
  CHECK(br.kappa0 == QuadExt(Rat(-1, 5)));
  CHECK(br.multiplicity == 1);
  CHECK(br.kappa.c[1] == QuadExt(Rat(2, 5)));
  Continuation cont = stable_root_continuation(cs, CxL(1));
  CHECK(std::abs(to_cxl(br.kappa.c[0]) - cont.kappa) < 1e-12L);
  CHECK(std::abs(to_cxl(br.kappa.c[1]) - cont.dkdz) < 1e-9L);

  // double root at the fourth-order scheme: node with a surd slope
  SchemeSpec o4 = make_d1q3_o4(Rat(-1, 4));
  CharSystem cso = characteristic_coeffs(o4);
  ExactBranch no = stable_branch_series(cso, Rat(-1), 4);
  CHECK(no.kappa0 == QuadExt(Rat(1)));
  CHECK(no.multiplicity == 2);
  CHECK(no.kappa.c[1].b != 0);
  Continuation co = stable_root_continuation(cso, CxL(-1));
  CHECK(std::abs(to_cxl(no.kappa.c[1]) - co.dkdz) < 1e-9L);
}

TEST_CASE("exact scalar windows agree with the radial fits") {
  struct Case {
    SchemeSpec sp;
    std::string bc;
    int sigma;
    Rat z0;
    bool pinCoeff;  // radial fit resolves the coefficient here
  };
  std::vector<Case> cases = {
      {make_d1q2(Rat(3, 2), Rat(-1, 2)), "bounce-back", 1, Rat(1), true},
      {make_d1q2(Rat(3, 2), Rat(-1, 2)), "bounce-back", 1, Rat(-1), true},
      {make_d1q2(Rat(2), Rat(-1, 2)), "extrapolation", 1, Rat(-1), true},
      {make_d1q2(Rat(2), Rat(-1, 2)), "extrapolation", 2, Rat(-1), true},
      {make_d1q2(Rat(2), Rat(-1, 2)), "extrapolation", 3, Rat(-1), false},
      {make_d1q2(Rat(2), Rat(-1, 2)), "extrapolation", 4, Rat(-1), false},
      {make_d1q2(Rat(2), Rat(-1, 2)), "two-step-anti-bounce-back", 1, Rat(-1), true},
      {make_d1q2(Rat(2), Rat(-1, 2)), "two-step-anti-bounce-back", 1, Rat(1), true},
      {make_d1q2(Rat(2), Rat(-1, 2)), "bounce-back", 1, Rat(-1), true},
      {make_d1q2(Rat(3, 2), Rat(1, 2)), "extrapolation", 2, Rat(1), true},
      {make_d1q3_o4(Rat(-1, 4)), "anti-bounce-back", 1, Rat(-1), true},
      {make_d1q3_o4(Rat(-1, 4)), "kinetic-dirichlet", 1, Rat(-1), true},
      {make_d1q3_o4(Rat(-1, 4)), "kinetic-dirichlet", 1, Rat(1), true},
      {make_d1q3_o4(Rat(-1, 4)), "bounce-back", 1, Rat(1), true},
      {make_d1q3_lw(Rat(1, 2), Rat(3, 2), Rat(-3, 4)), "anti-bounce-back", 1, Rat(1), true},
      {make_d1q3_lw(Rat(1, 2), Rat(3, 2), Rat(-3, 4)), "bounce-back", 1, Rat(1), true},
  };
  for (const Case& c : cases) {
    INFO(c.sp.name << " " << c.bc << " sigma=" << c.sigma << " z0=" << rat_str(c.z0));
    BoundarySpec bc = make_catalog_bc(c.sp, c.bc, c.sigma);
    CharSystem cs = characteristic_coeffs(c.sp);
    KlSeries s = kl_series(c.sp, cs, bc, c.z0);
    KlFit fit = kl_order_fit(c.sp, cs, bc, to_cxl(c.z0));

    int ord = s.value.order();
    KlKind kind = ord > 0 ? KlKind::Zero : (ord < 0 ? KlKind::Pole : KlKind::Finite);
    CHECK(kind == fit.kind);
    CHECK(std::abs(ord) == fit.order);
    if (c.pinCoeff) {
      CxL lead = to_cxl(s.value.leading());
      CHECK(std::abs(lead - fit.coefficient) < 1e-5L * std::max(1.0L, std::abs(lead)));
    }

    PoleOrders po = eigenvector_pole_orders(c.sp, cs, to_cxl(c.z0));
    REQUIRE(s.phiOrder.size() == po.order.size());
    for (std::size_t i = 0; i < po.order.size(); ++i)
      if (po.resolved[i]) CHECK(s.phiOrder[i] == po.order[i]);
  }
}

TEST_CASE("extrapolation scalar zeros in closed form") {
  // inflow side: order sigma and leading coefficient (C + 1) / (2 C^sigma)
  SchemeSpec in = make_d1q2(Rat(3, 2), Rat(1, 2));
  for (int sigma = 1; sigma <= 4; ++sigma) {
    KlSeries s = kl_series(in, make_catalog_bc(in, "extrapolation", sigma), Rat(1));
    CHECK(s.value.order() == sigma);
    Rat want = (in.courant + 1) / (2 * rat_pow(in.courant, sigma));
    CHECK(s.value.leading() == QuadExt(want));
  }

  // outflow side at s2 = 2: the eigenvector pole eats one order
  SchemeSpec out = make_d1q2(Rat(2), Rat(-1, 2));
  std::vector<Rat> lead = {Rat(-1), Rat(2), Rat(-4), Rat(8)};
  for (int sigma = 1; sigma <= 4; ++sigma) {
    KlSeries s = kl_series(out, make_catalog_bc(out, "extrapolation", sigma), Rat(-1));
    CHECK(s.value.order() == sigma - 1);
    CHECK(s.value.leading() == QuadExt(lead[static_cast<std::size_t>(sigma - 1)]));
  }
}

TEST_CASE("two-step anti-bounce-back scalar limits at the circle") {
  SchemeSpec sp = make_d1q2(Rat(2), Rat(-1, 2));
  BoundarySpec bc = make_catalog_bc(sp, "two-step-anti-bounce-back");
  KlSeries sm = kl_series(sp, bc, Rat(-1));
  CHECK(sm.value.order() == 0);
  CHECK(sm.value.leading() == QuadExt(Rat(-1)));
  KlSeries sp1 = kl_series(sp, bc, Rat(1));
  CHECK(sp1.value.order() == 0);
  CHECK(sp1.value.leading() == QuadExt(Rat(1)));
}

TEST_CASE("node expansion pins the surd residues of the fourth-order scheme") {
  SchemeSpec o4 = make_d1q3_o4(Rat(-1, 4));
  KlSeries ab = kl_series(o4, make_catalog_bc(o4, "anti-bounce-back"), Rat(-1));
  CHECK(ab.multiplicity == 2);
  CHECK(ab.value.order() == -1);
  CHECK(ab.value.leading() == QuadExt(Rat(5, 4)));

  KlSeries kd = kl_series(o4, make_catalog_bc(o4, "kinetic-dirichlet"), Rat(-1));
  CHECK(kd.value.order() == -1);
  CHECK(kd.value.leading() == QuadExt(Rat(3, 4), Rat(1, 4), Rat(41, 4)));

  KlSeries kp = kl_series(o4, make_catalog_bc(o4, "kinetic-dirichlet"), Rat(1));
  CHECK(kp.value.order() == -1);
  CHECK(kp.value.leading() == QuadExt(Rat(1, 4)));
}

TEST_CASE("exact window evaluates the scalar off the circle") {
  SchemeSpec sp = make_d1q2(Rat(3, 2), Rat(-1, 2));
  BoundarySpec bc = make_catalog_bc(sp, "invented");
  KlSeries s = kl_series(sp, bc, Rat(2));
  CHECK(s.kappa0.b != 0);  // the stable root itself is a surd here
  CxL direct = kl_scalar(sp, bc, CxL(2));
  CHECK(std::abs(to_cxl(s.value.at(0)) - direct) < 1e-12L);
}

}  // namespace
