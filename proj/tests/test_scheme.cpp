#include "lbstab/catalog.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lbstab;

namespace {

RatMat mat2(Rat a, Rat b, Rat c, Rat d) {
  RatMat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

TEST_CASE("relaxation matrix of the two-velocity scheme") {
  Rat s2(3, 2), C(-1, 2);
  SchemeSpec sp = make_d1q2(s2, C);
  CHECK(sp.validate().empty());
  RatMat K = relaxation_matrix(sp);
  CHECK(K == mat2(1, 0, C * s2, 1 - s2));
}

TEST_CASE("zero relaxation keeps the identity") {
  SchemeSpec sp = make_d1q2(Rat(0), Rat(1, 2));
  RatMat K = relaxation_matrix(sp);
  CHECK(K == RatMat::identity(2));
  CHECK_FALSE(sp.validate().empty());  // s2 = 0 is flagged, not fatal
}

TEST_CASE("relaxation matrix spectrum") {
  SchemeSpec sp = make_d1q3_lw(Rat(1, 2), Rat(5, 4), Rat(-1, 3));
  RatMat K = relaxation_matrix(sp);
  RatMat I = RatMat::identity(3);
  for (Rat ev : {Rat(1), Rat(1) - Rat(1, 2), Rat(1) - Rat(5, 4)})
    CHECK((K - ev * I).det() == Rat(0));
  // conservation row
  CHECK(K(0, 0) == Rat(1));
  CHECK(K(0, 1) == Rat(0));
  CHECK(K(0, 2) == Rat(0));
}

TEST_CASE("amplification matrix at kappa = 1 is the relaxation matrix") {
  for (const SchemeSpec& sp :
       {make_d1q2(Rat(3, 2), Rat(-1, 2)), make_d1q3_lw(Rat(1), Rat(1), Rat(1, 2)),
        make_d1q3_o4(Rat(-1, 4))}) {
    CHECK(amplification_matrix_exact(sp, Rat(1)) == relaxation_matrix(sp));
  }
}

TEST_CASE("symmetric velocities give a kappa-independent determinant") {
  Rat s2(3, 2);
  SchemeSpec sp = make_d1q2(s2, Rat(-1, 2));
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 7);
  int tested = 0;
  while (tested < 16) {
    Rat kappa(num(rng), den(rng));
    if (kappa == 0) continue;
    CHECK(amplification_matrix_exact(sp, kappa).det() == 1 - s2);
    ++tested;
  }
  // and the three-velocity layout: det = (1-s2)(1-s3) * kappa^0
  SchemeSpec lw = make_d1q3_lw(Rat(1, 2), Rat(4, 3), Rat(1, 4));
  CHECK(amplification_matrix_exact(lw, Rat(7, 5)).det() ==
        (1 - Rat(1, 2)) * (1 - Rat(4, 3)));
}

TEST_CASE("amplification matrix rejects kappa = 0") {
  SchemeSpec sp = make_d1q2(Rat(1), Rat(1, 2));
  CHECK_THROWS_AS(amplification_matrix_exact(sp, Rat(0)), SchemeError);
  CHECK_THROWS_AS(amplification_matrix(sp, CxL(0)), SchemeError);
}

TEST_CASE("amplification eigenvalues on the circle for the sharp corner case") {
  // s2 = 2, C = 1, kappa = -1: eigenvalues are -1 and 1
  SchemeSpec sp = make_d1q2(Rat(2), Rat(1));
  CMatL A = amplification_matrix(sp, CxL(-1));
  Eigen::ComplexEigenSolver<CMatL> es(A);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(std::abs(es.eigenvalues()(i)) - 1.0L) < 1e-15L);
}

TEST_CASE("bulk pencil blocks are rank-one and sum to the relaxation matrix") {
  for (const SchemeSpec& sp :
       {make_d1q2(Rat(7, 5), Rat(2, 3)), make_d1q3_lw(Rat(1, 3), Rat(9, 5), Rat(-2, 5)),
        make_d1q3_o4(Rat(3, 8))}) {
    RatPencil pen = bulk_pencil(sp);
    CHECK(pen.lo == -sp.r());
    CHECK(pen.hi() == sp.p());
    RatMat sum(sp.q, sp.q);
    for (int l = pen.lo; l <= pen.hi(); ++l) {
      CHECK(pen.at(l).rank() <= 1);
      sum = sum + pen.at(l);
    }
    CHECK(sum == relaxation_matrix(sp));
  }
}

TEST_CASE("two-velocity bulk blocks match the hand computation") {
  Rat s2(3, 2), C(-1, 2);
  SchemeSpec sp = make_d1q2(s2, C);
  RatPencil pen = bulk_pencil(sp);
  Rat h(1, 2);
  CHECK(pen.at(-1) == mat2(h * (1 + C * s2), h * (1 - s2), h * (1 + C * s2), h * (1 - s2)));
  CHECK(pen.at(1) == mat2(h * (1 - C * s2), h * (s2 - 1), h * (C * s2 - 1), h * (1 - s2)));
}

TEST_CASE("consistency check") {
  CHECK(check_consistency(make_d1q2(Rat(3, 2), Rat(-1, 2))).ok);
  CHECK(check_consistency(make_d1q3_lw(Rat(1), Rat(1), Rat(3, 4))).ok);
  CHECK(check_consistency(make_d1q3_o4(Rat(-1, 4))).ok);

  SchemeSpec off = make_d1q2(Rat(3, 2), Rat(-1, 2));
  off.eq[1] = off.courant + 1;
  Consistency c = check_consistency(off);
  CHECK_FALSE(c.ok);
  CHECK(c.residual == Rat(1));
}

TEST_CASE("boundary pencil for bounce-back") {
  Rat s2(3, 2), C(-1, 2);
  SchemeSpec sp = make_d1q2(s2, C);
  BoundarySpec bb = make_catalog_bc(sp, "bounce-back");
  RatPencil pen = boundary_pencil(sp, bb, 0);
  CHECK(pen.lo == 0);
  CHECK(pen.hi() == 1);
  Rat h(1, 2);
  // incoming distribution replaced by the outgoing one at the wall
  CHECK(pen.at(0) == mat2(h * (1 - C * s2), h * (s2 - 1), h * (1 - C * s2), h * (s2 - 1)));
  // outgoing distribution transports exactly as in bulk
  CHECK(pen.at(1) == bulk_pencil(sp).at(1));
}

TEST_CASE("kinetic Dirichlet pencil is the bulk pencil minus incoming rows") {
  SchemeSpec sp = make_d1q3_lw(Rat(1), Rat(1), Rat(1, 2));
  BoundarySpec kd = make_catalog_bc(sp, "kinetic-dirichlet");
  RatPencil pen = boundary_pencil(sp, kd, 0);
  RatPencil bulk = bulk_pencil(sp);
  RatMat Minv = sp.M.inverse();
  RatMat K = relaxation_matrix(sp);
  for (int l = 0; l <= pen.hi(); ++l) {
    RatMat expect = bulk.at(l);
    for (int i = 0; i < sp.q; ++i)
      if (sp.velocities[static_cast<std::size_t>(i)] == -l &&
          sp.velocities[static_cast<std::size_t>(i)] > 0)
        expect = expect - sp.M * outer(unit_vec(sp.q, i), unit_vec(sp.q, i)) * Minv * K;
    CHECK(pen.at(l) == expect);
  }
}

TEST_CASE("boundary pencil is bulk transport plus declared fill terms") {
  SchemeSpec sp = make_d1q3_lw(Rat(5, 4), Rat(3, 4), Rat(-1, 2));
  RatPencil bulk = bulk_pencil(sp);
  RatMat Minv = sp.M.inverse();
  RatMat K = relaxation_matrix(sp);
  for (const std::string& id : bc_catalog_ids_q3()) {
    BoundarySpec bc = make_catalog_bc(sp, id, 2);
    RatPencil pen = boundary_pencil(sp, bc, 0);
    for (int l = 0; l <= pen.hi(); ++l) {
      RatMat expect(sp.q, sp.q);
      if (bulk.has(l)) {
        expect = bulk.at(l);
        for (int i = 0; i < sp.q; ++i)  // incoming populations are overridden
          if (sp.velocities[static_cast<std::size_t>(i)] == -l &&
              sp.velocities[static_cast<std::size_t>(i)] > 0)
            expect = expect - sp.M * outer(unit_vec(sp.q, i), unit_vec(sp.q, i)) * Minv * K;
      }
      for (const BoundaryWeight& w : bc.weights)
        if (w.h == l)
          expect = expect + w.value * (sp.M * outer(unit_vec(sp.q, w.i), unit_vec(sp.q, w.l)) *
                                       Minv * K);
      CHECK(pen.at(l) == expect);
    }
  }
}

TEST_CASE("extrapolation stencil width and powers") {
  SchemeSpec sp = make_d1q2(Rat(3, 2), Rat(-1, 2));
  BoundarySpec ex2 = make_catalog_bc(sp, "extrapolation", 2);
  REQUIRE(ex2.weights.size() == 2);
  CHECK(ex2.weights[0].value == Rat(2));
  CHECK(ex2.weights[1].value == Rat(-1));
  CHECK(ex2.stencil_width() == 1);
  RatPencil pen = boundary_pencil(sp, ex2, 0);
  CHECK(pen.lo == 0);
  CHECK(pen.hi() == 1);
  CHECK_FALSE(pen.at(0) == RatMat(2, 2));
  CHECK_FALSE(pen.at(1) == bulk_pencil(sp).at(1));  // inflow extrapolation adds at power 1

  BoundarySpec ex4 = make_catalog_bc(sp, "extrapolation", 4);
  CHECK(ex4.stencil_width() == 3);
  CHECK(ex4.weights[3].value == Rat(-1));  // (-1)^3 binom(4,4)
  CHECK(ex4.weights[1].value == Rat(-6));  // (-1)^1 binom(4,2)
}

TEST_CASE("boundary source columns") {
  SchemeSpec sp2 = make_d1q2(Rat(3, 2), Rat(-1, 2));
  BoundarySpec bc2 = make_catalog_bc(sp2, "bounce-back");
  RatVec g0 = moment_source(sp2, bc2, 0);
  CHECK(g0 == RatVec{Rat(1), Rat(1)});
  CHECK(moment_source(sp2, bc2, 1) == RatVec{Rat(0), Rat(0)});

  SchemeSpec sp3 = make_d1q3_lw(Rat(1), Rat(1), Rat(1, 2));
  BoundarySpec bc3 = make_catalog_bc(sp3, "anti-bounce-back");
  CHECK(moment_source(sp3, bc3, 0) == RatVec{Rat(1), Rat(1), Rat(1)});

  bc2.source = SourceKind::alternating;
  CHECK(moment_source(sp2, bc2, 3) == RatVec{Rat(-1), Rat(-1)});
  bc2.source = SourceKind::sampled;
  bc2.samples = {Rat(0), Rat(5)};
  CHECK(moment_source(sp2, bc2, 1) == RatVec{Rat(5), Rat(5)});
  CHECK(moment_source(sp2, bc2, 2) == RatVec{Rat(0), Rat(0)});
}

TEST_CASE("scheme validation catches structural errors") {
  SchemeSpec sp = make_d1q2(Rat(1), Rat(1, 2));
  sp.velocities = {1, 1};
  CHECK_THROWS_AS(sp.validate(), SchemeError);

  sp = make_d1q2(Rat(1), Rat(1, 2));
  sp.M(1, 0) = 1;
  sp.M(1, 1) = 1;
  CHECK_THROWS_AS(sp.validate(), SchemeError);

  sp = make_d1q2(Rat(1), Rat(1, 2));
  sp.eq[0] = 2;
  CHECK_THROWS_AS(sp.validate(), SchemeError);

  sp = make_d1q2(Rat(1), Rat(0));
  CHECK_THROWS_AS(sp.validate(), SchemeError);

  sp = make_d1q2(Rat(1), Rat(1, 2));
  sp.velocities = {-1, -2};
  CHECK_THROWS_AS(sp.validate(), SchemeError);

  CHECK(make_d1q2(Rat(5, 2), Rat(1, 2)).validate().size() == 1);  // s2 > 2 warned
}

TEST_CASE("boundary weight validation") {
  SchemeSpec sp = make_d1q2(Rat(1), Rat(1, 2));
  BoundarySpec bad;
  bad.weights.push_back({1, 0, 1, 0, Rat(1)});  // fills an outgoing distribution
  CHECK_THROWS_AS(bad.validate(sp), SchemeError);
  bad.weights = {{0, 0, 2, 0, Rat(1)}};  // ghost deeper than the velocity
  CHECK_THROWS_AS(bad.validate(sp), SchemeError);
  bad.weights = {{0, 5, 1, 0, Rat(1)}};  // population index out of range
  CHECK_THROWS_AS(bad.validate(sp), SchemeError);
  bad.weights = {{0, 1, 1, -1, Rat(1)}};  // negative stencil point
  CHECK_THROWS_AS(bad.validate(sp), SchemeError);
}

TEST_CASE("catalog ids and errors") {
  CHECK(scheme_catalog_ids().size() == 3);
  CHECK(bc_catalog_ids_q2().size() == 8);
  CHECK(bc_catalog_ids_q3().size() == 5);
  CHECK_THROWS_AS(make_catalog_scheme("d1q9", Rat(1), Rat(1), Rat(1, 2)), UnknownCatalogId);

  SchemeSpec sp2 = make_d1q2(Rat(3, 2), Rat(-1, 2));
  CHECK_THROWS_AS(make_catalog_bc(sp2, "no-such-bc"), UnknownCatalogId);
  CHECK_THROWS_AS(make_catalog_bc(sp2, "extrapolation", 5), UnknownCatalogId);

  SchemeSpec sp3 = make_d1q3_lw(Rat(1), Rat(1), Rat(1, 2));
  CHECK_THROWS_AS(make_catalog_bc(sp3, "future"), UnknownCatalogId);

  // parameter-dependent weights pick up the Courant number
  BoundarySpec fut = make_catalog_bc(sp2, "future");
  REQUIRE(fut.weights.size() == 2);
  CHECK(fut.weights[0].value == Rat(1, 4));
  CHECK(fut.weights[1].h == 2);

  BoundarySpec ee3 = make_catalog_bc(sp2, "extrapolated-equilibrium", 3);
  CHECK(ee3.weights.size() == 6);
  CHECK(ee3.stencil_width() == 2);

  BoundarySpec ts3 = make_catalog_bc(sp3, "two-step-anti-bounce-back");
  REQUIRE(ts3.weights.size() == 2);
  BoundarySpec ts2 = make_catalog_bc(sp2, "two-step-anti-bounce-back");
  REQUIRE(ts2.weights.size() == 1);
  CHECK(ts2.weights[0].h == 1);
}

}  // namespace
