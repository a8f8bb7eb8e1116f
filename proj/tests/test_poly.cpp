#include "lbstab/poly.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lbstab;

namespace {

RatPoly rp(std::initializer_list<Rat> lowToHigh) { return RatPoly(std::vector<Rat>(lowToHigh)); }

TEST_CASE("polynomial arithmetic basics") {
  RatPoly z = RatPoly::x();
  RatPoly p = (z + RatPoly(Rat(1))) * (z - RatPoly(Rat(1)));
  CHECK(p == rp({-1, 0, 1}));
  CHECK(p(Rat(3)) == Rat(8));
  CHECK(p.derivative() == rp({0, 2}));

  auto [q, r] = divmod(rp({-1, 0, 0, 1}), rp({-1, 1}));
  CHECK(q == rp({1, 1, 1}));
  CHECK(r.zero());

  CHECK(rp({1, 2, 1}).taylor_shift(Rat(1)) == rp({4, 4, 1}));  // (x+2)^2
  CHECK(rp({0, 0, 1}).taylor_shift(Rat(-2)) == rp({4, -4, 1}));
}

TEST_CASE("gcd over the rationals") {
  RatPoly a = rp({-1, 1}) * rp({2, 1});   // (z-1)(z+2)
  RatPoly b = rp({-1, 1}) * rp({-3, 1});  // (z-1)(z-3)
  CHECK(poly_gcd(a, b) == rp({-1, 1}));
  CHECK(poly_gcd(rp({1, 1}), rp({-3, 1})) == rp({1}));
  CHECK(poly_gcd(RatPoly{}, rp({2, 4})) == rp({Rat(1, 2), 1}));  // monic of 4z+2
}

TEST_CASE("unit-disk root location, exact recursions") {
  // strictly inside
  CHECK(schur_stable_exact(rp({Rat(-1, 2), 1})));
  CHECK_FALSE(schur_stable_exact(rp({-1, 1})));

  // z = 1 simple: on the circle
  CHECK(von_neumann_exact(rp({-1, 1})));
  CHECK(simple_von_neumann_exact(rp({-1, 1})));

  // (z-1)^2: double circle root
  RatPoly dbl = rp({1, -2, 1});
  CHECK(von_neumann_exact(dbl));
  CHECK_FALSE(simple_von_neumann_exact(dbl));
  CHECK_FALSE(schur_stable_exact(dbl));

  // z^2 - 1: two simple circle roots
  CHECK(simple_von_neumann_exact(rp({-1, 0, 1})));

  // (z-1)(z+1)^2: triple mix, -1 is double
  RatPoly m = rp({-1, 1}) * rp({1, 1}) * rp({1, 1});
  CHECK(von_neumann_exact(m));
  CHECK_FALSE(simple_von_neumann_exact(m));

  // root outside
  CHECK_FALSE(von_neumann_exact(rp({-2, 1})));
  CHECK_FALSE(von_neumann_exact(rp({2, 1, 1})));  // roots -1/2 +- i sqrt(7)/2, modulus sqrt(2)

  // mixed: circle root plus interior root
  CHECK(simple_von_neumann_exact(rp({-1, 0, 1}) * rp({Rat(-1, 2), 1})));
}

TEST_CASE("exact recursions agree with numeric roots on random polynomials") {
  std::mt19937 rng(20240517);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> degd(1, 5);

  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int d = degd(rng);
    std::vector<Rat> c(static_cast<std::size_t>(d) + 1);
    for (auto& ck : c) ck = Rat(num(rng), den(rng));
    RatPoly p(c);
    if (p.deg() < 1) continue;

    auto roots = poly_roots(p);
    // skip polynomials with roots too close to the unit circle or to each
    // other for the numeric reference to classify reliably
    bool ambiguous = false;
    long double margin = 1e-6L;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      long double m = std::abs(roots[i]);
      if (std::abs(m - 1.0L) < margin && std::abs(m - 1.0L) > 1e-12L) ambiguous = true;
      for (std::size_t j = i + 1; j < roots.size(); ++j)
        if (std::abs(roots[i] - roots[j]) < margin && std::abs(roots[i] - roots[j]) > 1e-12L)
          ambiguous = true;
    }
    if (ambiguous) continue;

    bool inside = true, closed = true, simple = true;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      long double m = std::abs(roots[i]);
      if (m >= 1.0L - 1e-9L) inside = false;
      if (m > 1.0L + 1e-9L) closed = false;
      if (std::abs(m - 1.0L) <= 1e-9L)
        for (std::size_t j = 0; j < roots.size(); ++j)
          if (j != i && std::abs(roots[i] - roots[j]) <= 1e-9L) simple = false;
    }

    CHECK(schur_stable_exact(p) == inside);
    CHECK(von_neumann_exact(p) == closed);
    CHECK(simple_von_neumann_exact(p) == (closed && simple));
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("resultant in kappa, exact elimination") {
  RatPoly z = RatPoly::x();
  BiPoly P, Q;

  // P = kappa^2 - z, Q = kappa - z  ->  Res = z^2 - z
  P.c = {-z, RatPoly{}, RatPoly(Rat(1))};
  Q.c = {-z, RatPoly(Rat(1))};
  CHECK(resultant_kappa(P, Q) == rp({0, -1, 1}));

  // Res(kappa - a, kappa - b) = a - b
  BiPoly A, B;
  A.c = {-(z * z), RatPoly(Rat(1))};
  B.c = {rp({-1, -3}), RatPoly(Rat(1))};
  CHECK(resultant_kappa(A, B) == (z * z) - rp({1, 3}));

  // degree-zero edge cases
  BiPoly K;
  K.c = {rp({0, 1})};  // constant in kappa, = z
  CHECK(resultant_kappa(K, P) == rp({0, 0, 1}));
  CHECK(resultant_kappa(P, K) == rp({0, 0, 1}));
}

TEST_CASE("resultant matches the numeric root product") {
  // P = (z+2)kappa^3 + z kappa - 1, Q = kappa^2 + (z-1)kappa + 3z
  RatPoly z = RatPoly::x();
  BiPoly P, Q;
  P.c = {rp({-1}), z, RatPoly{}, rp({2, 1})};
  Q.c = {Rat(3) * z, rp({-1, 1}), RatPoly(Rat(1))};
  RatPoly res = resultant_kappa(P, Q);

  for (Rat z0 : {Rat(1, 3), Rat(-2, 5), Rat(3)}) {
    std::vector<Rat> pc, qc;
    for (int k = 0; k <= P.deg(); ++k) pc.push_back(P.coeff(k)(z0));
    for (int k = 0; k <= Q.deg(); ++k) qc.push_back(Q.coeff(k)(z0));
    RatPoly pz(pc), qz(qc);
    REQUIRE(pz.deg() == 3);

    auto kroots = poly_roots(pz);
    CxL prod = std::pow(to_cxl(pz.lead()), static_cast<long double>(qz.deg()));
    for (CxL k : kroots) prod *= ceval(to_cvec(qz), k);
    CxL direct = to_cxl(res(z0));
    CHECK(std::abs(prod - direct) < 1e-10L * (1.0L + std::abs(direct)));
  }
}

TEST_CASE("common factors are recovered by the bivariate gcd") {
  RatPoly z = RatPoly::x();
  BiPoly common, P, Q;
  common.c = {-z, RatPoly(Rat(1))};  // kappa - z
  BiPoly f1, f2;
  f1.c = {RatPoly(Rat(1)), RatPoly(Rat(1))};       // kappa + 1
  f2.c = {z, RatPoly{}, RatPoly(Rat(1))};          // kappa^2 + z
  P = common * f1;
  Q = common * f2;

  CHECK(resultant_kappa(P, Q).zero());
  BiPoly g = bi_gcd_kappa(P, Q);
  REQUIRE(g.deg() == 1);
  // vanishes along kappa = z
  CHECK((g.coeff(0) + g.coeff(1) * z).zero());
}

TEST_CASE("numeric roots of known polynomials") {
  // (z - 1/2)(z - 2)(z + 3)
  RatPoly p = rp({Rat(-1, 2), 1}) * rp({-2, 1}) * rp({3, 1});
  auto roots = poly_roots(p);
  REQUIRE(roots.size() == 3);
  std::vector<long double> expected = {-3.0L, 0.5L, 2.0L};
  for (long double e : expected) {
    long double best = 1e30L;
    for (CxL r : roots) best = std::min(best, std::abs(r - CxL(e)));
    CHECK(best < 1e-15L);
  }

  auto ir = poly_roots(rp({-2, 0, 1}));  // +- sqrt(2)
  REQUIRE(ir.size() == 2);
  CHECK(std::abs(std::abs(ir[0].real()) - 1.41421356237309504880L) < 1e-17L);

  auto ci = poly_roots(rp({1, 0, 1}));  // +- i
  REQUIRE(ci.size() == 2);
  CHECK(std::abs(ci[0].imag() * ci[1].imag() + 1.0L) < 1e-15L);

  // double root: companion + polish stays within a loose bound
  auto dr = poly_roots(rp({1, -2, 1}));
  REQUIRE(dr.size() == 2);
  for (CxL r : dr) CHECK(std::abs(r - CxL(1)) < 1e-6L);

  // zero roots are exact
  auto zr = poly_roots(rp({0, 0, -1, 1}));
  REQUIRE(zr.size() == 3);
  CHECK(zr[0] == CxL(0));
  CHECK(zr[1] == CxL(0));
}

TEST_CASE("polishing recovers full precision from a coarse seed") {
  RatPoly p = rp({-2, 0, 1});
  CxL seed(1.414, 0.0);
  CxL z = polish_root(to_cvec(p), seed);
  CHECK(std::abs(z - CxL(1.41421356237309504880L)) < 1e-18L);
}

TEST_CASE("polynomial printing is readable") {
  CHECK(poly_str(rp({Rat(1, 2), 0, -1})) == "-z^2 + 1/2");
  CHECK(poly_str(RatPoly{}) == "0");
  CHECK(poly_str(rp({0, 1})) == "z");
}

}  // namespace
