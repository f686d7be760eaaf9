#include <doctest.h>

#include <cmath>

#include "dirac_green/halfplane.hpp"
#include "dirac_green/rng.hpp"
#include "testutil.hpp"

using namespace dg;
using doctest::Approx;

namespace {
const HalfPlanePoint kI = HalfPlanePoint::unit_i();
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(HalfPlanePoint(cplx(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(HalfPlanePoint(cplx(0.0, -1.0)), std::domain_error);
  CHECK_THROWS_AS(ClosedHalfPlanePoint(cplx(0.0, -1e-30)), std::domain_error);
  CHECK_NOTHROW(ClosedHalfPlanePoint(cplx(5.0, 0.0)));
  CHECK_THROWS_AS(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(0, 1)),
                                ClosedHalfPlanePoint(cplx(0, 1)), 0.0),
                  std::domain_error);
}

TEST_CASE("hyp_dist values") {
  CHECK(hyp_dist(kI, kI) == 0.0);
  CHECK(hyp_dist(kI, HalfPlanePoint(cplx(0, 2))) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(hyp_dist(kI, HalfPlanePoint(cplx(1, 1))) ==
        Approx(std::acosh(1.5)).epsilon(1e-12));
}

TEST_CASE("hyp_dist metric axioms") {
  Rng rng(101);
  for (int t = 0; t < 1000; ++t) {
    const HalfPlanePoint a = tu::random_point(rng);
    const HalfPlanePoint b = tu::random_point(rng);
    const HalfPlanePoint c = tu::random_point(rng);
    const double dab = hyp_dist(a, b);
    CHECK(dab >= 0.0);
    CHECK(dab == hyp_dist(b, a));
    CHECK(hyp_dist(a, a) == 0.0);
    CHECK(dab <= hyp_dist(a, c) + hyp_dist(c, b) + 1e-10);
    CHECK(dab <= hyp_dist_upper(a, b) * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("approx_equal tolerance") {
  const HalfPlanePoint a(cplx(0.5, 1.0));
  const HalfPlanePoint b(cplx(0.5 + 5e-13, 1.0));
  const HalfPlanePoint c(cplx(0.5 + 5e-9, 1.0));
  CHECK(approx_equal(a, b));
  CHECK_FALSE(approx_equal(a, c));
  CHECK(approx_equal(a, c, 1e-8));
}

TEST_CASE("hyp_dist_upper values") {
  CHECK(hyp_dist_upper(kI, kI) == 0.0);
  CHECK(hyp_dist_upper(kI, HalfPlanePoint(cplx(0, 2))) ==
        Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("moebius_apply values") {
  const MoebiusCoeffs phi(ClosedHalfPlanePoint(cplx(0, 1)),
                          ClosedHalfPlanePoint(cplx(0, 1)), 1.0);
  const cplx v = moebius_apply(phi, kI).value();
  CHECK(std::abs(v - cplx(0, 2.0 / 3.0)) < 1e-15);

  const MoebiusCoeffs phi2(ClosedHalfPlanePoint(cplx(0, 0)),
                           ClosedHalfPlanePoint(cplx(0, 1)), 1.0);
  CHECK(std::abs(moebius_apply(phi2, kI).value() - cplx(0, 2)) < 1e-15);

  // Fixed point of the a = b = i, c = 1 map: upper root of i z^2 - z + i = 0.
  const HalfPlanePoint fix(cplx(0, (std::sqrt(5.0) - 1.0) / 2.0));
  CHECK(std::abs(moebius_apply(phi, fix).value() - fix.value()) < 1e-15);
}

TEST_CASE("half-plane preservation") {
  Rng rng(102);
  for (int t = 0; t < 1000; ++t) {
    const MoebiusCoeffs phi = tu::random_coeffs(rng);
    const HalfPlanePoint z = tu::random_point(rng);
    CHECK(moebius_apply(phi, z).im() > 0.0);
  }
}

TEST_CASE("contraction_factor values") {
  CHECK(contraction_factor(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(0, 1)),
                                         ClosedHalfPlanePoint(cplx(0, 1)), 1.0)) ==
        Approx(0.5));
  CHECK(contraction_factor(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(2, 0)),
                                         ClosedHalfPlanePoint(cplx(0, 1)), 1.0)) ==
        1.0);
  CHECK(contraction_factor(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(0, 2)),
                                         ClosedHalfPlanePoint(cplx(0, 0.5)), 1.0)) ==
        Approx(0.5));
}

TEST_CASE("diameter_bound values and guards") {
  CHECK(diameter_bound(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(0, 1)),
                                     ClosedHalfPlanePoint(cplx(0, 1)), 1.0)) ==
        Approx(4.0));
  CHECK(diameter_bound(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(0, 1)),
                                     ClosedHalfPlanePoint(cplx(0, 2)), 1.0)) ==
        Approx(2.25));
  CHECK_THROWS_AS(diameter_bound(MoebiusCoeffs(ClosedHalfPlanePoint(cplx(1, 0)),
                                               ClosedHalfPlanePoint(cplx(0, 1)),
                                               1.0)),
                  std::domain_error);
}

TEST_CASE("contraction and image-diameter properties") {
  Rng rng(103);
  for (int t = 0; t < 1000; ++t) {
    const MoebiusCoeffs phi = tu::random_coeffs(rng);
    const HalfPlanePoint z1 = tu::random_point(rng);
    const HalfPlanePoint z2 = tu::random_point(rng);
    const double lhs = hyp_dist(moebius_apply(phi, z1), moebius_apply(phi, z2));
    const double rhs = hyp_dist(z1, z2);
    CHECK(lhs <= rhs * (1 + 1e-12) + 1e-12);
    if (phi.a.im() > 0.0 && phi.b.im() > 0.0) {
      CHECK(lhs <= contraction_factor(phi) * rhs + 1e-12);
      CHECK(lhs <= diameter_bound(phi) + 1e-12);
    }
  }
}

TEST_CASE("dist_to_i_bound") {
  const MoebiusCoeffs phi(ClosedHalfPlanePoint(cplx(0, 1)),
                          ClosedHalfPlanePoint(cplx(0, 1)), 1.0);
  CHECK(dist_to_i_bound(phi, kI) == Approx(20.0));
  // d(2i/3, i) = log(3/2), comfortably below the bound.
  CHECK(hyp_dist(moebius_apply(phi, kI), kI) ==
        Approx(std::log(1.5)).epsilon(1e-12));

  Rng rng(104);
  for (int t = 0; t < 1000; ++t) {
    const MoebiusCoeffs p = tu::random_coeffs(rng);
    const HalfPlanePoint z = tu::random_point(rng);
    CHECK(hyp_dist(moebius_apply(p, z), kI) <= dist_to_i_bound(p, z) * (1 + 1e-12));
  }
  // Large Im z keeps the bound finite.
  CHECK(std::isfinite(dist_to_i_bound(phi, HalfPlanePoint(cplx(0.0, 1e12)))));
}

TEST_CASE("homography_of values") {
  const Homography h = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(0, 1)), ClosedHalfPlanePoint(cplx(0, 1)), 1.0));
  CHECK(h.A == cplx(0, 1));
  CHECK(h.B == cplx(1, 0));
  CHECK(h.C == cplx(-2, 0));
  CHECK(h.D == cplx(0, 1));

  const Homography h0 = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(0, 0)), ClosedHalfPlanePoint(cplx(0, 0)), 1.0));
  CHECK(h0.A == cplx(0, 0));
  CHECK(h0.B == cplx(1, 0));
  CHECK(h0.C == cplx(-1, 0));
  CHECK(h0.D == cplx(0, 0));

  // Real coefficients give a real block.
  const Homography hr = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(0.7, 0)), ClosedHalfPlanePoint(cplx(0.7, 0)), 1.0));
  CHECK(hr.A.imag() == 0.0);
  CHECK(hr.B.imag() == 0.0);
  CHECK(hr.C.imag() == 0.0);
  CHECK(hr.D.imag() == 0.0);
}

TEST_CASE("homography/moebius agreement") {
  Rng rng(105);
  for (int t = 0; t < 1000; ++t) {
    const MoebiusCoeffs phi = tu::random_coeffs(rng);
    const HalfPlanePoint z = tu::random_point(rng);
    const cplx a = homography_apply(homography_of(phi), z);
    const cplx b = moebius_apply(phi, z).value();
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b) + 1e-14);
  }
}

TEST_CASE("homography_apply basics") {
  const Homography h{cplx(0, 1), cplx(1), cplx(-2), cplx(0, 1)};
  CHECK(std::abs(homography_apply(h, kI) - cplx(0, 2.0 / 3.0)) < 1e-15);
  CHECK(std::abs(homography_apply(Homography::identity(), cplx(0.3, 0.8)) -
                 cplx(0.3, 0.8)) == 0.0);
  const Homography h2{2.0 * h.A, 2.0 * h.B, 2.0 * h.C, 2.0 * h.D};
  CHECK(homography_apply(h2, kI) == homography_apply(h, kI));
}

TEST_CASE("homography_compose") {
  Rng rng(106);
  const Homography id = Homography::identity();
  for (int t = 0; t < 1000; ++t) {
    const Homography h1 = homography_of(tu::random_coeffs(rng));
    const Homography h2 = homography_of(tu::random_coeffs(rng));
    const HalfPlanePoint z = tu::random_point(rng);

    // Composing with the identity is projectively the identity.
    const Homography hi = homography_compose(h1, id);
    CHECK(std::abs(homography_apply(hi, z) - homography_apply(h1, z)) <=
          1e-12 * (1.0 + std::abs(homography_apply(h1, z))));

    const cplx once = homography_apply(h2, z);
    const cplx two_point = homography_apply(h1, once);
    const cplx composed = homography_apply(homography_compose(h1, h2), z);
    CHECK(std::abs(composed - two_point) <= 1e-10 * (1.0 + std::abs(two_point)));
  }

  // Self-composition applied at i matches applying the map twice.
  const MoebiusCoeffs phi(ClosedHalfPlanePoint(cplx(0, 1)),
                          ClosedHalfPlanePoint(cplx(0, 1)), 1.0);
  const Homography h = homography_of(phi);
  const cplx twice = moebius_apply(phi, moebius_apply(phi, kI)).value();
  CHECK(std::abs(homography_apply(homography_compose(h, h), kI) - twice) < 1e-12);
}

TEST_CASE("deep renormalized folds stay normalized") {
  Rng rng(107);
  Homography acc = Homography::identity();
  for (int t = 0; t < 10000; ++t) {
    acc = homography_compose(acc, homography_of(tu::random_coeffs(rng)));
    if (t % 256 == 0) CHECK(acc.max_abs() == Approx(1.0).epsilon(1e-12));
  }
  CHECK(acc.max_abs() == Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(homography_apply(acc, kI).real()));
}

TEST_CASE("homography_fixed_point") {
  // Free one-step map at lam = i, m = 0: root of i z^2 - z + i = 0.
  const Homography h = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(0, 1)), ClosedHalfPlanePoint(cplx(0, 1)), 1.0));
  const HalfPlanePoint fp = homography_fixed_point(h);
  CHECK(std::abs(fp.value() - cplx(0, (std::sqrt(5.0) - 1) / 2)) < 1e-14);
  CHECK(std::abs(homography_apply(h, fp) - fp.value()) < 1e-10);

  // Real band energy x = sqrt(2), m = 0: -x/2 + (i/2) sqrt(4 - x^2).
  const double x = std::sqrt(2.0);
  const Homography hx = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(x, 0)), ClosedHalfPlanePoint(cplx(x, 0)), 1.0));
  const HalfPlanePoint fx = homography_fixed_point(hx);
  CHECK(std::abs(fx.value() - cplx(-x / 2, std::sqrt(2.0) / 2)) < 1e-14);

  // Free Laplacian step at x = 2: -1/2 + i/2.
  const Homography hj = homography_of(MoebiusCoeffs(
      ClosedHalfPlanePoint(cplx(2, 0)), ClosedHalfPlanePoint(cplx(1, 0)), 1.0));
  CHECK(std::abs(homography_fixed_point(hj).value() - cplx(-0.5, 0.5)) < 1e-14);

  // Maps with no fixed point in the open half-plane.
  CHECK_THROWS_AS(homography_fixed_point(
                      Homography{cplx(-1), cplx(-1), cplx(1), cplx(0)}),
                  NoHalfPlaneFixedPoint);  // z -> z + 1
  CHECK_THROWS_AS(homography_fixed_point(
                      Homography{cplx(0), cplx(-2), cplx(1), cplx(0)}),
                  NoHalfPlaneFixedPoint);  // z -> 2z, fixed points 0, inf

  Rng rng(108);
  for (int t = 0; t < 300; ++t) {
    // Strictly contracting maps have their fixed point in the open half-plane.
    const MoebiusCoeffs phi = tu::random_coeffs(rng, false);
    const Homography hh = homography_of(phi);
    const HalfPlanePoint z = homography_fixed_point(hh);
    CHECK(std::abs(homography_apply(hh, z) - z.value()) <=
          1e-10 * (1.0 + std::abs(z.value())));
  }
}
