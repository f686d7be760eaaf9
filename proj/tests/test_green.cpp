#include <doctest.h>

#include <cmath>

#include "dirac_green/green.hpp"
#include "dirac_green/oracle.hpp"
#include "dirac_green/rng.hpp"
#include "testutil.hpp"

using namespace dg;
using doctest::Approx;

namespace {

// Upper root of a z^2 + a z + 1 = 0, the fixed-point equation of the free
// Jacobi step z = -(a - (1+z)^{-1})^{-1}.
cplx jacobi_fixed_point(cplx a) {
  const cplx s = std::sqrt(a * a - 4.0 * a);
  const cplx r1 = (-a + s) / (2.0 * a);
  const cplx r2 = (-a - s) / (2.0 * a);
  return r1.imag() > r2.imag() ? r1 : r2;
}

const cplx kFreeAlpha(0, (std::sqrt(5.0) - 1.0) / 2.0);

}  // namespace

TEST_CASE("free half-line value at lam = i") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  for (auto seed : {SeedStrategy::periodic(), SeedStrategy::imaginary_unit()}) {
    GreenOptions o;
    o.seed = seed;
    const GreenResult r = half_line_green(s, cplx(0, 1), 0, o);
    CHECK(std::abs(r.value - kFreeAlpha) < 1e-10);
    CHECK(r.value.imag() > 0.0);
    CHECK(r.residual < 1e-12);
  }
}

TEST_CASE("free Jacobi value matches the quadratic fixed point") {
  OperatorSpec j = tu::spec_of({}, 0.0, false);
  j.mode = Mode::Jacobi;
  const cplx lam(2.0, 1.0);
  const GreenResult r = half_line_green(j, lam, 0);
  CHECK(std::abs(r.value - jacobi_fixed_point(lam)) < 1e-11);

  // Translation covariance of the free recursion.
  const GreenResult r7 = half_line_green(j, lam, 7);
  CHECK(std::abs(r7.value - r.value) < 1e-12);
}

TEST_CASE("kernel variants agree on Green values") {
  Rng rng(7);
  OperatorSpec s = tu::spec_of(tu::random_potential(rng, true), 1.0, false);
  const cplx lam(1.4, 0.01);
  GreenOptions a;
  a.kernel = "scalar";
  const cplx va = half_line_green(s, lam, 0, a).value;
  for (const std::string& name : kernels::available_kernels()) {
    GreenOptions b;
    b.kernel = name;
    CHECK(half_line_green(s, lam, 0, b).value == va);
  }
}

TEST_CASE("full-line spec restricted rightward from a site") {
  // Sweeping a full-line spec from site n is the truncation at n; for the
  // free operator the value is site-independent.
  OperatorSpec full = tu::spec_of({}, 0.0, true);
  OperatorSpec half = tu::spec_of({}, 0.0, false);
  const cplx lam(0.7, 0.8);
  const cplx from_half = half_line_green(half, lam, 0).value;
  for (long n : {-3L, 0L, 11L}) {
    CHECK(std::abs(half_line_green(full, lam, n).value - from_half) < 1e-12);
  }
}

TEST_CASE("recursion consistency alpha_n = Phi_n(alpha_{n+1})") {
  Rng rng(401);
  for (int t = 0; t < 10; ++t) {
    OperatorSpec s = tu::spec_of(tu::random_potential(rng), t % 2 ? 1.0 : 0.0,
                                 false);
    const cplx lam(rng.uniform(-2, 2), rng.uniform(0.3, 1.0));
    const long n = static_cast<long>(rng.uniform(0, 5));
    const cplx an = half_line_green(s, lam, n).value;
    const cplx an1 = half_line_green(s, lam, n + 1).value;
    const cplx recon =
        moebius_apply(recursion_coeffs(s, lam, n), HalfPlanePoint(an1)).value();
    CHECK(std::abs(an - recon) < 1e-10);
  }
}

TEST_CASE("seed independence") {
  Rng rng(402);
  OperatorSpec s = tu::spec_of(tu::random_potential(rng), 1.0, false, 2);
  const cplx lam(1.5, 0.05);
  GreenOptions oi;
  oi.seed = SeedStrategy::imaginary_unit();
  GreenOptions op;
  op.seed = SeedStrategy::periodic();
  const cplx vi = half_line_green(s, lam, 0, oi).value;
  const cplx vp = half_line_green(s, lam, 0, op).value;
  CHECK(std::abs(vi - vp) < 10 * oi.tol);
}

TEST_CASE("periodic_seed") {
  OperatorSpec free0 = tu::spec_of({}, 0.0, false);
  CHECK(std::abs(periodic_seed(free0, cplx(0, 1), 0, 1).value() - kFreeAlpha) <
        1e-12);

  // Real band energy: the closed-form fixed point of the one-step map.
  const double x = std::sqrt(2.0);
  CHECK(std::abs(periodic_seed(free0, cplx(x, 0), 0, 1).value() -
                 cplx(-x / 2, std::sqrt(2.0) / 2)) < 1e-12);

  // nu-fold self-consistency on an oscillating potential.
  Rng rng(403);
  for (int nu : {1, 2, 3}) {
    OperatorSpec s = tu::spec_of({}, 0.0, false, 2);
    s.pot.v1 = PotentialComponent::oscillating(0.7, 1.0);
    s.pot.v2 = PotentialComponent::oscillating(0.7, 1.0);
    const cplx lam(1.2, 0.05);
    const HalfPlanePoint z = periodic_seed(s, lam, 4, nu);
    Homography h = homography_of(recursion_coeffs(s, lam, 4));
    for (int k = 1; k < nu; ++k) {
      h = homography_compose(h, homography_of(recursion_coeffs(s, lam, 4 + k)));
    }
    CHECK(std::abs(homography_apply(h, z) - z.value()) <= 1e-10);
  }
}

TEST_CASE("fixed point agrees with the square-root closed form") {
  // For the nu-fold map written as z -> -(C + B z)/(Cq + D z), the upper
  // fixed point also comes from the explicit root
  //   -(Cq + B)/(2D) + (i/2) sqrt(4 A/D - ((Cq + B)/D)^2)
  // with the principal branch, as long as the discriminant stays off the
  // negative axis. Both routes must agree at band energies.
  for (double m : {0.0, 0.5}) {
    OperatorSpec s = tu::spec_of({}, m, false);
    s.pot.v1 = PotentialComponent::power(0.15, 2.0);
    s.pot.v2 = PotentialComponent::power(-0.1, 2.0);
    const double lo = m, hi = std::sqrt(m * m + 4.0);
    for (int nu : {1, 2}) {
      for (double frac : {0.3, 0.55, 0.8}) {
        const cplx lam(lo + frac * (hi - lo), 0.0);
        Homography h = homography_of(recursion_coeffs(s, lam, 5));
        for (int k = 1; k < nu; ++k) {
          h = homography_compose(h,
                                 homography_of(recursion_coeffs(s, lam, 5 + k)));
        }
        const cplx direct = homography_fixed_point(h).value();
        const cplx ratio = (h.C + h.B) / h.D;
        const cplx closed =
            -0.5 * ratio + 0.5 * cplx(0, 1) * std::sqrt(4.0 * h.A / h.D - ratio * ratio);
        CHECK(std::abs(direct - closed) <= 1e-10 * (1.0 + std::abs(closed)));
      }
    }
  }
}

TEST_CASE("glued full-line value, free regression constant") {
  OperatorSpec s = tu::spec_of({}, 0.0, true);
  const GreenResult r = glue_full_line(s, cplx(0, 1));
  // -(i - 2 (i + alpha)^{-1})^{-1} with both half-line values equal: i/sqrt(5).
  CHECK(std::abs(r.value - cplx(0, 1.0 / std::sqrt(5.0))) < 1e-12);
}

TEST_CASE("glue agrees with the finite-section oracle") {
  Rng rng(404);
  for (int t = 0; t < 4; ++t) {
    OperatorSpec s = tu::spec_of(tu::random_potential(rng), t % 2 ? 1.0 : 0.0,
                                 true);
    const cplx lam(rng.uniform(-1.5, 1.5), 0.5);
    const cplx g = glue_full_line(s, lam).value;
    CHECK(g.imag() > 0.0);
    const cplx ref = finite_section_green(s, lam, 900, {0, Spin::Down},
                                          {0, Spin::Down});
    CHECK(std::abs(g - ref) < 1e-6);
  }
}

TEST_CASE("mirror-symmetric potential gives equal half-line values") {
  // V1 symmetric about -1/2, V2 symmetric about 0, no hoppings.
  OperatorSpec s = tu::spec_of({}, 0.4, true);
  s.pot.v1 = PotentialComponent::bump_table(
      {{-3, cplx(0.4)}, {2, cplx(0.4)}, {-1, cplx(0.7)}, {0, cplx(0.7)}});
  s.pot.v2 = PotentialComponent::bump_table(
      {{-2, cplx(0.3)}, {2, cplx(0.3)}, {0, cplx(-0.5)}});
  const cplx lam(0.9, 0.2);
  const cplx ar = half_line_green(right_half_spec(s), lam, 0).value;
  const cplx al = half_line_green(left_half_spec(s), lam, 0).value;
  CHECK(std::abs(ar - al) < 1e-10);
}

TEST_CASE("MaxDepthExceeded carries diagnostics") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  s.pot.v1 = PotentialComponent::iid_uniform(0.8, 99);
  s.pot.v2 = PotentialComponent::iid_uniform(0.8, 100);
  GreenOptions o;
  o.seed = SeedStrategy::imaginary_unit();
  o.max_depth = 512;
  o.tol = 1e-13;
  try {
    half_line_green(s, cplx(0.8, 1e-9), 0, o);
    FAIL("expected MaxDepthExceeded");
  } catch (const MaxDepthExceeded& e) {
    CHECK(e.depth == 512);
    CHECK(e.last_value.imag() > 0.0);
    CHECK(std::isfinite(e.residual));
  }
}

TEST_CASE("InvalidPotential surfaces from the sweep") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  s.pot.w1 = PotentialComponent::bump_table({{9, cplx(-1.0)}});
  CHECK_THROWS_AS(half_line_green(s, cplx(0, 1), 0), InvalidPotential);
}

TEST_CASE("a-priori tail bound is a valid error estimate") {
  Rng rng(408);
  OperatorSpec s = tu::spec_of(tu::random_potential(rng), 0.0, false);
  const cplx lam(0.3, 1.0);
  GreenOptions loose;
  loose.tol = 1e-3;
  loose.seed = SeedStrategy::imaginary_unit();
  const GreenResult r = half_line_green(s, lam, 0, loose);
  REQUIRE(r.error_bound.has_value());
  CHECK(*r.error_bound >= 0.0);
  GreenOptions tight;
  tight.tol = 1e-14;
  const cplx truth = half_line_green(s, lam, 0, tight).value;
  CHECK(std::abs(r.value - truth) <= 2.0 * *r.error_bound + 1e-12);
}

TEST_CASE("propagate_solution reproduces the resolvent column") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  const cplx lam(0, 1);
  const cplx alpha = half_line_green(s, lam, 0).value;
  const SpinorVector f = propagate_solution(s, lam, alpha, 200);

  // Defining equation (H - lam) f = (0,1) delta_0 on sites 0..N-1.
  const SpinorVector hf = apply_dirac(s, f);
  double resid = 0.0;
  for (long n = 0; n < 200; ++n) {
    const cplx r1 = hf.at(n, Spin::Up) - lam * f.at(n, Spin::Up);
    const cplx r2 = hf.at(n, Spin::Down) - lam * f.at(n, Spin::Down) -
                    (n == 0 ? cplx(1.0) : cplx(0.0));
    resid = std::max(resid, std::max(std::abs(r1), std::abs(r2)));
  }
  CHECK(resid <= 1e-9 * f.norm());

  // Geometric decay, and agreement with a dense-section column.
  CHECK(std::abs(f.at(60, Spin::Down)) < std::abs(f.at(0, Spin::Down)) * 1e-10);
  for (long n : {0L, 1L, 5L, 20L}) {
    const cplx ref =
        finite_section_green(s, lam, 500, {0, Spin::Down}, {n, Spin::Down});
    CHECK(std::abs(f.at(n, Spin::Down) - ref) < 1e-10);
    const cplx ref1 =
        finite_section_green(s, lam, 500, {0, Spin::Down}, {n, Spin::Up});
    CHECK(std::abs(f.at(n, Spin::Up) - ref1) < 1e-10);
  }
}

TEST_CASE("propagate_solution far from the spectrum concentrates") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  const cplx lam(0, 10);
  const cplx alpha = half_line_green(s, lam, 0).value;
  const SpinorVector f = propagate_solution(s, lam, alpha, 30);
  CHECK(std::abs(f.at(5, Spin::Down)) < std::abs(f.at(0, Spin::Down)) * 1e-3);
}

TEST_CASE("propagate_solution is linear in the boundary datum") {
  OperatorSpec s = tu::spec_of({}, 0.5, false);
  const cplx lam(0.8, 0.9);
  const cplx alpha = half_line_green(s, lam, 0).value;
  const cplx d(0.3, -0.2);
  const SpinorVector f0 = propagate_solution(s, lam, alpha, 15);
  const SpinorVector f1 = propagate_solution(s, lam, alpha + d, 15);
  const SpinorVector f2 = propagate_solution(s, lam, alpha + 2.0 * d, 15);
  for (long n = 0; n <= 15; ++n) {
    for (Spin sp : {Spin::Up, Spin::Down}) {
      const cplx inc1 = f1.at(n, sp) - f0.at(n, sp);
      const cplx inc2 = f2.at(n, sp) - f1.at(n, sp);
      CHECK(std::abs(inc1 - inc2) <= 1e-10 * (1.0 + std::abs(inc1)));
    }
  }
}

TEST_CASE("propagate_solution flags the growing solution") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  const cplx lam(0, 1);
  const cplx alpha = half_line_green(s, lam, 0).value;
  CHECK_THROWS_AS(propagate_solution(s, lam, alpha + cplx(1.0), 200),
                  UnstableMarch);
}

TEST_CASE("resolvent entries against the dense oracle") {
  Rng rng(405);
  GreenOptions o;
  for (int t = 0; t < 5; ++t) {
    OperatorSpec half = tu::spec_of(tu::random_potential(rng), t % 2 ? 1.0 : 0.0,
                                    false);
    OperatorSpec full = half;
    full.lattice = Lattice::full_line();
    const cplx lam(rng.uniform(-1.5, 1.5), 0.5);
    for (int k = 0; k < 2; ++k) {
      const SpinorIndex src{static_cast<long>(rng.uniform(0, 6)),
                            rng.uniform() < 0.5 ? Spin::Up : Spin::Down};
      const SpinorIndex tgt{static_cast<long>(rng.uniform(0, 6)),
                            rng.uniform() < 0.5 ? Spin::Up : Spin::Down};
      const cplx a = resolvent_entry(half, lam, src, tgt, o);
      const cplx a_ref = finite_section_green(half, lam, 600, src, tgt);
      CHECK(std::abs(a - a_ref) < 1e-6);

      const SpinorIndex fsrc{static_cast<long>(rng.uniform(-5, 5)), src.spin};
      const SpinorIndex ftgt{static_cast<long>(rng.uniform(-5, 5)), tgt.spin};
      const cplx b = resolvent_entry(full, lam, fsrc, ftgt, o);
      const cplx b_ref = finite_section_green(full, lam, 600, fsrc, ftgt);
      CHECK(std::abs(b - b_ref) < 1e-6);
    }
  }
}

TEST_CASE("resolvent symmetries") {
  Rng rng(406);
  OperatorSpec full = tu::spec_of(tu::random_potential(rng), 0.6, true);
  const cplx lam(0.9, 0.45);

  // Free massless case: both spin diagonals coincide.
  OperatorSpec free0 = tu::spec_of({}, 0.0, true);
  const cplx down = resolvent_entry(free0, cplx(0, 1), {0, Spin::Down},
                                    {0, Spin::Down});
  const cplx up = resolvent_entry(free0, cplx(0, 1), {0, Spin::Up}, {0, Spin::Up});
  CHECK(std::abs(up - down) < 1e-10);

  // Hermitian-resolvent symmetry across conjugation of lam.
  for (auto [src, tgt] : {std::pair<SpinorIndex, SpinorIndex>{
                              {1, Spin::Down}, {-2, Spin::Up}},
                          {{0, Spin::Up}, {3, Spin::Down}}}) {
    const cplx a = resolvent_entry(full, lam, src, tgt);
    const cplx b = resolvent_entry(full, std::conj(lam), tgt, src);
    CHECK(std::abs(a - std::conj(b)) < 1e-9 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("batched evaluation matches single-point calls") {
  Rng rng(407);
  OperatorSpec s = tu::spec_of(tu::random_potential(rng), 1.0, false);
  std::vector<cplx> lams;
  for (int j = 0; j < 11; ++j) lams.emplace_back(1.1 + 0.08 * j, 0.02);
  std::vector<GreenOutcome> out(lams.size());
  GreenOptions o;
  half_line_green_batch(s, 0, lams, o, out);
  for (std::size_t j = 0; j < lams.size(); ++j) {
    REQUIRE(out[j].ok());
    CHECK(out[j].result.value == half_line_green(s, lams[j], 0, o).value);
  }
}
