#pragma once

// Poincare half-plane geometry: the hyperbolic metric, the contraction maps
// phi_{a,b,c}(z) = -(a - (b + c z)^{-1})^{-1}, their quantitative bounds, and
// the projective 2x2 calculus used to fold long compositions of them.

#include <complex>
#include <optional>

#include "dirac_green/errors.hpp"

namespace dg {

// Point of the open upper half-plane. Construction rejects Im <= 0 and
// non-finite values.
class HalfPlanePoint {
 public:
  explicit HalfPlanePoint(cplx v);

  cplx value() const { return v_; }
  double re() const { return v_.real(); }
  double im() const { return v_.imag(); }

  static HalfPlanePoint unit_i() { return HalfPlanePoint(cplx(0.0, 1.0)); }

 private:
  cplx v_;
};

// Point of the closed upper half-plane (Im >= 0 allowed).
class ClosedHalfPlanePoint {
 public:
  explicit ClosedHalfPlanePoint(cplx v);

  cplx value() const { return v_; }
  double im() const { return v_.imag(); }

 private:
  cplx v_;
};

// Coefficients (a, b, c) of the map z -> -(a - (b + c z)^{-1})^{-1} with
// a, b in the closed half-plane and c > 0.
struct MoebiusCoeffs {
  MoebiusCoeffs(ClosedHalfPlanePoint a, ClosedHalfPlanePoint b, double c);

  ClosedHalfPlanePoint a;
  ClosedHalfPlanePoint b;
  double c;
};

// Projective coefficient block of z -> -(A + B z)/(C + D z). Simultaneous
// rescaling of all four coefficients is the identity.
struct Homography {
  cplx A, B, C, D;

  // Representative of z -> z.
  static Homography identity() { return {cplx(0), cplx(-1), cplx(1), cplx(0)}; }

  // Divides all coefficients by the largest coefficient magnitude.
  Homography renormalized() const;
  double max_abs() const;
};

// Geodesic distance acosh(1 + |z1-z2|^2 / (2 Im z1 Im z2)).
double hyp_dist(const HalfPlanePoint& z1, const HalfPlanePoint& z2);

// Equality of points means complex equality to an absolute tolerance;
// hyperbolic comparisons use hyp_dist directly.
bool approx_equal(const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                  double tol = 1e-12);

// The elementary upper bound |z1-z2| / sqrt(Im z1 Im z2) >= hyp_dist.
double hyp_dist_upper(const HalfPlanePoint& z1, const HalfPlanePoint& z2);

// Applies phi_{a,b,c}. The image stays in the open half-plane for valid
// coefficients; a vanishing denominator signals an invariant violation
// upstream and throws std::domain_error.
HalfPlanePoint moebius_apply(const MoebiusCoeffs& phi, const HalfPlanePoint& z);

// Lipschitz factor 1 / (1 + Im(a) Im(b)) of phi in the hyperbolic metric.
// Equals 1 exactly when a or b sits on the boundary.
double contraction_factor(const MoebiusCoeffs& phi);

// Uniform bound (1 + Im(b)|a|)^2 / (Im(b) Im(a))^2 on the hyperbolic
// diameter of the image of phi. Requires a, b strictly inside the half-plane.
double diameter_bound(const MoebiusCoeffs& phi);

// Upper bound on hyp_dist(phi(z), i) in terms of |a|, |b|, c, Im z.
double dist_to_i_bound(const MoebiusCoeffs& phi, const HalfPlanePoint& z);

// Coefficient block of phi_{a,b,c}: (A, B, C, D) = (b, c, a b - 1, a c).
Homography homography_of(const MoebiusCoeffs& phi);

// Coefficients of outer . inner, renormalized.
Homography homography_compose(const Homography& outer, const Homography& inner);

// Evaluates -(A + B z)/(C + D z). Throws std::domain_error when the
// denominator underflows, which can only come from invalid coefficients.
cplx homography_apply(const Homography& h, cplx z);
cplx homography_apply(const Homography& h, const HalfPlanePoint& z);

// The fixed point of h lying in the open upper half-plane, i.e. the root of
// D z^2 + (B + C) z + A = 0 with Im > 0. Throws NoHalfPlaneFixedPoint when
// both roots are real or in the lower half-plane.
HalfPlanePoint homography_fixed_point(const Homography& h);

}  // namespace dg
