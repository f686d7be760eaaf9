#include "dirac_green/halfplane.hpp"

#include <algorithm>
#include <cmath>

namespace dg {

namespace {

bool finite(cplx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

HalfPlanePoint::HalfPlanePoint(cplx v) : v_(v) {
  if (!finite(v) || !(v.imag() > 0.0)) {
    throw std::domain_error("HalfPlanePoint: Im(z) > 0 required, got Im = " +
                            std::to_string(v.imag()));
  }
}

ClosedHalfPlanePoint::ClosedHalfPlanePoint(cplx v) : v_(v) {
  if (!finite(v) || v.imag() < 0.0) {
    throw std::domain_error("ClosedHalfPlanePoint: Im(z) >= 0 required");
  }
}

MoebiusCoeffs::MoebiusCoeffs(ClosedHalfPlanePoint a, ClosedHalfPlanePoint b,
                             double c)
    : a(a), b(b), c(c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::domain_error("MoebiusCoeffs: c > 0 required");
  }
}

double Homography::max_abs() const {
  return std::max(std::max(std::abs(A), std::abs(B)),
                  std::max(std::abs(C), std::abs(D)));
}

Homography Homography::renormalized() const {
  const double s = max_abs();
  if (s == 0.0) {
    throw std::domain_error("Homography: all coefficients zero");
  }
  return {A / s, B / s, C / s, D / s};
}

double hyp_dist(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
  const double t =
      std::norm(z1.value() - z2.value()) / (2.0 * z1.im() * z2.im());
  // acosh(1 + t) written to stay accurate for small t.
  return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

double hyp_dist_upper(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
  return std::abs(z1.value() - z2.value()) / std::sqrt(z1.im() * z2.im());
}

bool approx_equal(const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                  double tol) {
  return std::abs(z1.value() - z2.value()) <= tol;
}

HalfPlanePoint moebius_apply(const MoebiusCoeffs& phi, const HalfPlanePoint& z) {
  const cplx inner = phi.b.value() + phi.c * z.value();
  if (inner == cplx(0.0)) {
    throw std::domain_error("moebius_apply: b + c z vanished");
  }
  const cplx outer = phi.a.value() - 1.0 / inner;
  if (outer == cplx(0.0)) {
    throw std::domain_error("moebius_apply: outer denominator vanished");
  }
  return HalfPlanePoint(-1.0 / outer);
}

double contraction_factor(const MoebiusCoeffs& phi) {
  return 1.0 / (1.0 + phi.a.im() * phi.b.im());
}

double diameter_bound(const MoebiusCoeffs& phi) {
  const double ia = phi.a.im();
  const double ib = phi.b.im();
  if (!(ia > 0.0) || !(ib > 0.0)) {
    throw std::domain_error("diameter_bound: requires Im(a) > 0 and Im(b) > 0");
  }
  const double num = 1.0 + ib * std::abs(phi.a.value());
  return (num * num) / ((ib * ia) * (ib * ia));
}

double dist_to_i_bound(const MoebiusCoeffs& phi, const HalfPlanePoint& z) {
  const double r = std::abs(phi.b.value()) + phi.c * std::abs(z.value());
  const double cy = phi.c * z.im();
  return (r * r / cy + 1.0) * r * (std::abs(phi.a.value()) + 1.0 / cy) /
         std::sqrt(cy);
}

Homography homography_of(const MoebiusCoeffs& phi) {
  const cplx a = phi.a.value();
  const cplx b = phi.b.value();
  const cplx c = phi.c;
  return {b, c, a * b - 1.0, a * c};
}

Homography homography_compose(const Homography& o, const Homography& i) {
  Homography r{o.A * i.C - o.B * i.A, o.A * i.D - o.B * i.B,
               o.C * i.C - o.D * i.A, o.C * i.D - o.D * i.B};
  return r.renormalized();
}

cplx homography_apply(const Homography& h, cplx z) {
  const cplx den = h.C + h.D * z;
  if (std::abs(den) < 1e-150 * std::max(1.0, std::abs(z)) * h.max_abs()) {
    throw std::domain_error("homography_apply: denominator vanished");
  }
  return -(h.A + h.B * z) / den;
}

cplx homography_apply(const Homography& h, const HalfPlanePoint& z) {
  return homography_apply(h, z.value());
}

HalfPlanePoint homography_fixed_point(const Homography& h) {
  // Fixed points solve D z^2 + (B + C) z + A = 0.
  const cplx qa = h.D;
  const cplx qb = h.B + h.C;
  const cplx qc = h.A;
  const double scale = h.max_abs();

  cplx roots[2];
  int nroots = 0;
  if (std::abs(qa) <= 1e-14 * scale) {
    if (qb == cplx(0.0)) {
      throw NoHalfPlaneFixedPoint("degenerate map: no isolated fixed point");
    }
    roots[nroots++] = -qc / qb;
  } else {
    cplx s = std::sqrt(qb * qb - 4.0 * qa * qc);
    // Pick the sign that avoids cancellation in qb + s.
    if ((conj(qb) * s).real() < 0.0) s = -s;
    const cplx q = -0.5 * (qb + s);
    roots[nroots++] = q / qa;
    if (q != cplx(0.0)) {
      roots[nroots++] = qc / q;
    } else {
      roots[nroots++] = cplx(0.0);
    }
  }

  std::optional<cplx> best;
  for (int k = 0; k < nroots; ++k) {
    if (roots[k].imag() > 0.0 && (!best || roots[k].imag() > best->imag())) {
      best = roots[k];
    }
  }
  if (!best) {
    throw NoHalfPlaneFixedPoint(
        "homography_fixed_point: both roots outside the open half-plane");
  }
  return HalfPlanePoint(*best);
}

}  // namespace dg
