// Resolvent matrix elements reconstructed from diagonal Green values: the
// spin-down column follows the decaying solution built from the Green chain,
// spin-up sources go through charge conjugation, and the remaining entries
// come from the defining recurrence rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dirac_green/errors.hpp"
#include "dirac_green/green.hpp"

namespace dg {

namespace {

constexpr double kMarchGuard = 1e12;

void guard(cplx v, const char* who) {
  if (!(std::abs(v.real()) < kMarchGuard) || !(std::abs(v.imag()) < kMarchGuard)) {
    throw UnstableMarch(std::string(who) +
                        ": component magnitude exceeded 1e12; the growing "
                        "solution has taken over");
  }
}

// alpha[j] = Green value of the truncation at origin + j, j = 0..n.
// Computed once at the top then pulled down through the contractions, which
// only shrinks the error. Requires Im(lam) > 0.
std::vector<cplx> alpha_chain(const OperatorSpec& spec, cplx lam, long origin,
                              long n, const GreenOptions& opts) {
  std::vector<cplx> a(static_cast<std::size_t>(n) + 1);
  a[n] = half_line_green(spec, lam, origin + n, opts).value;
  for (long j = n - 1; j >= 0; --j) {
    a[j] = moebius_apply(recursion_coeffs(spec, lam, origin + j),
                         HalfPlanePoint(a[j + 1]))
               .value();
  }
  return a;
}

// Chain valid in either half-plane: conjugate of the upper-half chain when
// Im(mu) < 0 (the truncated operators are each other's adjoints).
std::vector<cplx> alpha_chain_any(const OperatorSpec& spec, cplx mu,
                                  long origin, long n,
                                  const GreenOptions& opts) {
  if (mu.imag() > 0.0) return alpha_chain(spec, mu, origin, n, opts);
  std::vector<cplx> a = alpha_chain(spec, std::conj(mu), origin, n, opts);
  for (cplx& v : a) v = std::conj(v);
  return a;
}

// Ratio f2(k+1)/f2(k) of the decaying solution across site `site`, given
// alpha_next = Green value of the truncation at site + 1.
cplx decay_ratio(const PotentialPair& p, double m, cplx mu, long site,
                 cplx alpha_next) {
  const cplx w1 = p.w1(site);
  const cplx w2 = p.w2(site);
  const cplx q = (1.0 - std::conj(w2)) / (mu - m - p.v1(site).real());
  return q * alpha_next * (1.0 + w1) / (1.0 - q * alpha_next * (w2 - 1.0));
}

struct Column {
  long start = 0;               // absolute site of index 0
  std::vector<cplx> f1, f2;     // f1 over start..start+n, f2 one site further

  cplx at(long site, Spin s) const {
    const auto& f = (s == Spin::Up) ? f1 : f2;
    const long idx = site - start;
    if (idx < 0 || idx >= static_cast<long>(f.size())) return cplx(0.0);
    return f[idx];
  }
};

// (H - mu)^{-1} e_source on a half line, sites start..start+n. The stretch
// up to the source site is marched directly (the solution grows there, so
// the march is stable); past the source the column is proportional to the
// decaying solution and follows the Green-chain ratios.
Column half_column(const OperatorSpec& spec, cplx mu, long src_site,
                   Spin src_spin, long n, const GreenOptions& opts) {
  const long start = spec.lattice.start;
  const long rel_src = src_site - start;
  if (rel_src < 0) {
    throw std::invalid_argument("resolvent: source site left of lattice start");
  }
  const PotentialPair& p = spec.pot;
  const double m = spec.m;

  std::vector<cplx> alpha =
      alpha_chain_any(spec, mu, start, n + 1, opts);

  cplx f2_0;
  if (src_spin == Spin::Down && rel_src == 0) {
    f2_0 = alpha[0];
  } else {
    // Reciprocity: <e_(start,down), (H-mu)^{-1} e_src> is the conjugate of
    // the src component of the (start,down) column at conj(mu).
    Column base =
        half_column(spec, std::conj(mu), start, Spin::Down,
                    std::max(n, rel_src + 1), opts);
    f2_0 = std::conj(base.at(src_site, src_spin));
  }

  auto rhs1 = [&](long rel) -> cplx {
    return (src_spin == Spin::Up && rel == rel_src) ? cplx(1.0) : cplx(0.0);
  };
  auto rhs2 = [&](long rel) -> cplx {
    return (src_spin == Spin::Down && rel == rel_src) ? cplx(1.0) : cplx(0.0);
  };

  Column col;
  col.start = start;
  col.f1.assign(n + 1, cplx(0.0));
  col.f2.assign(n + 2, cplx(0.0));
  col.f2[0] = f2_0;
  col.f1[0] = (rhs2(0) - (-m + p.v2(start).real() - mu) * col.f2[0]) /
              (1.0 + std::conj(p.w1(start)));

  const long marched = std::min<long>(rel_src + 1, n + 1);
  for (long k = 0; k < marched; ++k) {
    const long site = start + k;
    const cplx w1 = p.w1(site);
    const cplx w2 = p.w2(site);
    if (w2 == cplx(1.0)) {
      throw InvalidPotential("resolvent: W2 = 1 at site " + std::to_string(site));
    }
    col.f2[k + 1] = (rhs1(k) - (m + p.v1(site).real() - mu) * col.f1[k] -
                     (1.0 + w1) * col.f2[k]) /
                    (w2 - 1.0);
    if (k + 1 <= n) {
      const cplx w1n = p.w1(site + 1);
      if (w1n == cplx(-1.0)) {
        throw InvalidPotential("resolvent: W1 = -1 at site " +
                               std::to_string(site + 1));
      }
      col.f1[k + 1] =
          (rhs2(k + 1) - (std::conj(w2) - 1.0) * col.f1[k] -
           (-m + p.v2(site + 1).real() - mu) * col.f2[k + 1]) /
          (1.0 + std::conj(w1n));
      guard(col.f1[k + 1], "resolvent");
    }
    guard(col.f2[k + 1], "resolvent");
  }

  for (long k = marched; k <= n; ++k) {
    col.f2[k + 1] =
        decay_ratio(p, m, mu, start + k, alpha[k + 1]) * col.f2[k];
  }
  for (long k = marched; k <= n; ++k) {
    const long site = start + k;
    col.f1[k] = (rhs1(k) - (1.0 + p.w1(site)) * col.f2[k] -
                 (p.w2(site) - 1.0) * col.f2[k + 1]) /
                (m + p.v1(site).real() - mu);
  }
  return col;
}

// Full-line spin-down column over sites lo..hi (f2 reaching hi+1), built by
// translating the source to the origin, gluing, and running the decay
// ratios outward on both sides.
Column full_column_down(const OperatorSpec& spec, cplx mu, long src_site,
                        long lo, long hi, const GreenOptions& opts) {
  OperatorSpec t = spec;
  t.pot = shift_potential(spec.pot, src_site);
  const long L = src_site - lo;   // sites to the left of the source
  const long R = hi - src_site;   // sites to the right
  const PotentialPair& p = t.pot;
  const double m = t.m;

  cplx g00;
  if (mu.imag() > 0.0) {
    g00 = glue_full_line(t, mu, opts).value;
  } else {
    g00 = std::conj(glue_full_line(t, std::conj(mu), opts).value);
  }

  const OperatorSpec right = right_half_spec(t);
  const OperatorSpec left = left_half_spec(t);
  std::vector<cplx> ar = alpha_chain_any(right, mu, 0, std::max<long>(R, 0) + 1, opts);
  std::vector<cplx> al = alpha_chain_any(left, mu, 0, std::max<long>(L, 0) + 1, opts);

  // Indexing: column index j <-> absolute site lo + j <-> translated site
  // lo + j - src_site.
  Column col;
  col.start = lo;
  col.f1.assign(L + R + 1, cplx(0.0));
  col.f2.assign(L + R + 2, cplx(0.0));
  auto f2 = [&](long ts) -> cplx& { return col.f2[ts + L]; };

  f2(0) = g00;
  for (long k = 0; k <= R; ++k) {
    // Truncation at translated site k+1 is the right spec's chain entry k.
    f2(k + 1) = decay_ratio(p, m, mu, k, ar[k]) * f2(k);
  }
  if (L >= 1) {
    // Anchor one site left of the source, then follow the reflected sweep.
    const cplx w1m = p.w1(-1);
    const cplx w2m = p.w2(-1);
    if (w2m == cplx(1.0)) throw InvalidPotential("resolvent: W2(-1) = 1");
    const cplx qp = (1.0 + std::conj(w1m)) / (mu - m - p.v1(-1).real());
    f2(-1) = qp * al[0] * (1.0 - w2m) * f2(0) /
             (1.0 + qp * al[0] * (1.0 + w1m));
    for (long idx = 0; idx + 2 <= L; ++idx) {
      // f2(-idx-2) = left-spec ratio across its site idx times f2(-idx-1).
      f2(-idx - 2) =
          decay_ratio(left.pot, m, mu, idx, al[idx + 1]) * f2(-idx - 1);
    }
  }

  for (long j = 0; j <= L + R; ++j) {
    const long ts = j - L;  // translated site
    col.f1[j] = (cplx(0.0) - (1.0 + p.w1(ts)) * col.f2[j] -
                 (p.w2(ts) - 1.0) * col.f2[j + 1]) /
                (m + p.v1(ts).real() - mu);
  }
  return col;
}

// Full-line spin-up column via charge conjugation: the column of e_(n,up)
// at mu equals (-S w2, S w1) with w the spin-down column of the conjugated
// spec at -mu and source -n.
Column full_column_up(const OperatorSpec& spec, cplx mu, long src_site,
                      long lo, long hi, const GreenOptions& opts) {
  const OperatorSpec conj_spec = charge_conjugate(spec);
  Column w =
      full_column_down(conj_spec, -mu, -src_site, -hi, -lo, opts);
  Column col;
  col.start = lo;
  const long n = hi - lo;
  col.f1.assign(n + 1, cplx(0.0));
  col.f2.assign(n + 2, cplx(0.0));
  for (long j = 0; j <= n; ++j) {
    const long site = lo + j;
    col.f1[j] = -w.at(-site, Spin::Down);
    col.f2[j] = w.at(-site, Spin::Up);
  }
  col.f2[n + 1] = w.at(-(hi + 1), Spin::Up);
  return col;
}

void require_offaxis(cplx lam, const char* who) {
  if (lam.imag() == 0.0) {
    throw std::invalid_argument(std::string(who) + ": Im(lam) != 0 required");
  }
}

}  // namespace

cplx resolvent_entry(const OperatorSpec& spec, cplx lam, SpinorIndex source,
                     SpinorIndex target, const GreenOptions& opts) {
  require_offaxis(lam, "resolvent_entry");
  if (spec.mode == Mode::Jacobi) {
    if (source.site != target.site) {
      throw std::invalid_argument(
          "resolvent_entry: Jacobi mode provides diagonal entries only");
    }
    const bool lower = lam.imag() < 0.0;
    const cplx mu = lower ? std::conj(lam) : lam;
    cplx g;
    if (spec.lattice.is_half_line()) {
      if (source.site != spec.lattice.start) {
        throw std::invalid_argument(
            "resolvent_entry: Jacobi half-line entries only at the boundary site");
      }
      g = half_line_green(spec, mu, source.site, opts).value;
    } else {
      OperatorSpec t = spec;
      t.pot = shift_potential(spec.pot, source.site);
      g = glue_full_line(t, mu, opts).value;
    }
    return lower ? std::conj(g) : g;
  }

  if (spec.lattice.is_half_line()) {
    const long start = spec.lattice.start;
    const long n =
        std::max(source.site, target.site) - start + 2;
    Column col = half_column(spec, lam, source.site, source.spin, n, opts);
    return col.at(target.site, target.spin);
  }

  const long lo = std::min(source.site, target.site) - 1;
  const long hi = std::max(source.site, target.site) + 1;
  Column col = (source.spin == Spin::Down)
                   ? full_column_down(spec, lam, source.site, lo, hi, opts)
                   : full_column_up(spec, lam, source.site, lo, hi, opts);
  return col.at(target.site, target.spin);
}

SpinorVector propagate_solution(const OperatorSpec& spec, cplx lam,
                                cplx f2_at_start, long n_sites,
                                const GreenOptions& opts) {
  if (spec.mode != Mode::Dirac || !spec.lattice.is_half_line()) {
    throw std::invalid_argument(
        "propagate_solution: half-line Dirac specs only");
  }
  require_offaxis(lam, "propagate_solution");
  const long start = spec.lattice.start;
  const PotentialPair& p = spec.pot;
  const double m = spec.m;

  Column col = half_column(spec, lam, start, Spin::Down, n_sites, opts);

  // A boundary value consistent with the Green value (up to the accuracy the
  // recursion itself delivers) selects the decaying solution; rescale the
  // column onto the datum so increments in the datum act linearly. A
  // genuinely different value adds the complementary growing solution.
  const cplx alpha0 = col.f2[0];
  const cplx delta = f2_at_start - alpha0;
  if (std::abs(delta) <= 1e-6 * (1.0 + std::abs(alpha0))) {
    const cplx scale = f2_at_start / alpha0;
    for (cplx& v : col.f2) v *= scale;
    for (cplx& v : col.f1) v *= scale;
    col.f1[0] = (1.0 - (-m + p.v2(start).real() - lam) * col.f2[0]) /
                (1.0 + std::conj(p.w1(start)));
  } else if (delta != cplx(0.0)) {
    cplx h2 = delta;
    cplx h1 = -(-m + p.v2(start).real() - lam) * h2 /
              (1.0 + std::conj(p.w1(start)));
    col.f2[0] += h2;
    col.f1[0] += h1;
    for (long k = 0; k < n_sites; ++k) {
      const long site = start + k;
      const cplx w1 = p.w1(site);
      const cplx w2 = p.w2(site);
      if (w2 == cplx(1.0)) {
        throw InvalidPotential("propagate_solution: W2 = 1 at site " +
                               std::to_string(site));
      }
      const cplx w1n = p.w1(site + 1);
      if (w1n == cplx(-1.0)) {
        throw InvalidPotential("propagate_solution: W1 = -1 at site " +
                               std::to_string(site + 1));
      }
      const cplx h2n =
          (-(m + p.v1(site).real() - lam) * h1 - (1.0 + w1) * h2) / (w2 - 1.0);
      const cplx h1n = (-(std::conj(w2) - 1.0) * h1 -
                        (-m + p.v2(site + 1).real() - lam) * h2n) /
                       (1.0 + std::conj(w1n));
      guard(h2n, "propagate_solution");
      guard(h1n, "propagate_solution");
      col.f2[k + 1] += h2n;
      col.f1[k + 1] += h1n;
      h2 = h2n;
      h1 = h1n;
    }
  }

  SpinorVector out;
  for (long k = 0; k <= n_sites; ++k) {
    out.set(start + k, Spin::Up, col.f1[k]);
    out.set(start + k, Spin::Down, col.f2[k]);
  }
  return out;
}

}  // namespace dg
