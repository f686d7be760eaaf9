#include "dirac_green/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirac_green/errors.hpp"

namespace dg {

std::string SeedStrategy::label() const {
  return kind == Kind::ImaginaryUnit ? "imaginary_unit" : "periodic";
}

namespace {

constexpr const char* kMaxDepthLabel = "MaxDepthExceeded";
constexpr const char* kInvalidLabel = "InvalidPotential";
constexpr const char* kHerglotzLabel = "HerglotzViolation";

// Lane-shared per-step coefficients for the sweep sites origin, origin+1, ...
struct SweepBuffers {
  std::vector<double> v1, v2, rmul, cmul;

  void resize(int n) {
    v1.resize(n);
    v2.resize(n);
    rmul.resize(n);
    cmul.resize(n);
  }
};

void fill_steps(const OperatorSpec& spec, long origin, long d0, int len,
                SweepBuffers& out) {
  out.resize(len);
  const PotentialPair& p = spec.pot;
  if (spec.mode == Mode::Jacobi) {
    for (int k = 0; k < len; ++k) {
      out.v1[k] = p.v1(origin + d0 + k).real();
    }
    return;
  }
  for (int k = 0; k < len; ++k) {
    const long site = origin + d0 + k;
    const cplx w1 = p.w1(site);
    const cplx w2 = p.w2(site);
    const double d1 = std::norm(1.0 + w1);
    const double d2 = std::norm(1.0 - w2);
    if (d1 == 0.0) {
      throw InvalidPotential(std::string(kInvalidLabel) +
                             ": W1 = -1 at site " + std::to_string(site));
    }
    if (d2 == 0.0) {
      throw InvalidPotential(std::string(kInvalidLabel) +
                             ": W2 = 1 at site " + std::to_string(site));
    }
    out.v1[k] = p.v1(site).real();
    out.v2[k] = p.v2(site).real();
    out.rmul[k] = 1.0 / d1;
    out.cmul[k] = d2 / d1;
  }
}

struct LaneBuffers {
  std::vector<double> ar, ai, br, bi, cr, ci, dr, di, lre, lim;

  void init(int width) {
    for (auto* v : {&ar, &ai, &br, &bi, &cr, &ci, &dr, &di, &lre, &lim}) {
      v->assign(width, 0.0);
    }
    const Homography id = Homography::identity();
    for (int i = 0; i < width; ++i) set(i, id);
  }

  void set(int i, const Homography& h) {
    ar[i] = h.A.real();
    ai[i] = h.A.imag();
    br[i] = h.B.real();
    bi[i] = h.B.imag();
    cr[i] = h.C.real();
    ci[i] = h.C.imag();
    dr[i] = h.D.real();
    di[i] = h.D.imag();
  }

  Homography get(int i) const {
    return {cplx(ar[i], ai[i]), cplx(br[i], bi[i]), cplx(cr[i], ci[i]),
            cplx(dr[i], di[i])};
  }
};

// Composite homography of nu consecutive steps starting at `site`.
Homography compose_steps(const OperatorSpec& spec, cplx lam, long site, int nu) {
  Homography h = homography_of(recursion_coeffs(spec, lam, site));
  for (int k = 1; k < nu; ++k) {
    h = homography_compose(h, homography_of(recursion_coeffs(spec, lam, site + k)));
  }
  return h;
}

int effective_nu(const OperatorSpec& spec, const SeedStrategy& s) {
  const int nu = s.nu > 0 ? s.nu : spec.nu();
  return std::max(nu, 1);
}

cplx seed_value(const OperatorSpec& spec, cplx lam, long site,
                const SeedStrategy& strategy, int nu) {
  if (strategy.kind == SeedStrategy::Kind::ImaginaryUnit) return cplx(0.0, 1.0);
  try {
    return homography_fixed_point(compose_steps(spec, lam, site, nu)).value();
  } catch (const NoHalfPlaneFixedPoint&) {
  } catch (const std::domain_error&) {
  }
  // Seeds only steer convergence (the limit is seed-independent), so fall
  // back to i when the fixed point is unavailable.
  return cplx(0.0, 1.0);
}

struct TailBound {
  bool available = false;
  double log_delta = 0.0;
  double scale = 0.0;  // eta / (1 - delta)

  double at(long depth) const {
    return scale * std::exp(static_cast<double>(depth) * log_delta);
  }
};

TailBound tail_bound(const OperatorSpec& spec, cplx lam) {
  TailBound tb;
  if (spec.mode != Mode::Dirac) return tb;  // single steps need not contract
  const double eps = lam.imag();
  if (!(eps > 0.0)) return tb;
  const double w1sup = 1.0 + spec.pot.w1.sup_norm();
  const double delta = 1.0 / (1.0 + (eps * eps) / (w1sup * w1sup));
  const double num =
      w1sup * w1sup + eps * (std::abs(lam) + spec.m + spec.pot.v2.sup_norm());
  const double eta = (num * num) / (eps * eps * eps * eps);
  tb.available = true;
  tb.log_delta = std::log(delta);
  tb.scale = eta / (1.0 - delta);
  return tb;
}

void fold_group(const OperatorSpec& spec, long origin,
                std::span<const cplx> lams, const GreenOptions& opts,
                std::span<GreenOutcome> out) {
  const kernels::FoldKernel& kernel = kernels::select_kernel(opts.kernel);
  const int width = kernel.width;
  const int nl = static_cast<int>(lams.size());

  const int nu = effective_nu(spec, opts.seed);
  const int block = std::max(opts.block > 0 ? opts.block : 64, nu);

  LaneBuffers lanes;
  lanes.init(width);
  for (int i = 0; i < width; ++i) {
    const cplx lam = lams[std::min(i, nl - 1)];
    lanes.lre[i] = lam.real();
    lanes.lim[i] = lam.imag();
  }

  std::vector<char> frozen(nl, 0);
  std::vector<char> has_prev(nl, 0);
  std::vector<cplx> prev(nl);
  std::vector<double> last_res(nl, std::numeric_limits<double>::infinity());
  std::vector<TailBound> bounds(nl);
  for (int i = 0; i < nl; ++i) {
    out[i] = GreenOutcome{};
    out[i].result.seed_used = opts.seed;
    bounds[i] = tail_bound(spec, lams[i]);
  }

  SweepBuffers sweep;
  long depth = 0;
  int active = nl;

  while (active > 0 && depth < opts.max_depth) {
    const int len =
        static_cast<int>(std::min<long>(block, opts.max_depth - depth));
    try {
      fill_steps(spec, origin, depth, len, sweep);
    } catch (const InvalidPotential& e) {
      for (int i = 0; i < nl; ++i) {
        if (!frozen[i]) {
          out[i].error = e.what();
          frozen[i] = 1;
        }
      }
      return;
    }

    kernels::StepBlock sb;
    sb.v1 = sweep.v1.data();
    sb.v2 = sweep.v2.data();
    sb.rmul = sweep.rmul.data();
    sb.cmul = sweep.cmul.data();
    sb.count = len;
    sb.m = spec.m;
    sb.jacobi = spec.mode == Mode::Jacobi;
    kernels::LaneArrays la;
    la.ar = lanes.ar.data();
    la.ai = lanes.ai.data();
    la.br = lanes.br.data();
    la.bi = lanes.bi.data();
    la.cr = lanes.cr.data();
    la.ci = lanes.ci.data();
    la.dr = lanes.dr.data();
    la.di = lanes.di.data();
    la.lam_re = lanes.lre.data();
    la.lam_im = lanes.lim.data();
    la.nlanes = width;
    kernel.run(sb, la);
    depth += len;

    for (int i = 0; i < nl; ++i) {
      if (frozen[i]) continue;
      try {
        const cplx seed =
            seed_value(spec, lams[i], origin + depth, opts.seed, nu);
        const cplx val = homography_apply(lanes.get(i), seed);
        if (!(val.imag() > 0.0) || !std::isfinite(val.real()) ||
            !std::isfinite(val.imag())) {
          out[i].error = std::string(kHerglotzLabel) +
                         ": iterate left the upper half-plane";
          out[i].result.value = val;
          out[i].result.depth = depth;
          frozen[i] = 1;
          --active;
          continue;
        }
        if (has_prev[i]) {
          const double res =
              hyp_dist(HalfPlanePoint(val), HalfPlanePoint(prev[i]));
          last_res[i] = res;
          double bound = std::numeric_limits<double>::infinity();
          if (bounds[i].available) bound = bounds[i].at(depth);
          if (res < opts.tol || bound < opts.tol) {
            out[i].result.value = val;
            out[i].result.depth = depth;
            out[i].result.residual = res;
            if (bounds[i].available && std::isfinite(bound)) {
              out[i].result.error_bound = bound;
            }
            frozen[i] = 1;
            --active;
          }
        }
        prev[i] = val;
        has_prev[i] = 1;
      } catch (const std::exception& e) {
        out[i].error = e.what();
        out[i].result.depth = depth;
        frozen[i] = 1;
        --active;
      }
    }
  }

  for (int i = 0; i < nl; ++i) {
    if (frozen[i]) continue;
    out[i].error = std::string(kMaxDepthLabel) + ": no convergence after " +
                   std::to_string(depth) + " steps (residual " +
                   std::to_string(last_res[i]) + ")";
    out[i].result.value = has_prev[i] ? prev[i] : cplx(0.0, 1.0);
    out[i].result.depth = depth;
    out[i].result.residual = last_res[i];
  }
}

void require_upper(cplx lam, const char* who) {
  if (!(lam.imag() > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": Im(lam) > 0 required");
  }
}

long sweep_origin(const OperatorSpec& spec, long site, const char* who) {
  if (spec.lattice.is_half_line() && site < spec.lattice.start) {
    throw std::invalid_argument(std::string(who) +
                                ": site left of the lattice start");
  }
  return site;
}

GreenResult outcome_to_result(GreenOutcome&& o) {
  if (o.ok()) return o.result;
  if (o.error.rfind(kMaxDepthLabel, 0) == 0) {
    throw MaxDepthExceeded(o.error, o.result.value, o.result.residual,
                           o.result.depth);
  }
  if (o.error.rfind(kInvalidLabel, 0) == 0) throw InvalidPotential(o.error);
  throw std::domain_error(o.error);
}

}  // namespace

GreenResult half_line_green(const OperatorSpec& spec, cplx lam, long site,
                            const GreenOptions& opts) {
  require_upper(lam, "half_line_green");
  const long origin = sweep_origin(spec, site, "half_line_green");
  GreenOutcome out;
  fold_group(spec, origin, std::span<const cplx>(&lam, 1), opts,
             std::span<GreenOutcome>(&out, 1));
  return outcome_to_result(std::move(out));
}

void half_line_green_batch(const OperatorSpec& spec, long site,
                           std::span<const cplx> lams, const GreenOptions& opts,
                           std::span<GreenOutcome> out) {
  if (out.size() != lams.size()) {
    throw std::invalid_argument("half_line_green_batch: size mismatch");
  }
  const long origin = sweep_origin(spec, site, "half_line_green_batch");
  const int width = kernels::select_kernel(opts.kernel).width;
  for (std::size_t i = 0; i < lams.size(); i += width) {
    const std::size_t n = std::min<std::size_t>(width, lams.size() - i);
    for (std::size_t j = 0; j < n; ++j) require_upper(lams[i + j], "half_line_green_batch");
    fold_group(spec, origin, lams.subspan(i, n), opts, out.subspan(i, n));
  }
}

HalfPlanePoint periodic_seed(const OperatorSpec& spec, cplx lam, long site,
                             int nu) {
  if (lam.imag() < 0.0) {
    throw std::invalid_argument("periodic_seed: Im(lam) >= 0 required");
  }
  if (nu < 1) throw std::invalid_argument("periodic_seed: nu >= 1 required");
  return homography_fixed_point(compose_steps(spec, lam, site, nu));
}

namespace {

struct GlueCoeffs {
  cplx a, b, bp;
  double c = 1.0, cp = 1.0;
};

GlueCoeffs glue_coeffs(const OperatorSpec& spec, cplx lam) {
  GlueCoeffs g;
  if (spec.mode == Mode::Jacobi) {
    g.a = lam - spec.pot.v1(0).real();
    g.b = g.bp = cplx(1.0);
    return g;
  }
  const PotentialPair& p = spec.pot;
  const cplx w1_0 = p.w1(0), w2_0 = p.w2(0);
  const cplx w1_m = p.w1(-1), w2_m = p.w2(-1);
  const double d1 = std::norm(1.0 + w1_0);
  const double d2 = std::norm(1.0 - w2_m);
  if (d1 == 0.0) throw InvalidPotential("glue_full_line: W1(0) = -1");
  if (d2 == 0.0) throw InvalidPotential("glue_full_line: W2(-1) = 1");
  g.a = lam + spec.m - p.v2(0).real();
  g.b = (lam - spec.m - p.v1(0).real()) / d1;
  g.c = std::norm(1.0 - w2_0) / d1;
  g.bp = (lam - spec.m - p.v1(-1).real()) / d2;
  g.cp = std::norm(1.0 + w1_m) / d2;
  return g;
}

cplx glue_value(const GlueCoeffs& g, cplx alpha_r, cplx alpha_l) {
  return -1.0 / (g.a - 1.0 / (g.b + g.c * alpha_r) -
                 1.0 / (g.bp + g.cp * alpha_l));
}

}  // namespace

void glue_full_line_batch(const OperatorSpec& spec, std::span<const cplx> lams,
                          const GreenOptions& opts,
                          std::span<GreenOutcome> out) {
  if (spec.lattice.is_half_line()) {
    throw std::invalid_argument("glue_full_line: full-line specs only");
  }
  if (out.size() != lams.size()) {
    throw std::invalid_argument("glue_full_line_batch: size mismatch");
  }
  const OperatorSpec right = right_half_spec(spec);
  const OperatorSpec left = left_half_spec(spec);
  std::vector<GreenOutcome> right_out(lams.size());
  std::vector<GreenOutcome> left_out(lams.size());
  half_line_green_batch(right, 0, lams, opts, right_out);
  half_line_green_batch(left, 0, lams, opts, left_out);
  for (std::size_t i = 0; i < lams.size(); ++i) {
    if (!right_out[i].ok()) {
      out[i] = right_out[i];
      continue;
    }
    if (!left_out[i].ok()) {
      out[i] = left_out[i];
      continue;
    }
    try {
      const GlueCoeffs g = glue_coeffs(spec, lams[i]);
      const cplx val =
          glue_value(g, right_out[i].result.value, left_out[i].result.value);
      if (!(val.imag() > 0.0)) {
        throw std::domain_error(std::string(kHerglotzLabel) +
                                ": glued value left the upper half-plane");
      }
      GreenOutcome o;
      o.result.value = val;
      o.result.depth =
          std::max(right_out[i].result.depth, left_out[i].result.depth);
      o.result.residual =
          std::max(right_out[i].result.residual, left_out[i].result.residual);
      o.result.seed_used = opts.seed;
      out[i] = std::move(o);
    } catch (const std::exception& e) {
      out[i] = GreenOutcome{};
      out[i].error = e.what();
    }
  }
}

GreenResult glue_full_line(const OperatorSpec& spec, cplx lam,
                           const GreenOptions& opts) {
  require_upper(lam, "glue_full_line");
  GreenOutcome out;
  glue_full_line_batch(spec, std::span<const cplx>(&lam, 1), opts,
                       std::span<GreenOutcome>(&out, 1));
  return outcome_to_result(std::move(out));
}

}  // namespace dg
