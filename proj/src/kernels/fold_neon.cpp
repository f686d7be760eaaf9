// NEON fold: two lanes per vector. Mirrors fold_scalar.cpp operation order;
// see the note there about keeping the kernels in sync.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "dirac_green/kernels.hpp"

namespace dg::kernels {

namespace {

template <bool kJacobi>
void run_impl(const StepBlock& s, const LaneArrays& L) {
  float64x2_t Ar = vld1q_f64(L.ar);
  float64x2_t Ai = vld1q_f64(L.ai);
  float64x2_t Br = vld1q_f64(L.br);
  float64x2_t Bi = vld1q_f64(L.bi);
  float64x2_t Cr = vld1q_f64(L.cr);
  float64x2_t Ci = vld1q_f64(L.ci);
  float64x2_t Dr = vld1q_f64(L.dr);
  float64x2_t Di = vld1q_f64(L.di);
  const float64x2_t lr = vld1q_f64(L.lam_re);
  const float64x2_t li = vld1q_f64(L.lam_im);
  const float64x2_t one = vdupq_n_f64(1.0);

  for (int k = 0; k < s.count; ++k) {
    float64x2_t are, aim, bre, bim, cc;
    if constexpr (kJacobi) {
      are = vsubq_f64(lr, vdupq_n_f64(s.v1[k]));
      aim = li;
      bre = one;
      bim = vdupq_n_f64(0.0);
      cc = one;
    } else {
      const float64x2_t mv2 = vdupq_n_f64(s.m - s.v2[k]);
      const float64x2_t mm1 = vdupq_n_f64(-s.m - s.v1[k]);
      const float64x2_t rm = vdupq_n_f64(s.rmul[k]);
      are = vaddq_f64(lr, mv2);
      aim = li;
      bre = vmulq_f64(vaddq_f64(lr, mm1), rm);
      bim = vmulq_f64(li, rm);
      cc = vdupq_n_f64(s.cmul[k]);
    }

    const float64x2_t a1r = bre, a1i = bim;
    const float64x2_t b1r = cc, b1i = vdupq_n_f64(0.0);
    const float64x2_t c1r =
        vsubq_f64(vsubq_f64(vmulq_f64(are, bre), vmulq_f64(aim, bim)), one);
    const float64x2_t c1i = vaddq_f64(vmulq_f64(are, bim), vmulq_f64(aim, bre));
    const float64x2_t d1r = vmulq_f64(are, cc);
    const float64x2_t d1i = vmulq_f64(aim, cc);

    const float64x2_t nar =
        vsubq_f64(vsubq_f64(vmulq_f64(Ar, c1r), vmulq_f64(Ai, c1i)),
                  vsubq_f64(vmulq_f64(Br, a1r), vmulq_f64(Bi, a1i)));
    const float64x2_t nai =
        vsubq_f64(vaddq_f64(vmulq_f64(Ar, c1i), vmulq_f64(Ai, c1r)),
                  vaddq_f64(vmulq_f64(Br, a1i), vmulq_f64(Bi, a1r)));
    const float64x2_t nbr =
        vsubq_f64(vsubq_f64(vmulq_f64(Ar, d1r), vmulq_f64(Ai, d1i)),
                  vsubq_f64(vmulq_f64(Br, b1r), vmulq_f64(Bi, b1i)));
    const float64x2_t nbi =
        vsubq_f64(vaddq_f64(vmulq_f64(Ar, d1i), vmulq_f64(Ai, d1r)),
                  vaddq_f64(vmulq_f64(Br, b1i), vmulq_f64(Bi, b1r)));
    const float64x2_t ncr =
        vsubq_f64(vsubq_f64(vmulq_f64(Cr, c1r), vmulq_f64(Ci, c1i)),
                  vsubq_f64(vmulq_f64(Dr, a1r), vmulq_f64(Di, a1i)));
    const float64x2_t nci =
        vsubq_f64(vaddq_f64(vmulq_f64(Cr, c1i), vmulq_f64(Ci, c1r)),
                  vaddq_f64(vmulq_f64(Dr, a1i), vmulq_f64(Di, a1r)));
    const float64x2_t ndr =
        vsubq_f64(vsubq_f64(vmulq_f64(Cr, d1r), vmulq_f64(Ci, d1i)),
                  vsubq_f64(vmulq_f64(Dr, b1r), vmulq_f64(Di, b1i)));
    const float64x2_t ndi =
        vsubq_f64(vaddq_f64(vmulq_f64(Cr, d1i), vmulq_f64(Ci, d1r)),
                  vaddq_f64(vmulq_f64(Dr, b1i), vmulq_f64(Di, b1r)));

    const float64x2_t sa = vaddq_f64(vmulq_f64(nar, nar), vmulq_f64(nai, nai));
    const float64x2_t sb = vaddq_f64(vmulq_f64(nbr, nbr), vmulq_f64(nbi, nbi));
    const float64x2_t sc = vaddq_f64(vmulq_f64(ncr, ncr), vmulq_f64(nci, nci));
    const float64x2_t sd = vaddq_f64(vmulq_f64(ndr, ndr), vmulq_f64(ndi, ndi));
    const float64x2_t m1 = vmaxq_f64(sa, sb);
    const float64x2_t m2 = vmaxq_f64(sc, sd);
    const float64x2_t mx = vmaxq_f64(m1, m2);
    const float64x2_t inv = vdivq_f64(one, vsqrtq_f64(mx));

    Ar = vmulq_f64(nar, inv);
    Ai = vmulq_f64(nai, inv);
    Br = vmulq_f64(nbr, inv);
    Bi = vmulq_f64(nbi, inv);
    Cr = vmulq_f64(ncr, inv);
    Ci = vmulq_f64(nci, inv);
    Dr = vmulq_f64(ndr, inv);
    Di = vmulq_f64(ndi, inv);
  }

  vst1q_f64(L.ar, Ar);
  vst1q_f64(L.ai, Ai);
  vst1q_f64(L.br, Br);
  vst1q_f64(L.bi, Bi);
  vst1q_f64(L.cr, Cr);
  vst1q_f64(L.ci, Ci);
  vst1q_f64(L.dr, Dr);
  vst1q_f64(L.di, Di);
}

void run_neon(const StepBlock& s, const LaneArrays& L) {
  if (s.jacobi) {
    run_impl<true>(s, L);
  } else {
    run_impl<false>(s, L);
  }
}

}  // namespace

const FoldKernel& neon_kernel() {
  static const FoldKernel k{"neon", 2, &run_neon};
  return k;
}

}  // namespace dg::kernels

#endif  // aarch64
