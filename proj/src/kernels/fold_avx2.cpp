// AVX2 fold: four lanes per vector, one lane per spectral parameter.
// Operation order matches fold_scalar.cpp token for token; only packed
// mul/add/sub/div/sqrt/max are used so lanes round identically to the
// reference kernel.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "dirac_green/kernels.hpp"

namespace dg::kernels {

namespace {

template <bool kJacobi>
void run_impl(const StepBlock& s, const LaneArrays& L) {
  __m256d Ar = _mm256_loadu_pd(L.ar);
  __m256d Ai = _mm256_loadu_pd(L.ai);
  __m256d Br = _mm256_loadu_pd(L.br);
  __m256d Bi = _mm256_loadu_pd(L.bi);
  __m256d Cr = _mm256_loadu_pd(L.cr);
  __m256d Ci = _mm256_loadu_pd(L.ci);
  __m256d Dr = _mm256_loadu_pd(L.dr);
  __m256d Di = _mm256_loadu_pd(L.di);
  const __m256d lr = _mm256_loadu_pd(L.lam_re);
  const __m256d li = _mm256_loadu_pd(L.lam_im);
  const __m256d one = _mm256_set1_pd(1.0);

  for (int k = 0; k < s.count; ++k) {
    __m256d are, aim, bre, bim, cc;
    if constexpr (kJacobi) {
      are = _mm256_sub_pd(lr, _mm256_set1_pd(s.v1[k]));
      aim = li;
      bre = one;
      bim = _mm256_setzero_pd();
      cc = one;
    } else {
      const __m256d mv2 = _mm256_set1_pd(s.m - s.v2[k]);
      const __m256d mm1 = _mm256_set1_pd(-s.m - s.v1[k]);
      const __m256d rm = _mm256_set1_pd(s.rmul[k]);
      are = _mm256_add_pd(lr, mv2);
      aim = li;
      bre = _mm256_mul_pd(_mm256_add_pd(lr, mm1), rm);
      bim = _mm256_mul_pd(li, rm);
      cc = _mm256_set1_pd(s.cmul[k]);
    }

    const __m256d a1r = bre, a1i = bim;
    const __m256d b1r = cc, b1i = _mm256_setzero_pd();
    const __m256d c1r = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(are, bre), _mm256_mul_pd(aim, bim)), one);
    const __m256d c1i =
        _mm256_add_pd(_mm256_mul_pd(are, bim), _mm256_mul_pd(aim, bre));
    const __m256d d1r = _mm256_mul_pd(are, cc);
    const __m256d d1i = _mm256_mul_pd(aim, cc);

    const __m256d nar = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(Ar, c1r), _mm256_mul_pd(Ai, c1i)),
        _mm256_sub_pd(_mm256_mul_pd(Br, a1r), _mm256_mul_pd(Bi, a1i)));
    const __m256d nai = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(Ar, c1i), _mm256_mul_pd(Ai, c1r)),
        _mm256_add_pd(_mm256_mul_pd(Br, a1i), _mm256_mul_pd(Bi, a1r)));
    const __m256d nbr = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(Ar, d1r), _mm256_mul_pd(Ai, d1i)),
        _mm256_sub_pd(_mm256_mul_pd(Br, b1r), _mm256_mul_pd(Bi, b1i)));
    const __m256d nbi = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(Ar, d1i), _mm256_mul_pd(Ai, d1r)),
        _mm256_add_pd(_mm256_mul_pd(Br, b1i), _mm256_mul_pd(Bi, b1r)));
    const __m256d ncr = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(Cr, c1r), _mm256_mul_pd(Ci, c1i)),
        _mm256_sub_pd(_mm256_mul_pd(Dr, a1r), _mm256_mul_pd(Di, a1i)));
    const __m256d nci = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(Cr, c1i), _mm256_mul_pd(Ci, c1r)),
        _mm256_add_pd(_mm256_mul_pd(Dr, a1i), _mm256_mul_pd(Di, a1r)));
    const __m256d ndr = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(Cr, d1r), _mm256_mul_pd(Ci, d1i)),
        _mm256_sub_pd(_mm256_mul_pd(Dr, b1r), _mm256_mul_pd(Di, b1i)));
    const __m256d ndi = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(Cr, d1i), _mm256_mul_pd(Ci, d1r)),
        _mm256_add_pd(_mm256_mul_pd(Dr, b1i), _mm256_mul_pd(Di, b1r)));

    const __m256d sa =
        _mm256_add_pd(_mm256_mul_pd(nar, nar), _mm256_mul_pd(nai, nai));
    const __m256d sb =
        _mm256_add_pd(_mm256_mul_pd(nbr, nbr), _mm256_mul_pd(nbi, nbi));
    const __m256d sc =
        _mm256_add_pd(_mm256_mul_pd(ncr, ncr), _mm256_mul_pd(nci, nci));
    const __m256d sd =
        _mm256_add_pd(_mm256_mul_pd(ndr, ndr), _mm256_mul_pd(ndi, ndi));
    const __m256d m1 = _mm256_max_pd(sa, sb);
    const __m256d m2 = _mm256_max_pd(sc, sd);
    const __m256d mx = _mm256_max_pd(m1, m2);
    const __m256d inv = _mm256_div_pd(one, _mm256_sqrt_pd(mx));

    Ar = _mm256_mul_pd(nar, inv);
    Ai = _mm256_mul_pd(nai, inv);
    Br = _mm256_mul_pd(nbr, inv);
    Bi = _mm256_mul_pd(nbi, inv);
    Cr = _mm256_mul_pd(ncr, inv);
    Ci = _mm256_mul_pd(nci, inv);
    Dr = _mm256_mul_pd(ndr, inv);
    Di = _mm256_mul_pd(ndi, inv);
  }

  _mm256_storeu_pd(L.ar, Ar);
  _mm256_storeu_pd(L.ai, Ai);
  _mm256_storeu_pd(L.br, Br);
  _mm256_storeu_pd(L.bi, Bi);
  _mm256_storeu_pd(L.cr, Cr);
  _mm256_storeu_pd(L.ci, Ci);
  _mm256_storeu_pd(L.dr, Dr);
  _mm256_storeu_pd(L.di, Di);
}

void run_avx2(const StepBlock& s, const LaneArrays& L) {
  if (s.jacobi) {
    run_impl<true>(s, L);
  } else {
    run_impl<false>(s, L);
  }
}

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

const FoldKernel& avx2_kernel() {
  static const FoldKernel k{"avx2", 4, &run_avx2};
  return k;
}

}  // namespace dg::kernels

#endif  // x86
