// Reference lane-wise fold. The vector kernels mirror this operation order
// exactly (mul/add/sub/div/sqrt/max, no FMA), so per-lane results agree
// bitwise across kernels. Keep the two in sync when touching either.

#include <cmath>

#include "dirac_green/kernels.hpp"

namespace dg::kernels {

namespace {

template <bool kJacobi>
void run_impl(const StepBlock& s, const LaneArrays& L) {
  for (int i = 0; i < L.nlanes; ++i) {
    double Ar = L.ar[i], Ai = L.ai[i], Br = L.br[i], Bi = L.bi[i];
    double Cr = L.cr[i], Ci = L.ci[i], Dr = L.dr[i], Di = L.di[i];
    const double lr = L.lam_re[i];
    const double li = L.lam_im[i];

    for (int k = 0; k < s.count; ++k) {
      double are, aim, bre, bim, cc;
      if constexpr (kJacobi) {
        are = lr - s.v1[k];
        aim = li;
        bre = 1.0;
        bim = 0.0;
        cc = 1.0;
      } else {
        const double mv2 = s.m - s.v2[k];
        const double mm1 = -s.m - s.v1[k];
        const double rm = s.rmul[k];
        are = lr + mv2;
        aim = li;
        bre = (lr + mm1) * rm;
        bim = li * rm;
        cc = s.cmul[k];
      }

      // Step block (A1,B1,C1,D1) = (b, c, a*b - 1, a*c).
      const double a1r = bre, a1i = bim;
      const double b1r = cc, b1i = 0.0;
      const double c1r = (are * bre - aim * bim) - 1.0;
      const double c1i = are * bim + aim * bre;
      const double d1r = are * cc;
      const double d1i = aim * cc;

      const double nar = (Ar * c1r - Ai * c1i) - (Br * a1r - Bi * a1i);
      const double nai = (Ar * c1i + Ai * c1r) - (Br * a1i + Bi * a1r);
      const double nbr = (Ar * d1r - Ai * d1i) - (Br * b1r - Bi * b1i);
      const double nbi = (Ar * d1i + Ai * d1r) - (Br * b1i + Bi * b1r);
      const double ncr = (Cr * c1r - Ci * c1i) - (Dr * a1r - Di * a1i);
      const double nci = (Cr * c1i + Ci * c1r) - (Dr * a1i + Di * a1r);
      const double ndr = (Cr * d1r - Ci * d1i) - (Dr * b1r - Di * b1i);
      const double ndi = (Cr * d1i + Ci * d1r) - (Dr * b1i + Di * b1r);

      const double sa = nar * nar + nai * nai;
      const double sb = nbr * nbr + nbi * nbi;
      const double sc = ncr * ncr + nci * nci;
      const double sd = ndr * ndr + ndi * ndi;
      const double m1 = (sa > sb) ? sa : sb;
      const double m2 = (sc > sd) ? sc : sd;
      const double mx = (m1 > m2) ? m1 : m2;
      const double inv = 1.0 / std::sqrt(mx);

      Ar = nar * inv;
      Ai = nai * inv;
      Br = nbr * inv;
      Bi = nbi * inv;
      Cr = ncr * inv;
      Ci = nci * inv;
      Dr = ndr * inv;
      Di = ndi * inv;
    }

    L.ar[i] = Ar;
    L.ai[i] = Ai;
    L.br[i] = Br;
    L.bi[i] = Bi;
    L.cr[i] = Cr;
    L.ci[i] = Ci;
    L.dr[i] = Dr;
    L.di[i] = Di;
  }
}

void run_scalar(const StepBlock& s, const LaneArrays& L) {
  if (s.jacobi) {
    run_impl<true>(s, L);
  } else {
    run_impl<false>(s, L);
  }
}

}  // namespace

const FoldKernel& scalar_kernel() {
  static const FoldKernel k{"scalar", 1, &run_scalar};
  return k;
}

}  // namespace dg::kernels
