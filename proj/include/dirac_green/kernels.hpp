#pragma once

// Data-parallel inner loop of the Green recursion: folding a run of one-step
// coefficient blocks into per-lane projective 2x2 states, one lane per
// spectral parameter. A scalar reference kernel is always available; AVX2
// (4 lanes) and NEON (2 lanes) variants are selected at runtime and are
// bitwise-equivalent to the reference lane for lane (same operation order,
// no FMA contraction).

#include <string>
#include <string_view>
#include <vector>

namespace dg::kernels {

// Lane-shared per-step inputs, arrays of length `count`:
//   Dirac:  a = lam + (m - v2[k]),  b = (lam + (-m - v1[k])) * rmul[k],
//           c = cmul[k]
//   Jacobi: a = lam - v1[k], b = 1, c = 1 (rmul/cmul unused)
struct StepBlock {
  const double* v1 = nullptr;
  const double* v2 = nullptr;
  const double* rmul = nullptr;
  const double* cmul = nullptr;
  int count = 0;
  double m = 0.0;
  bool jacobi = false;
};

// Per-lane homography state (A,B,C,D) of z -> -(A+Bz)/(C+Dz), split into
// real/imag arrays of length >= nlanes, plus the lane spectral parameters.
// Each step composes state . phi_k and renormalizes by the largest
// coefficient magnitude. Lanes never interact.
struct LaneArrays {
  double* ar = nullptr;
  double* ai = nullptr;
  double* br = nullptr;
  double* bi = nullptr;
  double* cr = nullptr;
  double* ci = nullptr;
  double* dr = nullptr;
  double* di = nullptr;
  const double* lam_re = nullptr;
  const double* lam_im = nullptr;
  int nlanes = 0;
};

using FoldFn = void (*)(const StepBlock&, const LaneArrays&);

struct FoldKernel {
  const char* name;
  int width;  // natural lane count
  FoldFn run;
};

const FoldKernel& scalar_kernel();

#if defined(__x86_64__) || defined(__i386__)
const FoldKernel& avx2_kernel();  // call only when avx2_available()
bool avx2_available();
#endif
#if defined(__aarch64__)
const FoldKernel& neon_kernel();
#endif

// Picks the widest kernel the CPU supports. `override_name` (or the
// DIRAC_GREEN_KERNEL environment variable) forces "scalar", "avx2" or
// "neon"; unknown or unavailable names throw std::invalid_argument.
const FoldKernel& select_kernel(std::string_view override_name = {});

std::vector<std::string> available_kernels();

}  // namespace dg::kernels
