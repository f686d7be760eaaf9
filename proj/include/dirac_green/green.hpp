#pragma once

// Diagonal Green functions of the half-line operators via the contraction
// recursion alpha_n = Phi_n(alpha_{n+1}), periodic fixed-point seeds, the
// full-line gluing of the two half-line values, and resolvent matrix
// elements reconstructed from the diagonal by solution propagation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dirac_green/halfplane.hpp"
#include "dirac_green/kernels.hpp"
#include "dirac_green/model.hpp"

namespace dg {

struct SeedStrategy {
  enum class Kind { ImaginaryUnit, PeriodicFixedPoint };
  Kind kind = Kind::PeriodicFixedPoint;
  int nu = 0;  // 0: take the spec's nu

  static SeedStrategy imaginary_unit() { return {Kind::ImaginaryUnit, 0}; }
  static SeedStrategy periodic(int nu = 0) {
    return {Kind::PeriodicFixedPoint, nu};
  }
  std::string label() const;
};

struct GreenOptions {
  double tol = 1e-12;
  long max_depth = 1'000'000;
  SeedStrategy seed = SeedStrategy::periodic();
  // Steps folded between residual checks; 0 means max(nu, 64).
  int block = 0;
  // Kernel override ("", "scalar", "avx2", "neon"); "" follows
  // DIRAC_GREEN_KERNEL and then CPU detection.
  std::string kernel;
};

struct GreenResult {
  cplx value{};  // Im > 0 always
  long depth = 0;
  double residual = 0.0;
  std::optional<double> error_bound;  // tail bound when a uniform delta < 1 exists
  SeedStrategy seed_used;
};

// Batched evaluation records failures per lane instead of throwing.
struct GreenOutcome {
  GreenResult result;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// alpha_n of the operator truncated at `site` (the spec's own start on a
// half line, or any site of a full-line spec, sweeping rightward).
// Throws MaxDepthExceeded / InvalidPotential.
GreenResult half_line_green(const OperatorSpec& spec, cplx lam, long site,
                            const GreenOptions& opts = {});

// Same recursion for many spectral parameters at once through the lane
// kernels; out.size() must equal lams.size().
void half_line_green_batch(const OperatorSpec& spec, long site,
                           std::span<const cplx> lams, const GreenOptions& opts,
                           std::span<GreenOutcome> out);

// Fixed point z_n(lam) of the nu-fold composition Phi_n . ... . Phi_{n+nu-1}.
// Accepts real lam inside a band; propagates NoHalfPlaneFixedPoint.
HalfPlanePoint periodic_seed(const OperatorSpec& spec, cplx lam, long site,
                             int nu);

// <delta_0, (Delta_2^(Z))^{-1} delta_0> of a full-line spec, glued from the
// two half-line Green values.
GreenResult glue_full_line(const OperatorSpec& spec, cplx lam,
                           const GreenOptions& opts = {});
void glue_full_line_batch(const OperatorSpec& spec, std::span<const cplx> lams,
                          const GreenOptions& opts,
                          std::span<GreenOutcome> out);

struct SpinorIndex {
  long site = 0;
  Spin spin = Spin::Down;
};

// <e_target, (H - lam)^{-1} e_source> for Im(lam) != 0. Spin-down diagonals
// come from the recursion (plus gluing on the full line); spin-up entries go
// through charge conjugation; everything else is reconstructed from a
// diagonal by propagating the defining recurrence.
cplx resolvent_entry(const OperatorSpec& spec, cplx lam, SpinorIndex source,
                     SpinorIndex target, const GreenOptions& opts = {});

// Resolvent column (H - lam)^{-1} (0,1)^t delta_start on sites
// start..start+n_sites, anchored at the supplied boundary value f2(start).
// The spin-down tail follows the decaying solution built from the Green
// chain; a boundary value differing from the recursion's own alpha_0 adds
// the complementary growing solution, which the magnitude guard may abort
// with UnstableMarch.
SpinorVector propagate_solution(const OperatorSpec& spec, cplx lam,
                                cplx f2_at_start, long n_sites,
                                const GreenOptions& opts = {});

}  // namespace dg
