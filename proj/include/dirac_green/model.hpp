#pragma once

// Operator definitions: potentials over the lattice, the perturbed Dirac
// operator H = [[m+V1, dt],[dt*, -m+V2]] with dt = d + W1 + W2 tau, the
// Laplacian-like reductions Delta_1/Delta_2, sequence symmetries (shift,
// reflection, charge conjugation) and the scalar Jacobi mode. Everything here
// acts exactly on finitely supported sequences.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dirac_green/errors.hpp"
#include "dirac_green/halfplane.hpp"

namespace dg {

enum class Mode { Dirac, Jacobi };
enum class Spin { Up, Down };

struct Lattice {
  enum class Kind { HalfLine, FullLine };
  Kind kind = Kind::HalfLine;
  long start = 0;  // left endpoint for half lines, ignored otherwise

  static Lattice half_line(long k) { return {Kind::HalfLine, k}; }
  static Lattice full_line() { return {Kind::FullLine, 0}; }
  bool is_half_line() const { return kind == Kind::HalfLine; }
};

// One scalar sequence over Z: a named family, an explicit table with zero
// extension, or a transform (shift/reflect/conjugate/negate) of another
// component. Evaluation is a pure function of the site.
class PotentialComponent {
 public:
  PotentialComponent();  // zero

  cplx operator()(long n) const { return eval_(n); }
  double sup_norm() const { return sup_; }
  bool is_zero() const { return zero_; }

  static PotentialComponent zero();
  // amp / (|n - center| + 1)^p
  static PotentialComponent power(cplx amp, double p, long center = 0);
  // (-1)^n * amp / (|n - center| + 1)^p
  static PotentialComponent oscillating(cplx amp, double p, long center = 0);
  // pattern[n mod q] * amp / (|n - center| + 1)^p
  static PotentialComponent periodic_decay(std::vector<cplx> pattern, cplx amp,
                                           double p, long center = 0);
  static PotentialComponent bump_table(std::map<long, cplx> entries);
  // Per-site hash of (seed, n), uniform on the square [-amp, amp]^2 for
  // complex amplitude scale, [-amp, amp] when imag_part is false.
  static PotentialComponent iid_uniform(double amp, std::uint64_t seed,
                                        bool imag_part = false);

  PotentialComponent shifted(long j) const;     // n -> base(n + j)
  PotentialComponent reflected() const;         // n -> base(-n)
  PotentialComponent conjugated() const;        // n -> conj(base(n))
  PotentialComponent negated() const;           // n -> -base(n)

 private:
  PotentialComponent(std::function<cplx(long)> eval, double sup, bool zero);
  std::function<cplx(long)> eval_;
  double sup_ = 0.0;
  bool zero_ = true;
};

// The four sequences (V1, V2, W1, W2). V components are real-valued; the
// recursion additionally needs W1(n) != -1 and W2(n) != 1 everywhere, which
// finite-section operations deliberately do not require.
struct PotentialPair {
  PotentialComponent v1, v2, w1, w2;

  bool valid_at(long n) const;
};

struct OperatorSpec {
  Mode mode = Mode::Dirac;
  double m = 0.0;  // mass, ignored in Jacobi mode
  Lattice lattice;
  PotentialPair pot;  // Jacobi mode reads only pot.v1 as its scalar V
  int nu1 = 1;
  int nu2 = 1;

  int nu() const { return nu1 * nu2; }
};

// Finitely supported element of l^2(lattice, C^2).
struct SpinorVector {
  std::map<long, cplx> up;
  std::map<long, cplx> down;

  cplx at(long n, Spin s) const;
  void set(long n, Spin s, cplx v);
  double norm() const;
  static SpinorVector basis(long n, Spin s);
};

// Exact application of H_{m,V,W} on a finitely supported spinor.
SpinorVector apply_dirac(const OperatorSpec& spec, const SpinorVector& f);

// Delta_2 = dt* (lam - m - V1)^{-1} dt - (lam + m - V2), applied row by row
// with the half-line boundary row. Requires Im(lam) > 0.
std::map<long, cplx> apply_delta2(const OperatorSpec& spec, cplx lam,
                                  const std::map<long, cplx>& f);

// Delta_1 = dt (lam + m - V2)^{-1} dt* - (lam - m - V1). Full line only;
// provided for residual testing, never inverted.
std::map<long, cplx> apply_delta1(const OperatorSpec& spec, cplx lam,
                                  const std::map<long, cplx>& f);

// Charge conjugation U (f1, f2) = (i S f2, -i S f1) with S f(n) = f(-n).
SpinorVector apply_U(const SpinorVector& f);

// Spec with potentials (-S V2, -S V1) and (S conj(W1), tau S conj(W2)), so
// that U H U = -H_conjugated holds exactly. Full-line specs only.
OperatorSpec charge_conjugate(const OperatorSpec& spec);

// Componentwise reindexing: (tau^j p)(n) = p(n + j), (S p)(n) = p(-n).
PotentialPair shift_potential(const PotentialPair& p, long j);
PotentialPair reflect_potential(const PotentialPair& p);

// The two half-line specs a full-line problem glues from: the right one
// carries the potentials shifted one site right; the left one carries the
// reflected component shuffle that turns the sweep over negative sites into
// a standard half-line sweep.
OperatorSpec right_half_spec(const OperatorSpec& spec);
OperatorSpec left_half_spec(const OperatorSpec& spec);

// Coefficients of the one-step map Phi_n: a = lam + m - V2(n),
// b = (lam - m - V1(n)) |1 + W1(n)|^{-2}, c = |(1 - W2(n))/(1 + W1(n))|^2.
// Jacobi mode: (lam - V(n), 1, 1). Throws InvalidPotential at violating sites.
MoebiusCoeffs recursion_coeffs(const OperatorSpec& spec, cplx lam, long n);

// Spectrum of the unperturbed operator: two symmetric bands for Dirac,
// a single band [0, 4] in Jacobi mode.
struct BandEdges {
  std::vector<std::pair<double, double>> bands;
};
BandEdges free_band_edges(double m, Mode mode = Mode::Dirac);

}  // namespace dg
