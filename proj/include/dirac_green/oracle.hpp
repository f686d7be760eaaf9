#pragma once

// Brute-force ground truth: finite sections of the operators as explicit
// matrices, direct linear solves for Green entries, a hand-rolled dense
// Hermitian eigensolver, and the embedded-eigenvalue construction from the
// decoupling hopping defect.

#include <vector>

#include "dirac_green/green.hpp"
#include "dirac_green/model.hpp"

namespace dg {

class DenseComplexMatrix {
 public:
  DenseComplexMatrix() = default;
  explicit DenseComplexMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

  int dim() const { return n_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  double max_abs() const;
  // max |A - A*| entrywise.
  double hermiticity_defect() const;

 private:
  int n_ = 0;
  std::vector<cplx> a_;
};

// In-place LU with partial pivoting; perm holds the row swaps. Throws
// SingularSystem when a pivot underflows.
void lu_factor(DenseComplexMatrix& a, std::vector<int>& perm);
void lu_solve(const DenseComplexMatrix& lu, const std::vector<int>& perm,
              std::vector<cplx>& rhs);

// Truncation of the operator to N lattice sites with hard truncation
// (couplings leaving the window dropped). Dirac mode: 2N x 2N, interleaved
// (site, spin) with spin-up first, sites start..start+N-1 on a half line and
// -(N/2)..-(N/2)+N-1 on the full line. Jacobi mode: N x N with the boundary
// row of the half-line Laplacian.
DenseComplexMatrix finite_section(const OperatorSpec& spec, int N);

// Matrix row of a given (site, spin); spin is ignored in Jacobi mode.
int section_index(const OperatorSpec& spec, int N, long site, Spin spin);

// <e_target, (M - lam)^{-1} e_source> for the N-site section, solved by
// dense LU with partial pivoting.
cplx finite_section_green(const OperatorSpec& spec, cplx lam, int N,
                          SpinorIndex source, SpinorIndex target);

// Same entry through a banded LU (the sections have bandwidth 3 resp. 1);
// equivalence-tested against the dense route and cheap enough for N in the
// thousands.
cplx finite_section_green_banded(const OperatorSpec& spec, cplx lam, int N,
                                 SpinorIndex source, SpinorIndex target);

struct EigDecomposition {
  std::vector<double> values;          // ascending
  DenseComplexMatrix vectors;          // columns, when requested
  bool has_vectors = false;
  int sweeps = 0;
};

// All eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
// Dimension cap 1000. Throws NotHermitian when the defect exceeds 1e-12.
std::vector<double> hermitian_eigs(const DenseComplexMatrix& m);
EigDecomposition hermitian_eig_full(const DenseComplexMatrix& m,
                                    bool want_vectors);

// Largest residual ||M v - mu v|| over all pairs of the decomposition.
double eig_residual(const DenseComplexMatrix& m, const EigDecomposition& d);

struct EmbeddedEigReport {
  int n0 = 0;
  double m = 0.0;
  long defect_site = 0;                 // where W1 = -1, W2 = 1 is placed
  std::vector<double> block_eigs;       // spectrum of the decoupled block
  std::vector<double> predicted;        // +-sqrt(m^2 + 4 sin^2(k pi / 2 n0))
  double max_formula_error = 0.0;
  double max_offblock_coupling = 0.0;   // exact decoupling check
  bool all_in_band = false;             // |mu| within [m, sqrt(m^2+4)]
  double max_section_match_error = 0.0; // eigenvalues found in the big section
};

// Places the decoupling defect W1 = -1, W2 = 1 so that a 2 n0-dimensional
// block splits off the half-line operator, and checks its spectrum against
// the closed-form values, all of which sit inside the essential spectrum.
EmbeddedEigReport embedded_eigenvalue_demo(int n0, double m);

}  // namespace dg
