#include "dirac_green/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dirac_green/errors.hpp"

namespace dg {

double DenseComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const cplx& v : a_) s = std::max(s, std::abs(v));
  return s;
}

double DenseComplexMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return d;
}

void lu_factor(DenseComplexMatrix& a, std::vector<int>& perm) {
  const int n = a.dim();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), 0);
  const double tiny = 1e-300 * std::max(1.0, a.max_abs());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < tiny) {
      throw SingularSystem("lu_factor: pivot underflow at column " +
                           std::to_string(k));
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    const cplx inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const cplx l = a(i, k) * inv;
      a(i, k) = l;
      if (l != cplx(0.0)) {
        for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      }
    }
  }
}

void lu_solve(const DenseComplexMatrix& lu, const std::vector<int>& perm,
              std::vector<cplx>& rhs) {
  const int n = lu.dim();
  std::vector<cplx> b(n);
  for (int i = 0; i < n; ++i) b[i] = rhs[perm[i]];
  for (int i = 1; i < n; ++i) {
    cplx s = b[i];
    for (int j = 0; j < i; ++j) s -= lu(i, j) * b[j];
    b[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    cplx s = b[i];
    for (int j = i + 1; j < n; ++j) s -= lu(i, j) * b[j];
    b[i] = s / lu(i, i);
  }
  rhs = std::move(b);
}

namespace {

long section_first_site(const OperatorSpec& spec, int N) {
  return spec.lattice.is_half_line() ? spec.lattice.start
                                     : -static_cast<long>(N / 2);
}

}  // namespace

int section_index(const OperatorSpec& spec, int N, long site, Spin spin) {
  const long first = section_first_site(spec, N);
  const long idx = site - first;
  if (idx < 0 || idx >= N) {
    throw std::invalid_argument("section_index: site outside the window");
  }
  if (spec.mode == Mode::Jacobi) return static_cast<int>(idx);
  return static_cast<int>(2 * idx) + (spin == Spin::Down ? 1 : 0);
}

namespace {

// Emits every nonzero entry of the section once per (i, j) position.
template <typename Sink>
void assemble_section(const OperatorSpec& spec, int N, Sink&& put) {
  if (N < 2) throw std::invalid_argument("finite_section: N >= 2 required");
  const long first = section_first_site(spec, N);
  const PotentialPair& p = spec.pot;

  if (spec.mode == Mode::Jacobi) {
    for (int i = 0; i < N; ++i) {
      const long n = first + i;
      const bool boundary =
          spec.lattice.is_half_line() && n == spec.lattice.start;
      put(i, i, cplx((boundary ? 1.0 : 2.0) + p.v1(n).real()));
      if (i + 1 < N) {
        put(i, i + 1, cplx(-1.0));
        put(i + 1, i, cplx(-1.0));
      }
    }
    return;
  }

  for (int i = 0; i < N; ++i) {
    const long n = first + i;
    put(2 * i, 2 * i, cplx(spec.m + p.v1(n).real()));
    put(2 * i + 1, 2 * i + 1, cplx(-spec.m + p.v2(n).real()));
    // dt block rows: (n, n) = 1 + W1(n), (n, n+1) = W2(n) - 1; the adjoint
    // block is its conjugate transpose, which also reproduces the half-line
    // boundary row.
    const cplx diag = 1.0 + p.w1(n);
    put(2 * i, 2 * i + 1, diag);
    put(2 * i + 1, 2 * i, std::conj(diag));
    if (i + 1 < N) {
      const cplx off = p.w2(n) - 1.0;
      put(2 * i, 2 * (i + 1) + 1, off);
      put(2 * (i + 1) + 1, 2 * i, std::conj(off));
    }
  }
}

}  // namespace

DenseComplexMatrix finite_section(const OperatorSpec& spec, int N) {
  DenseComplexMatrix m(spec.mode == Mode::Jacobi ? N : 2 * N);
  assemble_section(spec, N, [&m](int i, int j, cplx v) { m(i, j) = v; });
  return m;
}

cplx finite_section_green(const OperatorSpec& spec, cplx lam, int N,
                          SpinorIndex source, SpinorIndex target) {
  if (lam.imag() == 0.0) {
    throw std::invalid_argument("finite_section_green: Im(lam) != 0 required");
  }
  DenseComplexMatrix m = finite_section(spec, N);
  const int dim = m.dim();
  for (int i = 0; i < dim; ++i) m(i, i) -= lam;
  std::vector<int> perm;
  lu_factor(m, perm);
  std::vector<cplx> rhs(dim, cplx(0.0));
  rhs[section_index(spec, N, source.site, source.spin)] = 1.0;
  lu_solve(m, perm, rhs);
  return rhs[section_index(spec, N, target.site, target.spin)];
}

namespace {

// Band matrix with half-width kb on both sides, stored LAPACK-style with kb
// extra superdiagonals for pivoting fill: entry (i, j) is valid for
// i - j in [-2 kb, kb] and lives at band row (i - j) + 2 kb of column j.
class BandedLU {
 public:
  BandedLU(int n, int kb)
      : n_(n),
        kb_(kb),
        ku_(2 * kb),
        a_(static_cast<std::size_t>(3 * kb + 1) * n, cplx(0.0)),
        swap_with_(n, 0) {}

  void set_entry(int i, int j, cplx v) {
    if (i - j <= kb_ && j - i <= kb_) at(i, j) = v;
  }

  void factor() {
    double scale = 0.0;
    for (const cplx& v : a_) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-300 * std::max(1.0, scale);
    for (int k = 0; k < n_; ++k) {
      const int last = std::min(k + kb_, n_ - 1);
      int piv = k;
      double best = std::abs(at(k, k));
      for (int i = k + 1; i <= last; ++i) {
        const double v = std::abs(at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < tiny) {
        throw SingularSystem("banded LU: pivot underflow at column " +
                             std::to_string(k));
      }
      swap_with_[k] = piv;
      const int jmax = std::min(k + ku_, n_ - 1);
      if (piv != k) {
        for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(piv, j));
      }
      const cplx inv = 1.0 / at(k, k);
      for (int i = k + 1; i <= last; ++i) {
        const cplx l = at(i, k) * inv;
        at(i, k) = l;
        if (l != cplx(0.0)) {
          for (int j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
        }
      }
    }
  }

  void solve(std::vector<cplx>& b) const {
    for (int k = 0; k < n_; ++k) {
      if (swap_with_[k] != k) std::swap(b[k], b[swap_with_[k]]);
      const int last = std::min(k + kb_, n_ - 1);
      for (int i = k + 1; i <= last; ++i) {
        b[i] -= cat(i, k) * b[k];
      }
    }
    for (int i = n_ - 1; i >= 0; --i) {
      cplx s = b[i];
      const int jmax = std::min(i + ku_, n_ - 1);
      for (int j = i + 1; j <= jmax; ++j) s -= cat(i, j) * b[j];
      b[i] = s / cat(i, i);
    }
  }

 private:
  cplx& at(int i, int j) {
    return a_[static_cast<std::size_t>((i - j) + 2 * kb_) * n_ + j];
  }
  cplx cat(int i, int j) const {
    return a_[static_cast<std::size_t>((i - j) + 2 * kb_) * n_ + j];
  }

  int n_, kb_, ku_;
  std::vector<cplx> a_;
  std::vector<int> swap_with_;
};

}  // namespace

cplx finite_section_green_banded(const OperatorSpec& spec, cplx lam, int N,
                                 SpinorIndex source, SpinorIndex target) {
  if (lam.imag() == 0.0) {
    throw std::invalid_argument(
        "finite_section_green_banded: Im(lam) != 0 required");
  }
  const int kb = spec.mode == Mode::Jacobi ? 1 : 3;
  const int dim = spec.mode == Mode::Jacobi ? N : 2 * N;
  BandedLU lu(dim, kb);
  assemble_section(spec, N, [&lu, lam](int i, int j, cplx v) {
    lu.set_entry(i, j, i == j ? v - lam : v);
  });
  lu.factor();
  std::vector<cplx> rhs(dim, cplx(0.0));
  rhs[section_index(spec, N, source.site, source.spin)] = 1.0;
  lu.solve(rhs);
  return rhs[section_index(spec, N, target.site, target.spin)];
}

EigDecomposition hermitian_eig_full(const DenseComplexMatrix& m,
                                    bool want_vectors) {
  const int n = m.dim();
  if (n > 1000) {
    throw std::invalid_argument("hermitian_eig_full: dimension cap 1000");
  }
  if (m.hermiticity_defect() > 1e-12 * std::max(1.0, m.max_abs())) {
    throw NotHermitian("hermitian_eig_full: input is not Hermitian");
  }

  DenseComplexMatrix a = m;
  EigDecomposition out;
  out.has_vectors = want_vectors;
  if (want_vectors) {
    out.vectors = DenseComplexMatrix(n);
    for (int i = 0; i < n; ++i) out.vectors(i, i) = 1.0;
  }

  double fro = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) fro += std::norm(a(i, j));
  }
  fro = std::sqrt(fro);
  const double stop = 1e-15 * std::max(fro, 1e-300);

  const int max_sweeps = 60;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += 2.0 * std::norm(a(i, j));
    }
    if (std::sqrt(off) <= stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx u = apq / mag;  // phase
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const cplx s = t * c * u;

        // Columns: (k,p) <- c A_kp - conj(s) A_kq ; (k,q) <- s A_kp + c A_kq.
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - std::conj(s) * akq;
          a(k, q) = s * akp + c * akq;
        }
        // Rows: (p,k) <- c A_pk - s A_qk ; (q,k) <- conj(s) A_pk + c A_qk.
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = std::conj(s) * apk + c * aqk;
        }
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);
        a(p, q) = cplx(0.0);
        a(q, p) = cplx(0.0);

        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const cplx vkp = out.vectors(k, p);
            const cplx vkq = out.vectors(k, q);
            out.vectors(k, p) = c * vkp - std::conj(s) * vkq;
            out.vectors(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  out.sweeps = sweep;

  out.values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return diag[x] < diag[y]; });
  for (int i = 0; i < n; ++i) out.values[i] = diag[order[i]];
  if (want_vectors) {
    DenseComplexMatrix sorted(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) sorted(i, j) = out.vectors(i, order[j]);
    }
    out.vectors = std::move(sorted);
  }
  return out;
}

std::vector<double> hermitian_eigs(const DenseComplexMatrix& m) {
  return hermitian_eig_full(m, false).values;
}

double eig_residual(const DenseComplexMatrix& m, const EigDecomposition& d) {
  if (!d.has_vectors) {
    throw std::invalid_argument("eig_residual: decomposition lacks vectors");
  }
  const int n = m.dim();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx s = -d.values[j] * d.vectors(i, j);
      for (int k = 0; k < n; ++k) s += m(i, k) * d.vectors(k, j);
      r += std::norm(s);
    }
    worst = std::max(worst, std::sqrt(r));
  }
  return worst;
}

EmbeddedEigReport embedded_eigenvalue_demo(int n0, double m) {
  if (n0 < 1) throw std::invalid_argument("embedded_eigenvalue_demo: n0 >= 1");
  EmbeddedEigReport rep;
  rep.n0 = n0;
  rep.m = m;
  // Placing the defect at site n0 - 1 splits off the sites 0..n0-1, a
  // 2 n0-dimensional direct summand; the complement is again a clean
  // half-line operator.
  rep.defect_site = n0 - 1;

  OperatorSpec spec;
  spec.mode = Mode::Dirac;
  spec.m = m;
  spec.lattice = Lattice::half_line(0);
  spec.pot.w1 = PotentialComponent::bump_table({{rep.defect_site, cplx(-1.0)}});
  spec.pot.w2 = PotentialComponent::bump_table({{rep.defect_site, cplx(1.0)}});

  const int N = n0 + 24;
  DenseComplexMatrix section = finite_section(spec, N);
  const int bd = 2 * n0;

  for (int i = 0; i < bd; ++i) {
    for (int j = bd; j < section.dim(); ++j) {
      rep.max_offblock_coupling =
          std::max(rep.max_offblock_coupling,
                   std::max(std::abs(section(i, j)), std::abs(section(j, i))));
    }
  }

  DenseComplexMatrix block(bd);
  for (int i = 0; i < bd; ++i) {
    for (int j = 0; j < bd; ++j) block(i, j) = section(i, j);
  }
  rep.block_eigs = hermitian_eigs(block);

  rep.predicted.clear();
  for (int k = 0; k < n0; ++k) {
    const double s = std::sin(k * M_PI / (2.0 * n0));
    const double mu = std::sqrt(m * m + 4.0 * s * s);
    rep.predicted.push_back(mu);
    rep.predicted.push_back(-mu);
  }
  std::sort(rep.predicted.begin(), rep.predicted.end());

  rep.max_formula_error = 0.0;
  for (int i = 0; i < bd; ++i) {
    rep.max_formula_error = std::max(
        rep.max_formula_error, std::abs(rep.block_eigs[i] - rep.predicted[i]));
  }

  const double outer = std::sqrt(m * m + 4.0);
  rep.all_in_band = true;
  for (double mu : rep.block_eigs) {
    const double am = std::abs(mu);
    if (am < m - 1e-9 || am > outer + 1e-9) rep.all_in_band = false;
  }

  // The block is a direct summand, so its spectrum must reappear verbatim in
  // the spectrum of any window containing it.
  std::vector<double> all = hermitian_eigs(section);
  rep.max_section_match_error = 0.0;
  for (double mu : rep.block_eigs) {
    double best = std::numeric_limits<double>::infinity();
    for (double nu : all) best = std::min(best, std::abs(mu - nu));
    rep.max_section_match_error = std::max(rep.max_section_match_error, best);
  }
  return rep;
}

}  // namespace dg
