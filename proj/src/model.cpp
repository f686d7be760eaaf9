#include "dirac_green/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dg {

namespace {

double mix64(std::uint64_t x) {
  // splitmix64 finalizer; gives a uniform double in [0, 1).
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x = x ^ (x >> 31);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

long floor_mod(long n, long q) {
  long r = n % q;
  return r < 0 ? r + q : r;
}

}  // namespace

PotentialComponent::PotentialComponent()
    : eval_([](long) { return cplx(0.0); }), sup_(0.0), zero_(true) {}

PotentialComponent::PotentialComponent(std::function<cplx(long)> eval,
                                       double sup, bool zero)
    : eval_(std::move(eval)), sup_(sup), zero_(zero) {}

PotentialComponent PotentialComponent::zero() { return PotentialComponent(); }

PotentialComponent PotentialComponent::power(cplx amp, double p, long center) {
  if (amp == cplx(0.0)) return zero();
  return PotentialComponent(
      [amp, p, center](long n) {
        return amp * std::pow(static_cast<double>(std::labs(n - center)) + 1.0,
                              -p);
      },
      std::abs(amp), false);
}

PotentialComponent PotentialComponent::oscillating(cplx amp, double p,
                                                   long center) {
  if (amp == cplx(0.0)) return zero();
  return PotentialComponent(
      [amp, p, center](long n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return sign * amp *
               std::pow(static_cast<double>(std::labs(n - center)) + 1.0, -p);
      },
      std::abs(amp), false);
}

PotentialComponent PotentialComponent::periodic_decay(std::vector<cplx> pattern,
                                                      cplx amp, double p,
                                                      long center) {
  if (pattern.empty()) throw std::invalid_argument("periodic_decay: empty pattern");
  double pmax = 0.0;
  for (cplx v : pattern) pmax = std::max(pmax, std::abs(v));
  if (amp == cplx(0.0) || pmax == 0.0) return zero();
  const long q = static_cast<long>(pattern.size());
  return PotentialComponent(
      [pattern = std::move(pattern), amp, p, center, q](long n) {
        return pattern[floor_mod(n, q)] * amp *
               std::pow(static_cast<double>(std::labs(n - center)) + 1.0, -p);
      },
      std::abs(amp) * pmax, false);
}

PotentialComponent PotentialComponent::bump_table(std::map<long, cplx> entries) {
  double sup = 0.0;
  for (const auto& [n, v] : entries) sup = std::max(sup, std::abs(v));
  if (sup == 0.0) return zero();
  return PotentialComponent(
      [entries = std::move(entries)](long n) {
        auto it = entries.find(n);
        return it == entries.end() ? cplx(0.0) : it->second;
      },
      sup, false);
}

PotentialComponent PotentialComponent::iid_uniform(double amp,
                                                   std::uint64_t seed,
                                                   bool imag_part) {
  if (amp == 0.0) return zero();
  return PotentialComponent(
      [amp, seed, imag_part](long n) {
        const std::uint64_t site = static_cast<std::uint64_t>(n);
        const double re = amp * (2.0 * mix64(seed ^ (site * 2 + 1)) - 1.0);
        if (!imag_part) return cplx(re, 0.0);
        const double im = amp * (2.0 * mix64(seed ^ (site * 2)) - 1.0);
        return cplx(re, im);
      },
      imag_part ? amp * std::sqrt(2.0) : amp, false);
}

PotentialComponent PotentialComponent::shifted(long j) const {
  if (zero_ || j == 0) return *this;
  return PotentialComponent([base = eval_, j](long n) { return base(n + j); },
                            sup_, false);
}

PotentialComponent PotentialComponent::reflected() const {
  if (zero_) return *this;
  return PotentialComponent([base = eval_](long n) { return base(-n); }, sup_,
                            false);
}

PotentialComponent PotentialComponent::conjugated() const {
  if (zero_) return *this;
  return PotentialComponent(
      [base = eval_](long n) { return std::conj(base(n)); }, sup_, false);
}

PotentialComponent PotentialComponent::negated() const {
  if (zero_) return *this;
  return PotentialComponent([base = eval_](long n) { return -base(n); }, sup_,
                            false);
}

bool PotentialPair::valid_at(long n) const {
  return w1(n) != cplx(-1.0) && w2(n) != cplx(1.0);
}

cplx SpinorVector::at(long n, Spin s) const {
  const auto& comp = (s == Spin::Up) ? up : down;
  auto it = comp.find(n);
  return it == comp.end() ? cplx(0.0) : it->second;
}

void SpinorVector::set(long n, Spin s, cplx v) {
  auto& comp = (s == Spin::Up) ? up : down;
  if (v == cplx(0.0)) {
    comp.erase(n);
  } else {
    comp[n] = v;
  }
}

double SpinorVector::norm() const {
  double s = 0.0;
  for (const auto& [n, v] : up) s += std::norm(v);
  for (const auto& [n, v] : down) s += std::norm(v);
  return std::sqrt(s);
}

SpinorVector SpinorVector::basis(long n, Spin s) {
  SpinorVector f;
  f.set(n, s, cplx(1.0));
  return f;
}

namespace {

bool on_lattice(const Lattice& lat, long n) {
  return !lat.is_half_line() || n >= lat.start;
}

// Sites where the output can be nonzero: support plus nearest neighbours,
// clipped to the lattice.
std::set<long> touched_sites(const Lattice& lat, const SpinorVector& f) {
  std::set<long> sites;
  auto add = [&](long n) {
    for (long k = n - 1; k <= n + 1; ++k) {
      if (on_lattice(lat, k)) sites.insert(k);
    }
  };
  for (const auto& [n, v] : f.up) add(n);
  for (const auto& [n, v] : f.down) add(n);
  return sites;
}

}  // namespace

SpinorVector apply_dirac(const OperatorSpec& spec, const SpinorVector& f) {
  if (spec.mode != Mode::Dirac) {
    throw std::invalid_argument("apply_dirac: Dirac mode required");
  }
  const Lattice& lat = spec.lattice;
  const PotentialPair& p = spec.pot;
  SpinorVector out;
  for (long n : touched_sites(lat, f)) {
    // Row 1: (m + V1) f1 + dt f2, with dt f(n) = (1+W1(n)) f(n) + (W2(n)-1) f(n+1).
    cplx g1 = (spec.m + p.v1(n)) * f.at(n, Spin::Up) +
              (1.0 + p.w1(n)) * f.at(n, Spin::Down) +
              (p.w2(n) - 1.0) * f.at(n + 1, Spin::Down);
    // Row 2: dt* f1 + (-m + V2) f2; the half-line boundary row drops the
    // backward term.
    cplx g2 = std::conj(1.0 + p.w1(n)) * f.at(n, Spin::Up) +
              (-spec.m + p.v2(n)) * f.at(n, Spin::Down);
    if (!lat.is_half_line() || n > lat.start) {
      g2 += (std::conj(p.w2(n - 1)) - 1.0) * f.at(n - 1, Spin::Up);
    }
    out.set(n, Spin::Up, g1);
    out.set(n, Spin::Down, g2);
  }
  return out;
}

namespace {

std::set<long> touched_scalar(const Lattice& lat, const std::map<long, cplx>& f) {
  std::set<long> sites;
  for (const auto& [n, v] : f) {
    for (long k = n - 1; k <= n + 1; ++k) {
      if (on_lattice(lat, k)) sites.insert(k);
    }
  }
  return sites;
}

}  // namespace

std::map<long, cplx> apply_delta2(const OperatorSpec& spec, cplx lam,
                                  const std::map<long, cplx>& f) {
  if (!(lam.imag() > 0.0)) {
    throw std::invalid_argument("apply_delta2: Im(lam) > 0 required");
  }
  const Lattice& lat = spec.lattice;
  const PotentialPair& p = spec.pot;
  auto fv = [&f](long n) {
    auto it = f.find(n);
    return it == f.end() ? cplx(0.0) : it->second;
  };
  std::map<long, cplx> out;
  for (long k : touched_scalar(lat, f)) {
    cplx row = std::conj(1.0 + p.w1(k)) / (lam - spec.m - p.v1(k)) *
                   ((1.0 + p.w1(k)) * fv(k) + (p.w2(k) - 1.0) * fv(k + 1)) -
               (lam + spec.m - p.v2(k)) * fv(k);
    if (!lat.is_half_line() || k > lat.start) {
      row += (1.0 - std::conj(p.w2(k - 1))) / (lam - spec.m - p.v1(k - 1)) *
             ((1.0 - p.w2(k - 1)) * fv(k) - (1.0 + p.w1(k - 1)) * fv(k - 1));
    }
    if (row != cplx(0.0)) out[k] = row;
  }
  return out;
}

std::map<long, cplx> apply_delta1(const OperatorSpec& spec, cplx lam,
                                  const std::map<long, cplx>& f) {
  if (spec.lattice.is_half_line()) {
    throw std::invalid_argument("apply_delta1: full-line specs only");
  }
  if (!(lam.imag() > 0.0)) {
    throw std::invalid_argument("apply_delta1: Im(lam) > 0 required");
  }
  const PotentialPair& p = spec.pot;
  auto fv = [&f](long n) {
    auto it = f.find(n);
    return it == f.end() ? cplx(0.0) : it->second;
  };
  // g = (lam + m - V2)^{-1} dt* f, then out = dt g - (lam - m - V1) f.
  auto g = [&](long n) {
    const cplx num = std::conj(1.0 + p.w1(n)) * fv(n) +
                     (std::conj(p.w2(n - 1)) - 1.0) * fv(n - 1);
    return num / (lam + spec.m - p.v2(n));
  };
  std::map<long, cplx> out;
  std::set<long> sites;
  for (const auto& [n, v] : f) {
    for (long k = n - 2; k <= n + 2; ++k) sites.insert(k);
  }
  for (long n : sites) {
    const cplx row = (1.0 + p.w1(n)) * g(n) + (p.w2(n) - 1.0) * g(n + 1) -
                     (lam - spec.m - p.v1(n)) * fv(n);
    if (row != cplx(0.0)) out[n] = row;
  }
  return out;
}

SpinorVector apply_U(const SpinorVector& f) {
  SpinorVector out;
  const cplx i(0.0, 1.0);
  for (const auto& [n, v] : f.down) out.set(-n, Spin::Up, i * v);
  for (const auto& [n, v] : f.up) out.set(-n, Spin::Down, -i * v);
  return out;
}

OperatorSpec charge_conjugate(const OperatorSpec& spec) {
  if (spec.lattice.is_half_line()) {
    throw std::invalid_argument("charge_conjugate: full-line specs only");
  }
  OperatorSpec out = spec;
  out.pot.v1 = spec.pot.v2.reflected().negated();
  out.pot.v2 = spec.pot.v1.reflected().negated();
  out.pot.w1 = spec.pot.w1.conjugated().reflected();
  // (tau S conj(W2))(n) = conj(W2)(-n-1).
  out.pot.w2 = spec.pot.w2.conjugated().reflected().shifted(1);
  return out;
}

PotentialPair shift_potential(const PotentialPair& p, long j) {
  return {p.v1.shifted(j), p.v2.shifted(j), p.w1.shifted(j), p.w2.shifted(j)};
}

PotentialPair reflect_potential(const PotentialPair& p) {
  return {p.v1.reflected(), p.v2.reflected(), p.w1.reflected(),
          p.w2.reflected()};
}

OperatorSpec right_half_spec(const OperatorSpec& spec) {
  if (spec.lattice.is_half_line()) {
    throw std::invalid_argument("right_half_spec: full-line specs only");
  }
  OperatorSpec out = spec;
  out.lattice = Lattice::half_line(0);
  out.pot = shift_potential(spec.pot, 1);
  return out;
}

OperatorSpec left_half_spec(const OperatorSpec& spec) {
  if (spec.lattice.is_half_line()) {
    throw std::invalid_argument("left_half_spec: full-line specs only");
  }
  OperatorSpec out = spec;
  out.lattice = Lattice::half_line(0);
  // Sweeping left of the origin in reflected coordinates swaps the roles of
  // the two hoppings: V1'(n) = V1(-n-2), V2'(n) = V2(-n-1),
  // W1'(n) = -W2(-n-2), W2'(n) = -W1(-n-2).
  out.pot.v1 = spec.pot.v1.reflected().shifted(2);
  out.pot.v2 = spec.pot.v2.reflected().shifted(1);
  out.pot.w1 = spec.pot.w2.reflected().shifted(2).negated();
  out.pot.w2 = spec.pot.w1.reflected().shifted(2).negated();
  return out;
}

MoebiusCoeffs recursion_coeffs(const OperatorSpec& spec, cplx lam, long n) {
  // Real lam (a band energy) is allowed: the coefficients then sit on the
  // half-plane boundary, which is all the fixed-point seeds need.
  if (!(lam.imag() >= 0.0)) {
    throw std::invalid_argument("recursion_coeffs: Im(lam) >= 0 required");
  }
  if (spec.mode == Mode::Jacobi) {
    return MoebiusCoeffs(ClosedHalfPlanePoint(lam - spec.pot.v1(n)),
                         ClosedHalfPlanePoint(cplx(1.0, 0.0)), 1.0);
  }
  const cplx w1 = spec.pot.w1(n);
  const cplx w2 = spec.pot.w2(n);
  const double d1 = std::norm(1.0 + w1);
  const double d2 = std::norm(1.0 - w2);
  if (d1 == 0.0) {
    throw InvalidPotential("recursion_coeffs: W1(n) = -1 at n = " +
                           std::to_string(n));
  }
  if (d2 == 0.0) {
    throw InvalidPotential("recursion_coeffs: W2(n) = 1 at n = " +
                           std::to_string(n));
  }
  const cplx a = lam + spec.m - spec.pot.v2(n);
  const cplx b = (lam - spec.m - spec.pot.v1(n)) / d1;
  return MoebiusCoeffs(ClosedHalfPlanePoint(a), ClosedHalfPlanePoint(b),
                       d2 / d1);
}

BandEdges free_band_edges(double m, Mode mode) {
  if (mode == Mode::Jacobi) {
    return {{{0.0, 4.0}}};
  }
  const double outer = std::sqrt(m * m + 4.0);
  return {{{-outer, -m}, {m, outer}}};
}

}  // namespace dg
