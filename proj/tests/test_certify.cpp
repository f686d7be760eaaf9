#include <doctest.h>

#include <cmath>

#include "dirac_green/certify.hpp"
#include "dirac_green/oracle.hpp"
#include "dirac_green/rng.hpp"
#include "testutil.hpp"

using namespace dg;
using doctest::Approx;

namespace {

// Report skeleton with a synthetic sup table; points are irrelevant for the
// verdict fit.
ScanReport synthetic(const std::vector<double>& eps,
                     const std::vector<double>& sups,
                     const std::vector<bool>& complete) {
  ScanReport r;
  r.window.x1 = 0.0;
  r.window.x2 = 1.0;
  r.window.x_count = 1;
  r.window.eps = eps;
  r.sup_abs_g = sups;
  r.level_complete = complete;
  return r;
}

}  // namespace

TEST_CASE("window validation and grid") {
  Window w;
  w.x1 = 0.0;
  w.x2 = 1.0;
  w.x_count = 3;
  w.eps = {1e-1, 1e-2};
  CHECK_NOTHROW(w.validate());
  const auto g = w.grid();
  REQUIRE(g.size() == 3);
  CHECK(g.front() > 0.0);           // endpoints excluded
  CHECK(g.back() < 1.0);
  CHECK(g[1] == Approx(0.5));

  Window bad = w;
  bad.eps = {1e-2, 1e-1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = w;
  bad.x2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = w;
  bad.eps = {1e-1, 1e-1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("verdict fit on synthetic tables") {
  // Constant S: exponent 0, bounded.
  auto r = synthetic({1e-1, 1e-2, 1e-3, 1e-4}, {2, 2, 2, 2},
                     {true, true, true, true});
  VerdictFit f = boundedness_verdict(r);
  CHECK(f.exponent == Approx(0.0).epsilon(1e-12));
  CHECK(f.verdict == Verdict::BoundedEvidence);

  // S = 1/eps: exponent 1, growth.
  r = synthetic({1e-1, 1e-2, 1e-3, 1e-4}, {10, 100, 1000, 10000},
                {true, true, true, true});
  f = boundedness_verdict(r);
  CHECK(f.exponent == Approx(1.0).epsilon(1e-10));
  CHECK(f.verdict == Verdict::GrowthDetected);

  // One incomplete level: the fit uses the rest.
  r = synthetic({1e-1, 1e-2, 1e-3, 1e-4}, {2, 2, 0.0, 2},
                {true, true, false, true});
  f = boundedness_verdict(r);
  CHECK(f.levels_used == 3);
  CHECK(f.verdict == Verdict::BoundedEvidence);

  // Fewer than three levels in the report is an error.
  r = synthetic({1e-1, 1e-2}, {1, 1}, {true, true});
  CHECK_THROWS_AS(boundedness_verdict(r), InsufficientData);

  // Rescaling every sup leaves the exponent unchanged.
  auto r1 = synthetic({1e-1, 1e-2, 1e-3}, {1.0, 1.3, 1.4}, {true, true, true});
  auto r2 = synthetic({1e-1, 1e-2, 1e-3}, {7.0, 9.1, 9.8}, {true, true, true});
  CHECK(boundedness_verdict(r1).exponent ==
        Approx(boundedness_verdict(r2).exponent).epsilon(1e-12));
}

TEST_CASE("free scan inside a band stays flat") {
  OperatorSpec s = tu::spec_of({}, 1.0, true);
  Window w;
  w.x1 = 1.2;
  w.x2 = 2.0;
  w.x_count = 40;
  w.eps = {1e-1, 1e-2, 1e-3, 1e-4};
  ScanOptions o;
  o.threads = 1;
  const ScanReport rep = scan_window(s, w, {}, o);
  CHECK(rep.verdict == Verdict::BoundedEvidence);
  CHECK(rep.heuristic);
  const double ratio = rep.sup_abs_g.back() / rep.sup_abs_g.front();
  CHECK(ratio < 2.0);
  CHECK(ratio > 0.5);
  for (const auto& pt : rep.points) {
    CHECK(pt.ok());
    CHECK(pt.g.imag() > 0.0);
    CHECK(pt.dist_to_i >= 0.0);
  }
}

TEST_CASE("monotone refinement of nested x grids") {
  OperatorSpec s = tu::spec_of({}, 1.0, true);
  Window coarse;
  coarse.x1 = 1.2;
  coarse.x2 = 2.0;
  coarse.x_count = 25;
  coarse.eps = {1e-1, 1e-2, 1e-3};
  Window fine = coarse;
  fine.x_count = 2 * coarse.x_count + 1;  // nested refinement
  ScanOptions o;
  o.threads = 1;
  const ScanReport rc = scan_window(s, coarse, {}, o);
  const ScanReport rf = scan_window(s, fine, {}, o);
  for (std::size_t i = 0; i < coarse.eps.size(); ++i) {
    CHECK(rf.sup_abs_g[i] >= rc.sup_abs_g[i] * (1 - 1e-12));
  }
}

TEST_CASE("scan records per-point failures and completes") {
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  s.pot.w1 = PotentialComponent::bump_table({{2, cplx(-1.0)}});  // invalid site
  Window w;
  w.x1 = 0.5;
  w.x2 = 1.5;
  w.x_count = 8;
  w.eps = {1e-1, 1e-2, 1e-3};
  ScanOptions o;
  o.threads = 1;
  const ScanReport rep = scan_window(s, w, {}, o);
  for (const auto& pt : rep.points) {
    CHECK(pt.status == "InvalidPotential");
  }
  for (bool complete : rep.level_complete) CHECK_FALSE(complete);
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("scan is deterministic across thread counts") {
  OperatorSpec s = tu::spec_of({}, 1.0, false);
  s.pot.v1 = PotentialComponent::oscillating(1.0, 1.0);
  s.pot.v2 = PotentialComponent::oscillating(1.0, 1.0);
  s.nu1 = 2;
  Window w;
  w.x1 = 1.3;
  w.x2 = 1.9;
  w.x_count = 33;
  w.eps = {1e-1, 1e-3};
  ScanOptions o1;
  o1.threads = 1;
  ScanOptions o4;
  o4.threads = 4;
  const ScanReport a = scan_window(s, w, {}, o1);
  const ScanReport b = scan_window(s, w, {}, o4);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].g == b.points[i].g);
    CHECK(a.points[i].status == b.points[i].status);
  }
}

TEST_CASE("spin-up scans go through charge conjugation") {
  OperatorSpec s = tu::spec_of({}, 0.0, true);
  Window w;
  w.x1 = 0.4;
  w.x2 = 1.6;
  w.x_count = 7;
  w.eps = {1e-1, 1e-2, 1e-3};
  ScanOptions o;
  o.threads = 1;
  const ScanReport up = scan_window(s, w, {Spin::Up, 0}, o);
  const ScanReport down = scan_window(s, w, {Spin::Down, 0}, o);
  // Massless free operator: the two spin diagonals coincide.
  for (std::size_t i = 0; i < up.points.size(); ++i) {
    REQUIRE(up.points[i].ok());
    CHECK(std::abs(up.points[i].g - down.points[i].g) < 1e-9);
  }
}

TEST_CASE("half-line spin-up and interior scans use the entry machinery") {
  Rng rng(601);
  OperatorSpec s = tu::spec_of(tu::random_potential(rng), 0.5, false);
  Window w;
  w.x1 = 0.8;
  w.x2 = 1.4;
  w.x_count = 5;
  w.eps = {1e-1, 1e-2, 1e-3};
  ScanOptions o;
  o.threads = 2;
  for (EntrySelector sel : {EntrySelector{Spin::Up, 0}, EntrySelector{Spin::Down, 2}}) {
    const ScanReport rep = scan_window(s, w, sel, o);
    for (const auto& pt : rep.points) {
      REQUIRE(pt.ok());
      const SpinorIndex e{sel.site, sel.spin};
      const cplx direct = resolvent_entry(s, cplx(pt.x, pt.eps), e, e, o.green);
      CHECK(std::abs(pt.g - direct) < 1e-12 * (1.0 + std::abs(direct)));
      CHECK(pt.g.imag() > 0.0);
    }
  }
}

TEST_CASE("density profile: positivity, gap, normalization") {
  OperatorSpec s = tu::spec_of({}, 1.0, true);
  ScanOptions o;
  o.threads = 1;

  // Gap behaviour at the band-gap center.
  Window gap;
  gap.x1 = -0.5;
  gap.x2 = 0.5;
  gap.x_count = 21;
  gap.eps = {1e-3};
  const auto rows = density_profile(s, gap, 1e-3, 0, o);
  for (const auto& d : rows) {
    REQUIRE(d.status == "ok");
    CHECK(d.rho_up >= 0.0);
    CHECK(d.rho_down >= 0.0);
    CHECK(d.rho_total <= 0.05);
  }

  // Total mass of each spin density over a wide window approximates 1.
  Window wide;
  wide.x1 = -4.0;
  wide.x2 = 4.0;
  wide.x_count = 800;
  wide.eps = {0.05};
  const auto wr = density_profile(s, wide, 0.05, 0, o);
  const double h = 8.0 / (wide.x_count + 1);
  double mass_up = 0.0, mass_down = 0.0;
  for (const auto& d : wr) {
    mass_up += d.rho_up * h;
    mass_down += d.rho_down * h;
  }
  CHECK(mass_up == Approx(1.0).epsilon(0.05));
  CHECK(mass_down == Approx(1.0).epsilon(0.05));
}

TEST_CASE("density in Jacobi mode fills the single band") {
  OperatorSpec j = tu::spec_of({}, 0.0, false);
  j.mode = Mode::Jacobi;
  Window w;
  w.x1 = 0.5;
  w.x2 = 3.5;
  w.x_count = 11;
  w.eps = {1e-2};
  ScanOptions o;
  o.threads = 1;
  const auto rows = density_profile(j, w, 1e-2, 0, o);
  for (const auto& d : rows) {
    REQUIRE(d.status == "ok");
    CHECK(d.rho_up == 0.0);
    CHECK(d.rho_down > 0.0);
    CHECK(d.rho_total == d.rho_down);
  }
}

TEST_CASE("gap-window scan: bounded values with vanishing imaginary part") {
  OperatorSpec s = tu::spec_of({}, 1.0, true);
  Window g;
  g.x1 = -0.5;
  g.x2 = 0.5;
  g.x_count = 20;
  g.eps = {1e-1, 1e-2, 1e-3, 1e-4};
  ScanOptions o;
  o.threads = 1;
  const ScanReport rep = scan_window(s, g, {}, o);
  CHECK(rep.verdict == Verdict::BoundedEvidence);
  double max_im = 0.0;
  for (int j = 0; j < g.x_count; ++j) {
    REQUIRE(rep.at(3, j).ok());
    max_im = std::max(max_im, rep.at(3, j).g.imag());
  }
  // Inside the spectral gap the boundary values are real: Im G ~ eps.
  CHECK(max_im < 1e-3);
}

TEST_CASE("point spectrum shows up as detected growth") {
  // Strong iid potential on the half line; target the window at a section
  // eigenvalue whose vector actually touches the boundary site, where the
  // spectral measure of delta_0 has an atom. Exploratory demonstration: no
  // decay hypothesis holds here.
  OperatorSpec s = tu::spec_of({}, 0.0, false);
  s.pot.v1 = PotentialComponent::iid_uniform(2.0, 7);
  s.pot.v2 = PotentialComponent::iid_uniform(2.0, 8);
  const EigDecomposition d = hermitian_eig_full(finite_section(s, 120), true);
  double mu = 0.0, best = -1.0;
  for (int j = 0; j < d.vectors.dim(); ++j) {
    if (d.values[j] < 0.4 || d.values[j] > 1.6) continue;
    const double w = std::norm(d.vectors(0, j)) + std::norm(d.vectors(1, j));
    if (w > best) {
      best = w;
      mu = d.values[j];
    }
  }
  REQUIRE(best > 1e-3);
  Window w;
  w.x1 = mu - 0.01;
  w.x2 = mu + 0.01;
  w.x_count = 1;  // the single grid point sits exactly on mu
  w.eps = {1e-1, 1e-2, 1e-3, 1e-4};
  ScanOptions o;
  o.threads = 1;
  const ScanReport rep = scan_window(s, w, {}, o);
  CHECK(rep.verdict == Verdict::GrowthDetected);
  CHECK(rep.growth_exponent > 0.5);
}
