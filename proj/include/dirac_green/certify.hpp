#pragma once

// Energy-window scanning: evaluates a selected Green entry on an (x, eps)
// grid, tracks S(eps) = sup_x |G|, computes density profiles, and fits a
// boundedness verdict to the sup table. Verdicts are evidence from a finite
// grid, never proofs; every report carries the heuristic flag.

#include <string>
#include <vector>

#include "dirac_green/green.hpp"
#include "dirac_green/model.hpp"

namespace dg {

struct Window {
  double x1 = 0.0;
  double x2 = 0.0;
  int x_count = 0;                 // interior grid points, endpoints excluded
  std::vector<double> eps;         // strictly decreasing, all positive

  void validate() const;
  std::vector<double> grid() const;
};

enum class Verdict { BoundedEvidence, GrowthDetected, Inconclusive };
std::string verdict_label(Verdict v);

struct VerdictThresholds {
  double bounded_exponent = 0.1;
  double growth_exponent = 0.5;
  double bounded_ratio = 2.0;      // S(eps_min) / S(eps_max)
};

struct EntrySelector {
  Spin spin = Spin::Down;
  long site = 0;
};

struct ScanOptions {
  GreenOptions green;
  VerdictThresholds thresholds;
  int threads = 1;                 // 0 = hardware concurrency

  ScanOptions() { green.tol = 1e-9; }
};

struct ScanPoint {
  double x = 0.0;
  double eps = 0.0;
  cplx g{};
  double dist_to_i = 0.0;          // hyperbolic distance of G to i
  std::string status = "ok";       // "ok" or an error label

  bool ok() const { return status == "ok"; }
};

struct ScanReport {
  Window window;
  EntrySelector selector;
  std::vector<ScanPoint> points;   // eps-major (as given), x ascending
  std::vector<double> sup_abs_g;   // per eps level, over ok points
  std::vector<bool> level_complete;
  Verdict verdict = Verdict::Inconclusive;
  double growth_exponent = 0.0;
  bool heuristic = true;

  const ScanPoint& at(int eps_idx, int x_idx) const {
    return points[static_cast<std::size_t>(eps_idx) * window.x_count + x_idx];
  }
};

// Evaluates the selected entry over the whole grid. Per-point failures are
// recorded in the point status; the report completes with holes rather than
// aborting.
ScanReport scan_window(const OperatorSpec& spec, const Window& window,
                       const EntrySelector& selector,
                       const ScanOptions& opts = {});

struct VerdictFit {
  Verdict verdict = Verdict::Inconclusive;
  double exponent = 0.0;           // slope of log S against log(1/eps)
  int levels_used = 0;
};

// Least-squares fit over the complete eps levels. Throws InsufficientData
// when the report has fewer than 3 levels in total.
VerdictFit boundedness_verdict(const ScanReport& report,
                               const VerdictThresholds& thresholds = {});

struct DensityPoint {
  double x = 0.0;
  double rho_up = 0.0;
  double rho_down = 0.0;
  double rho_total = 0.0;
  std::string status = "ok";
};

// Stieltjes-regularized spectral densities rho_eps(x) = Im G(x + i eps) / pi
// of the two spin basis vectors at `site` (rho_up stays 0 in Jacobi mode).
std::vector<DensityPoint> density_profile(const OperatorSpec& spec,
                                          const Window& window, double eps,
                                          long site,
                                          const ScanOptions& opts = {});

}  // namespace dg
