#pragma once

// Recursion-versus-section comparison suite: randomly drawn decaying
// potentials, a spectral-parameter grid inside the bands, and the three
// entry routes (half-line, glued full-line, spin-up through charge
// conjugation) checked against banded finite-section solves.

#include <cstdint>
#include <string>
#include <vector>

#include "dirac_green/model.hpp"

namespace dg {

struct VerifyCaseResult {
  std::string label;
  double mass = 0.0;
  double power = 0.0;
  bool with_w = false;
  double err_half = 0.0;   // max over the lambda grid
  double err_glue = 0.0;
  double err_up = 0.0;

  double max_error() const;
};

struct VerifyReport {
  std::vector<VerifyCaseResult> cases;
  double max_error = 0.0;
  double tolerance = 0.0;
  int section_n = 0;
  bool pass = false;
  double elapsed_seconds = 0.0;
};

struct VerifyOptions {
  int n_cases = 20;
  int section_n = 2000;
  double tolerance = 1e-6;
  std::uint64_t rng_seed = 20240901;
  int threads = 1;  // 0 = hardware concurrency
};

// Deterministic in all options including the seed and thread count.
VerifyReport run_verify_suite(const VerifyOptions& opts = {});

// The case specs the suite draws, exposed for reuse in tests.
std::vector<OperatorSpec> verify_case_specs(int n_cases, std::uint64_t rng_seed,
                                            bool full_line);

}  // namespace dg
