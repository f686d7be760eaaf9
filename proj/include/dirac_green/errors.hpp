#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dg {

using cplx = std::complex<double>;

// Fixed-point solve found no root in the open upper half-plane.
struct NoHalfPlaneFixedPoint : std::runtime_error {
  explicit NoHalfPlaneFixedPoint(const std::string& what)
      : std::runtime_error(what) {}
};

// Potential violates the hopping constraints the recursion needs
// (W1(n) = -1 or W2(n) = 1 somewhere along the sweep).
struct InvalidPotential : std::runtime_error {
  explicit InvalidPotential(const std::string& what)
      : std::runtime_error(what) {}
};

// Recursion hit the depth cap before the residual dropped below tol.
// Carries the last composite iterate so callers can still inspect it.
struct MaxDepthExceeded : std::runtime_error {
  MaxDepthExceeded(const std::string& what, cplx last_value, double residual,
                   long depth)
      : std::runtime_error(what),
        last_value(last_value),
        residual(residual),
        depth(depth) {}
  cplx last_value;
  double residual;
  long depth;
};

// Solution march blew past the magnitude guard; the growing solution has
// contaminated the column.
struct UnstableMarch : std::runtime_error {
  explicit UnstableMarch(const std::string& what) : std::runtime_error(what) {}
};

// Verdict fit asked for with fewer than the minimum number of eps levels.
struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what)
      : std::runtime_error(what) {}
};

// Pivot underflow in a direct solve.
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

// Eigensolver input failed the Hermiticity check.
struct NotHermitian : std::runtime_error {
  explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dg
