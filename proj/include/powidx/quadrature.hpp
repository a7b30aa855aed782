#pragma once

// Adaptive one-dimensional integration on a finite interval. Panels use
// 15-point Gauss-Legendre rules (nodes computed once by Newton iteration on
// the Legendre recurrence, no hardcoded tables); the error estimate for a
// panel is |whole - (left + right)| and panels are bisected until the
// absolute tolerance is met.

#include <functional>
#include <stdexcept>

namespace powidx::quad {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 40);

// integrate() but throws NonConvergence when the tolerance is not reached
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

}  // namespace powidx::quad
