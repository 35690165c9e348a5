#pragma once

// Small quadrature toolkit: adaptive Simpson on a finite interval, a
// Gauss-Chebyshev rule for integrands with an inverse square-root edge
// weight, and polynomial extrapolation to zero (Neville) for eta -> 0 limits.

#include <functional>
#include <span>

namespace tensormp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  long evaluations = 0;
};

// Adaptive Simpson with the classic |S2 - S1| <= 15 tol acceptance test.
// Non-convergence (max depth reached on some subinterval) is reported in the
// result rather than thrown; callers decide.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 48);

// integral_{lo}^{hi} g(mu) / sqrt((hi - mu)(mu - lo)) dmu via the midpoint
// Chebyshev rule, doubling the node count until two refinements agree to
// rel_tol (the rule is exact for polynomial g up to the node count).
double gauss_chebyshev_edge(const std::function<double(double)>& g, double lo,
                            double hi, double rel_tol = 1e-13,
                            int max_nodes = 1 << 16);

// Neville polynomial extrapolation of (xs, ys) to x = 0; xs must be distinct.
double extrapolate_to_zero(std::span<const double> xs,
                           std::span<const double> ys);

}  // namespace tensormp
