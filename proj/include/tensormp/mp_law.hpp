#pragma once

// The limiting Marchenko-Pastur-type law.  The Stieltjes transform
// f(z) = integral N(dlambda) / (lambda - z) solves the fixed-point equation
//
//   z f(z) = c - 1 - c integral (1 + tau f(z))^{-1} dsigma(tau)        (*)
//
// uniquely among analytic functions with Im f(z) Im z >= 0.  The derivative
// follows from differentiating (*):
//
//   f'(z) = f(z) / (c integral tau (1 + tau f)^{-2} dsigma - z),
//
// and the density is recovered by Stieltjes inversion, extrapolating
// Im f(lambda + i eta) / pi through a decreasing eta schedule.  For sigma a
// point mass at 1, (*) reduces to the quadratic z f^2 + (z - c + 1) f + 1 = 0
// with density sqrt((a+ - lambda)(lambda - a-)) / (2 pi lambda) on
// [a-, a+] = [(1 - sqrt(c))^2, (1 + sqrt(c))^2] plus an atom of mass
// max(0, 1 - c) at zero.

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "tensormp/common.hpp"
#include "tensormp/spectral_measure.hpp"

namespace tensormp {

struct MpeOptions {
  double damping = 0.5;
  double tolerance = 1e-13;      // residual target
  int max_iterations = 10000;
  double accept_residual = 1e-12;  // hard acceptance gate
};

struct MpePoint {
  Complex z;
  Complex f;
  Complex fprime;
  int iterations = 0;
  double residual = 0.0;
};

// Solves (*) at one point; Im z != 0 (the lower half-plane goes through
// conjugation symmetry f(conj z) = conj f(z)).
MpePoint solve_mpe(const SpectralMeasure& sigma, double c, Complex z,
                   const MpeOptions& options = {});

// Root of the tau = 1 quadratic with Im f Im z > 0 (sign test, not a fixed
// square-root branch).
Complex mp_closed_form(double c, Complex z);

// tau = 1 reference density at one point (zero off-support).
double mp_density_closed_form(double c, double lambda);

struct StieltjesSolution {
  SpectralMeasure sigma = SpectralMeasure::point_mass(1.0);
  double c = 0.0;
  std::vector<Complex> grid;
  std::vector<Complex> f;
  std::vector<Complex> fprime;
  std::vector<int> iterations;
  std::vector<double> residuals;
};

StieltjesSolution solve_grid(const SpectralMeasure& sigma, double c,
                             std::span<const Complex> grid,
                             const MpeOptions& options = {}, int threads = 1);

std::vector<double> default_eta_schedule();  // {0.05, 0.025, 0.0125}

struct DensityCurve {
  std::vector<double> lambda;
  std::vector<double> density;
  double atom_at_zero = 0.0;
  // True when tau >= 0 certifies the atom via the rank bound; mixed-sign
  // measures leave it unverified.
  bool atom_verified = true;
  std::vector<double> eta_schedule;
  bool support_warning = false;

  // integral density dlambda (trapezoid) + atom.
  double mass() const;
};

DensityCurve density(const SpectralMeasure& sigma, double c,
                     std::span<const double> lambda_grid,
                     std::span<const double> eta_schedule,
                     const MpeOptions& options = {}, int threads = 1);

// Convenience overload: automatic grid over the estimated support.
DensityCurve density(const SpectralMeasure& sigma, double c, int grid_points = 1200,
                     const MpeOptions& options = {}, int threads = 1);

// Interval outside which the continuous part of the law is negligible,
// detected from Im f on a coarse probe grid; includes 0 when the law carries
// an atom there.
std::pair<double, double> estimate_support(const SpectralMeasure& sigma, double c,
                                           double eta = 0.02);

// Right-continuous reference CDF assembled from a density curve: cumulative
// trapezoid plus the atom step at zero.
class MpCdf {
 public:
  explicit MpCdf(const DensityCurve& curve);
  double operator()(double x) const;

 private:
  std::vector<double> lambda_;
  std::vector<double> cumulative_;
  double atom_ = 0.0;
};

}  // namespace tensormp
