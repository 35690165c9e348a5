#include "tensormp/mp_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tensormp/parallel.hpp"
#include "tensormp/quadrature.hpp"

namespace tensormp {

namespace {

// integral (1 + tau f)^{-1} dsigma(tau)
Complex sigma_integral(const SpectralMeasure& sigma, Complex f) {
  Complex s = 0.0;
  for (const auto& atom : sigma.atoms()) s += atom.mass / (1.0 + atom.value * f);
  return s;
}

// integral tau (1 + tau f)^{-2} dsigma(tau)
Complex sigma_integral_prime(const SpectralMeasure& sigma, Complex f) {
  Complex s = 0.0;
  for (const auto& atom : sigma.atoms()) {
    const Complex d = 1.0 + atom.value * f;
    s += atom.mass * atom.value / (d * d);
  }
  return s;
}

double residual_of(const SpectralMeasure& sigma, double c, Complex z, Complex f) {
  return std::abs(z * f - (c - 1.0 - c * sigma_integral(sigma, f)));
}

// Damped iteration of f <- (c - 1 - c S(f)) / z.
Complex iterate_direct(const SpectralMeasure& sigma, double c, Complex z,
                       const MpeOptions& opt, int& iterations, double& residual) {
  Complex f = -1.0 / z;
  for (iterations = 0; iterations < opt.max_iterations; ++iterations) {
    const Complex s = sigma_integral(sigma, f);
    const Complex target = (c - 1.0 - c * s) / z;
    residual = std::abs(z * f - (c - 1.0 - c * s));
    if (residual <= opt.tolerance) return f;
    f += opt.damping * (target - f);
  }
  residual = residual_of(sigma, c, z, f);
  return f;
}

// Herglotz self-map form f <- (c integral tau (1 + tau f)^{-1} dsigma - z)^{-1},
// a strict contraction of the upper half-plane; used as fallback when the
// damped direct iteration stalls.
Complex iterate_contractive(const SpectralMeasure& sigma, double c, Complex z,
                            const MpeOptions& opt, int& iterations,
                            double& residual) {
  Complex f = -1.0 / z;
  for (iterations = 0; iterations < 2 * opt.max_iterations; ++iterations) {
    Complex s = 0.0;
    for (const auto& atom : sigma.atoms()) {
      s += atom.mass * atom.value / (1.0 + atom.value * f);
    }
    const Complex next = 1.0 / (c * s - z);
    residual = residual_of(sigma, c, z, next);
    f = next;
    if (residual <= opt.tolerance) return f;
  }
  return f;
}

}  // namespace

MpePoint solve_mpe(const SpectralMeasure& sigma, double c, Complex z,
                   const MpeOptions& options) {
  if (!(c > 0.0)) throw std::invalid_argument("solve_mpe: c <= 0");
  if (z.imag() == 0.0) throw std::invalid_argument("solve_mpe: Im z == 0");
  if (z.imag() < 0.0) {
    MpePoint lower = solve_mpe(sigma, c, std::conj(z), options);
    lower.z = z;
    lower.f = std::conj(lower.f);
    lower.fprime = std::conj(lower.fprime);
    return lower;
  }
  MpePoint point;
  point.z = z;
  int iters = 0;
  double residual = 0.0;
  Complex f = iterate_direct(sigma, c, z, options, iters, residual);
  point.iterations = iters;
  const auto herglotz_ok = [](Complex g) {
    return g.imag() >= -1e-14 * (1.0 + std::abs(g));
  };
  if (residual > options.accept_residual || !herglotz_ok(f)) {
    f = iterate_contractive(sigma, c, z, options, iters, residual);
    point.iterations += iters;
  }
  point.residual = residual;
  if (residual > options.accept_residual) {
    throw NonConvergenceError("solve_mpe: residual " + std::to_string(residual) +
                                  " above acceptance threshold",
                              residual);
  }
  if (!herglotz_ok(f)) {
    throw NonConvergenceError("solve_mpe: converged outside the Herglotz class",
                              residual);
  }
  point.f = f;
  point.fprime = f / (c * sigma_integral_prime(sigma, f) - z);
  return point;
}

Complex mp_closed_form(double c, Complex z) {
  if (z.imag() == 0.0) throw std::invalid_argument("mp_closed_form: Im z == 0");
  // z f^2 + (z - c + 1) f + 1 = 0
  const Complex b = z - c + 1.0;
  const Complex disc = std::sqrt(b * b - 4.0 * z);
  const Complex r1 = (-b + disc) / (2.0 * z);
  const Complex r2 = (-b - disc) / (2.0 * z);
  return (r1.imag() * z.imag() > 0.0) ? r1 : r2;
}

double mp_density_closed_form(double c, double lambda) {
  const double a_minus = (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
  const double a_plus = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
  if (lambda <= a_minus || lambda >= a_plus) return 0.0;
  return std::sqrt((a_plus - lambda) * (lambda - a_minus)) / (2.0 * kPi * lambda);
}

StieltjesSolution solve_grid(const SpectralMeasure& sigma, double c,
                             std::span<const Complex> grid,
                             const MpeOptions& options, int threads) {
  StieltjesSolution sol{sigma, c, {grid.begin(), grid.end()}, {}, {}, {}, {}};
  const std::size_t count = grid.size();
  sol.f.resize(count);
  sol.fprime.resize(count);
  sol.iterations.resize(count);
  sol.residuals.resize(count);
  for_each_index(count, threads, [&](std::size_t i) {
    const MpePoint point = solve_mpe(sigma, c, grid[i], options);
    sol.f[i] = point.f;
    sol.fprime[i] = point.fprime;
    sol.iterations[i] = point.iterations;
    sol.residuals[i] = point.residual;
  });
  return sol;
}

std::vector<double> default_eta_schedule() { return {0.05, 0.025, 0.0125}; }

double DensityCurve::mass() const {
  double integral = 0.0;
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    integral += 0.5 * (density[i] + density[i - 1]) * (lambda[i] - lambda[i - 1]);
  }
  return integral + atom_at_zero;
}

std::pair<double, double> estimate_support(const SpectralMeasure& sigma, double c,
                                           double eta) {
  const double tau_abs =
      std::max(std::abs(sigma.min_value()), std::abs(sigma.max_value()));
  const double reach =
      std::max(1.0, tau_abs) * std::pow(1.0 + std::sqrt(std::max(c, 1.0)), 2) * 1.5 + 1.0;
  const double lo0 = sigma.min_value() < 0.0 ? -reach : -0.5;
  const int probes = 1024;
  std::vector<double> values(probes);
  double peak = 0.0;
  const double step = (reach - lo0) / (probes - 1);
  for (int i = 0; i < probes; ++i) {
    const double lambda = lo0 + i * step;
    values[i] = solve_mpe(sigma, c, Complex(lambda, eta)).f.imag() / kPi;
    peak = std::max(peak, values[i]);
  }
  const double threshold = 1e-7 * peak;
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (int i = 0; i < probes; ++i) {
    if (values[i] > threshold) {
      if (!found) lo = lo0 + i * step;
      hi = lo0 + i * step;
      found = true;
    }
  }
  if (!found) {
    lo = -1.0;
    hi = 1.0;
  }
  lo -= step;
  hi += step;
  // A point mass sits at zero whenever the sample count falls short of the
  // dimension; keep it inside the reported interval.
  if (c < 1.0) lo = std::min(lo, 0.0);
  return {lo, hi};
}

DensityCurve density(const SpectralMeasure& sigma, double c,
                     std::span<const double> lambda_grid,
                     std::span<const double> eta_schedule,
                     const MpeOptions& options, int threads) {
  if (lambda_grid.size() < 2) throw std::invalid_argument("density: grid too small");
  if (eta_schedule.size() < 2) {
    throw std::invalid_argument("density: eta schedule needs >= 2 values");
  }
  for (std::size_t i = 1; i < eta_schedule.size(); ++i) {
    if (!(eta_schedule[i] < eta_schedule[i - 1])) {
      throw std::invalid_argument("density: eta schedule must strictly decrease");
    }
  }
  DensityCurve curve;
  curve.lambda.assign(lambda_grid.begin(), lambda_grid.end());
  curve.density.resize(lambda_grid.size());
  curve.eta_schedule.assign(eta_schedule.begin(), eta_schedule.end());
  curve.atom_at_zero = std::max(0.0, 1.0 - c);
  curve.atom_verified = sigma.min_value() >= 0.0;
  const double atom = curve.atom_at_zero;
  for_each_index(lambda_grid.size(), threads, [&](std::size_t i) {
    std::vector<double> values(eta_schedule.size());
    for (std::size_t j = 0; j < eta_schedule.size(); ++j) {
      const Complex z(lambda_grid[i], eta_schedule[j]);
      // Split off the known point mass: f = -atom/z + f_cont, so inverting
      // f + atom/z recovers the continuous part without the atom's Poisson
      // spike polluting the grid near zero.
      const Complex f_cont = solve_mpe(sigma, c, z, options).f + atom / z;
      values[j] = f_cont.imag() / kPi;
    }
    curve.density[i] = std::max(0.0, extrapolate_to_zero(eta_schedule, values));
  });
  const auto support = estimate_support(sigma, c);
  curve.support_warning =
      lambda_grid.front() > support.first || lambda_grid.back() < support.second;
  return curve;
}

DensityCurve density(const SpectralMeasure& sigma, double c, int grid_points,
                     const MpeOptions& options, int threads) {
  const auto support = estimate_support(sigma, c);
  const double pad = 0.05 * (support.second - support.first);
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  const double lo = support.first - pad;
  const double hi = support.second + pad;
  for (int i = 0; i < grid_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
  }
  return density(sigma, c, grid, default_eta_schedule(), options, threads);
}

MpCdf::MpCdf(const DensityCurve& curve)
    : lambda_(curve.lambda), atom_(curve.atom_at_zero) {
  cumulative_.resize(lambda_.size(), 0.0);
  for (std::size_t i = 1; i < lambda_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * (curve.density[i] + curve.density[i - 1]) *
                                              (lambda_[i] - lambda_[i - 1]);
  }
}

double MpCdf::operator()(double x) const {
  double value = x >= 0.0 ? atom_ : 0.0;
  if (x <= lambda_.front()) return std::min(value, 1.0);
  if (x >= lambda_.back()) return std::min(value + cumulative_.back(), 1.0);
  const auto it = std::upper_bound(lambda_.begin(), lambda_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - lambda_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - lambda_[lo]) / (lambda_[hi] - lambda_[lo]);
  value += cumulative_[lo] + t * (cumulative_[hi] - cumulative_[lo]);
  return std::min(value, 1.0);
}

}  // namespace tensormp
