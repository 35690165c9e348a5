#include "tensormp/fluctuation.hpp"

#include <cmath>
#include <stdexcept>

#include "tensormp/parallel.hpp"
#include "tensormp/quadrature.hpp"

namespace tensormp {

std::vector<double> default_variance_eta_schedule() { return {0.05, 0.025, 0.0125}; }

namespace {

// Quadrature window for the inner lambda-integral: the law's support padded
// by max(10 eta, 4), widened to the test function's core where that core
// still overlaps the padded support region.
std::pair<double, double> variance_window(const SpectralMeasure& sigma, double c,
                                          const TestFunction& phi,
                                          double eta_max) {
  auto [lo, hi] = estimate_support(sigma, c);
  const double pad = std::max(10.0 * eta_max, 4.0);
  lo -= pad;
  hi += pad;
  if (std::isfinite(phi.core_lo())) lo = std::min(lo, std::max(phi.core_lo(), lo - 50.0));
  if (std::isfinite(phi.core_hi())) hi = std::max(hi, std::min(phi.core_hi(), hi + 50.0));
  return {lo, hi};
}

}  // namespace

VariancePrediction clt_variance(const SpectralMeasure& sigma, double c, double a,
                                double b, const TestFunction& phi,
                                std::vector<double> eta_schedule,
                                const MpeOptions& options, int threads) {
  if (eta_schedule.empty()) eta_schedule = default_variance_eta_schedule();
  if (eta_schedule.size() < 2) {
    throw std::invalid_argument("clt_variance: eta schedule needs >= 2 values");
  }
  for (std::size_t i = 1; i < eta_schedule.size(); ++i) {
    if (!(eta_schedule[i] < eta_schedule[i - 1])) {
      throw std::invalid_argument("clt_variance: eta schedule must strictly decrease");
    }
  }
  VariancePrediction pred;
  pred.a = a;
  pred.b = b;
  pred.c = c;
  pred.phi_name = phi.name();
  pred.eta_schedule = eta_schedule;
  pred.v_eta.assign(eta_schedule.size(), 0.0);

  const double prefactor = 2.0 * (a + b + 2.0) * c / (kPi * kPi);
  const auto window = variance_window(sigma, c, phi, eta_schedule.front());

  const auto& atoms = sigma.atoms();
  const std::size_t jobs = eta_schedule.size() * atoms.size();
  std::vector<double> inner(jobs, 0.0);
  for_each_index(jobs, threads, [&](std::size_t job) {
    const std::size_t ei = job / atoms.size();
    const std::size_t ti = job % atoms.size();
    const double eta = eta_schedule[ei];
    const double tau = atoms[ti].value;
    auto integrand = [&](double lambda) {
      const MpePoint point = solve_mpe(sigma, c, Complex(lambda, eta), options);
      const Complex denom = 1.0 + tau * point.f;
      return (point.fprime / (denom * denom)).imag() * phi(lambda);
    };
    const auto q = integrate_adaptive(integrand, window.first, window.second, 1e-10);
    if (!q.converged) {
      throw QuadratureError("clt_variance: inner integral did not converge", q.value);
    }
    inner[job] = q.value;
  });
  for (std::size_t ei = 0; ei < eta_schedule.size(); ++ei) {
    double sum = 0.0;
    for (std::size_t ti = 0; ti < atoms.size(); ++ti) {
      const double tau = atoms[ti].value;
      const double im = inner[ei * atoms.size() + ti];
      sum += atoms[ti].mass * tau * tau * im * im;
    }
    pred.v_eta[ei] = prefactor * sum;
  }
  pred.value = std::max(0.0, extrapolate_to_zero(eta_schedule, pred.v_eta));
  return pred;
}

double clt_variance_closed_form(double c, double a, double b,
                                const TestFunction& phi) {
  if (!(c > 0.0)) throw std::invalid_argument("clt_variance_closed_form: c <= 0");
  const double a_minus = (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
  const double a_plus = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
  const double a_mid = 1.0 + c;
  const auto g = [&](double mu) { return phi(mu) * (mu - a_mid); };
  const double j = gauss_chebyshev_edge(g, a_minus, a_plus);
  return (a + b + 2.0) / (2.0 * c * kPi * kPi) * j * j;
}

Complex trace_covariance(const SpectralMeasure& sigma, double c, double a,
                         double b, Complex z1, Complex z2,
                         const MpeOptions& options) {
  const MpePoint p1 = solve_mpe(sigma, c, z1, options);
  const MpePoint p2 = solve_mpe(sigma, c, z2, options);
  Complex sum = 0.0;
  for (const auto& atom : sigma.atoms()) {
    const Complex d1 = 1.0 + atom.value * p1.f;
    const Complex d2 = 1.0 + atom.value * p2.f;
    sum += atom.mass * atom.value * atom.value / (d1 * d1 * d2 * d2);
  }
  return 2.0 * (a + b + 2.0) * c * p1.fprime * p2.fprime * sum;
}

namespace {

Eigen::Index tensor_side(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("partial_traces: H must be square");
  }
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(h.rows()))));
  if (n * n != h.rows()) {
    throw std::invalid_argument("partial_traces: dimension is not n^2");
  }
  return n;
}

}  // namespace

PartialTraces partial_traces(const Eigen::MatrixXcd& h, Eigen::Index n) {
  if (h.rows() != n * n || h.cols() != n * n) {
    throw std::invalid_argument("partial_traces: H must be n^2 x n^2");
  }
  PartialTraces out;
  out.gamma = Eigen::MatrixXcd::Zero(n, n);
  out.gamma_tilde = Eigen::MatrixXcd::Zero(n, n);
  // Multi-index (j1, j2) -> j1 * n + j2.
  for (Eigen::Index j = 0; j < n; ++j) {
    out.gamma += h.block(j * n, j * n, n, n);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex sum = 0.0;
      for (Eigen::Index s = 0; s < n; ++s) sum += h(i * n + s, j * n + s);
      out.gamma_tilde(i, j) = sum;
    }
  }
  return out;
}

PartialTraceLimits partial_trace_limits(const Eigen::MatrixXcd& h,
                                        Eigen::Index n) {
  const PartialTraces pt = partial_traces(h, n);
  const double n3 = std::pow(static_cast<double>(n), 3);
  PartialTraceLimits out;
  out.g1 = (pt.gamma * pt.gamma).trace() / n3;
  out.g1_tilde = (pt.gamma_tilde * pt.gamma_tilde).trace() / n3;
  Complex d = 0.0, dt = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    d += pt.gamma(s, s) * pt.gamma(s, s);
    dt += pt.gamma_tilde(s, s) * pt.gamma_tilde(s, s);
  }
  out.g2 = d / n3;
  out.g2_tilde = dt / n3;
  return out;
}

double bilinear_variance_rhs(const Eigen::MatrixXcd& h, double a, double b) {
  const Eigen::Index n = tensor_side(h);
  const double scale = h.cwiseAbs().maxCoeff();
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1.0)) {
    throw std::invalid_argument("bilinear_variance_rhs: H must be symmetric");
  }
  const PartialTraces pt = partial_traces(h, n);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  const double n3 = n2 * static_cast<double>(n);
  const double mean_term = std::norm(h.trace() / n2);
  const double g1 = pt.gamma.squaredNorm() / n3;
  const double g1t = pt.gamma_tilde.squaredNorm() / n3;
  double g2 = 0.0, g2t = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    g2 += std::norm(pt.gamma(s, s));
    g2t += std::norm(pt.gamma_tilde(s, s));
  }
  g2 /= n3;
  g2t /= n3;
  return 2.0 * a * mean_term + 2.0 * (g1 + g1t) + b * (g2 + g2t);
}

double bilinear_variance_rhs(const Eigen::MatrixXd& h, double a, double b) {
  return bilinear_variance_rhs(Eigen::MatrixXcd(h.cast<Complex>()), a, b);
}

}  // namespace tensormp
