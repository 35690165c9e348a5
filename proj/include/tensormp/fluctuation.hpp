#pragma once

// Fluctuation formulas for the k = 2 ensemble.
//
// CLT variance of n^{-1/2} (sum phi(lambda_l))^o:
//
//   V_eta[phi] = (2 (a+b+2) c / pi^2) integral tau^2
//                ( Im integral f'(l+i eta) / (1 + tau f(l+i eta))^2 phi(l) dl )^2
//                dsigma(tau),
//   V[phi] = lim_{eta -> 0} V_eta[phi],
//
// with the tau = 1 closed form
//
//   V[phi] = ((a+b+2) / (2 c pi^2))
//            ( integral_{a-}^{a+} phi(mu) (mu - a_m) / sqrt((a+ - mu)(mu - a-)) dmu )^2,
//   a_{+-} = (1 +- sqrt(c))^2,  a_m = 1 + c.
//
// Covariance of resolvent traces C(z1, z2) = lim n^{-1} Cov{gamma(z1), gamma(z2)}:
//
//   C(z1, z2) = 2 (a+b+2) c integral f'(z1) f'(z2) tau^2
//               / ((1 + tau f(z1))^2 (1 + tau f(z2))^2) dsigma(tau).
//
// Bilinear form variance for H acting on Y = y^(1) x y^(2) (N = n^2):
//
//   n Var{(H Y, Y)} = 2 a |n^{-2} Tr H|^2 + 2 (g1 + g1~) + b (g2 + g2~) + O(1/n)
//
// built from the partial-trace matrices
//
//   Gamma_{s,p}  = sum_j H_{(j,s),(j,p)},   Gamma~_{i,j} = sum_s H_{(i,s),(j,s)},
//   g1 = n^-3 ||Gamma||_F^2,  g2 = n^-3 sum_s |Gamma_{ss}|^2,  likewise for Gamma~.
//
// The same partial traces, contracted without conjugation, converge to
// f(z)^2 when H is the resolvent G(z); that limit is exercised in tests.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensormp/common.hpp"
#include "tensormp/mp_law.hpp"
#include "tensormp/spectral_measure.hpp"
#include "tensormp/test_function.hpp"

namespace tensormp {

struct VariancePrediction {
  double value = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> eta_schedule;
  std::vector<double> v_eta;
  std::string phi_name;
};

std::vector<double> default_variance_eta_schedule();  // {0.05, 0.025, 0.0125}

// V[phi] by quadrature of the eta-smoothed formula and polynomial
// extrapolation through the schedule.  a and b are inputs; this module never
// infers them from a vector model.
VariancePrediction clt_variance(const SpectralMeasure& sigma, double c, double a,
                                double b, const TestFunction& phi,
                                std::vector<double> eta_schedule = {},
                                const MpeOptions& options = {}, int threads = 1);

// tau = 1 closed form via Gauss-Chebyshev quadrature of the edge-weighted
// integral.
double clt_variance_closed_form(double c, double a, double b,
                                const TestFunction& phi);

Complex trace_covariance(const SpectralMeasure& sigma, double c, double a,
                         double b, Complex z1, Complex z2,
                         const MpeOptions& options = {});

struct PartialTraces {
  Eigen::MatrixXcd gamma;        // n x n, Gamma_{s,p} = sum_j H_{(j,s),(j,p)}
  Eigen::MatrixXcd gamma_tilde;  // n x n, Gamma~_{i,j} = sum_s H_{(i,s),(j,s)}
};

PartialTraces partial_traces(const Eigen::MatrixXcd& h, Eigen::Index n);

// g's contracted without conjugation (the f(z1) f(z2) limit objects).
struct PartialTraceLimits {
  Complex g1, g2, g1_tilde, g2_tilde;
};

PartialTraceLimits partial_trace_limits(const Eigen::MatrixXcd& h, Eigen::Index n);

// Right-hand side of the k = 2 bilinear variance identity (modulus variance
// E|.|^2 for complex symmetric H, e.g. resolvents).
double bilinear_variance_rhs(const Eigen::MatrixXcd& h, double a, double b);
double bilinear_variance_rhs(const Eigen::MatrixXd& h, double a, double b);

}  // namespace tensormp
