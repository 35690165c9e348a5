#pragma once

// Realizations of the tensor sample covariance ensemble
//
//   M = sum_{alpha=1}^m tau_alpha Y_alpha Y_alpha^T,
//   Y_alpha = y_alpha^(1) x ... x y_alpha^(k),   N = n^k,
//
// kept in factored form M = B diag(tau) B^T with B = (Y_1 ... Y_m), plus the
// spectral side: full eigenvalue lists, linear eigenvalue statistics
// N_n[phi] = sum phi(lambda_l), and resolvent traces gamma_n(z).
//
// Eigenvalues take the Gram route when legal (all tau >= 0 and m < N): the
// nonzero spectrum of B D B^T equals that of D^{1/2} B^T B D^{1/2}, an m x m
// problem, padded with N - m exact zeros.  The dense N x N solve remains as
// the general path and as the oracle the Gram route is tested against.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tensormp/rng.hpp"
#include "tensormp/spectral_measure.hpp"
#include "tensormp/test_function.hpp"
#include "tensormp/vector_models.hpp"

namespace tensormp {

struct EnsembleConfig {
  Eigen::Index n = 0;
  int k = 1;
  Eigen::Index m = 0;
  double c_target = 0.0;  // 0 when m was given directly
  VectorModel model;
  TauSpec taus = TauSpec::constant(1.0);
  std::uint64_t master_seed = 0;

  static EnsembleConfig with_m(Eigen::Index n, int k, Eigen::Index m,
                               VectorModel model, TauSpec taus,
                               std::uint64_t seed);
  // m = round(c * n^k)
  static EnsembleConfig with_ratio(Eigen::Index n, int k, double c,
                                   VectorModel model, TauSpec taus,
                                   std::uint64_t seed);

  Eigen::Index dimension() const;        // N = n^k
  double concentration() const;          // m / N
};

inline constexpr std::size_t kAssembleBudget = std::size_t{1} << 26;  // doubles
inline constexpr Eigen::Index kDenseSolveCap = 4096;

struct SampleMatrix {
  Eigen::MatrixXd factors;  // N x m, column alpha = Y_alpha
  Eigen::VectorXd taus;     // m
  Eigen::Index n = 0;
  int k = 1;

  Eigen::Index dimension() const { return factors.rows(); }
  Eigen::Index samples() const { return factors.cols(); }

  // Dense symmetric form B diag(tau) B^T (exactly symmetrized).
  Eigen::MatrixXd dense() const;

  // Matrix-free product M v = sum_alpha tau_alpha (Y_alpha, v) Y_alpha.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  // Tr M = sum_alpha tau_alpha ||Y_alpha||^2.
  double trace() const;

  // Tr M^p for p in {1, 2} from the m x m Gram form (no eigensolve).
  double trace_power(int p) const;
};

SampleMatrix assemble(const EnsembleConfig& config, PhiloxStream& stream);

enum class EigenPath { Automatic, Gram, Dense };

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending, length N
  Eigen::Index n = 0;
  int k = 1;
  Eigen::Index m = 0;
  // Number of exact zeros appended by the Gram path (0 on the dense path).
  Eigen::Index zero_padding = 0;
};

// All N real eigenvalues.  Gram-path eigenvalues with |lambda| < 1e-10 are
// snapped to exact 0 (they are exact zeros in exact arithmetic).
Spectrum eigenvalues(const SampleMatrix& mat, EigenPath path = EigenPath::Automatic);

// N_n[phi] = sum_l phi(lambda_l); exact zeros contribute one phi(0) each,
// counted analytically.
double linear_statistic(const Spectrum& spec, const TestFunction& phi);

// gamma_n(z) = sum_l 1 / (lambda_l - z); requires Im z != 0.
std::complex<double> resolvent_trace(const Spectrum& spec, std::complex<double> z);

}  // namespace tensormp
