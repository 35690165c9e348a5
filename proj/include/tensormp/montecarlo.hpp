#pragma once

// Replicated experiments over the ensemble: empirical spectral distributions
// against the limiting law, centered linear-statistic samples for the CLT,
// bilinear form variances, and resolvent-trace covariances.  Replicates run
// on derived counter-based streams and write into indexed slots, so results
// are byte-identical for every thread count; summaries are reduced
// single-threaded in replicate order.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensormp/common.hpp"
#include "tensormp/ensemble.hpp"
#include "tensormp/mp_law.hpp"
#include "tensormp/rng.hpp"
#include "tensormp/stats.hpp"
#include "tensormp/test_function.hpp"

namespace tensormp {

struct ExperimentPlan {
  EnsembleConfig config;
  std::size_t replicates = 0;
  std::vector<TestFunction> phis;
  std::vector<Complex> z_probes;
  int threads = 1;
  int histogram_bins = 100;
};

// replicates >= 2 and every z probe off the real axis.
void validate_plan(const ExperimentPlan& plan);

// ---- empirical spectral distribution ---------------------------------------

struct EsdRecord {
  std::size_t replicate = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double trace = 0.0;
};

struct EsdResult {
  std::vector<EsdRecord> records;
  std::vector<double> pooled;  // all replicate eigenvalues, ascending
  double ks = 0.0;             // Kolmogorov distance to the reference law
  double c_eff = 0.0;          // m / N used for the reference
  DensityCurve reference;
};

// Pools eigenvalues across replicates (zero eigenvalues included) and
// measures the Kolmogorov distance to the limiting law matched to the
// realized tau sequence and c = m / N.
EsdResult run_esd_experiment(const ExperimentPlan& plan);

// ---- centered linear eigenvalue statistics ---------------------------------

struct CltRecord {
  std::size_t replicate = 0;
  std::vector<double> statistics;  // raw N_n[phi], one per plan phi
};

struct CltPhiSummary {
  std::string phi;
  double variance = 0.0;     // of n^{-(k-1)/2} (N_n[phi] - replicate mean)
  double variance_se = 0.0;  // jackknife
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_normal = 0.0;  // KS against Normal(0, fitted variance)
  bool normality_flag = false;  // |skew| > 0.15 or |ex.kurt| > 0.3
  bool underpowered = false;    // replicates < 200
  bool support_escape = false;  // eigenvalue left a tapered monomial window
  bool trace_fast_path = false; // statistic via Tr M^p, no eigensolve
  std::vector<double> samples;  // normalized centered samples
};

struct CltResult {
  std::vector<CltRecord> records;
  std::vector<CltPhiSummary> summaries;
};

// Samples n^{-(k-1)/2} (N_n[phi] - mean).  Untapered monomials of degree 1-2
// go through Tr M / Tr M^2 in factored form (no eigensolve); everything else
// takes the spectral path.
CltResult run_clt_experiment(const ExperimentPlan& plan);

// ---- bilinear forms ---------------------------------------------------------

struct BilinearResult {
  std::vector<Complex> samples;  // (H Y, Y) per replicate
  double n_var = 0.0;            // n * sample modulus variance
  double se = 0.0;               // jackknife SE of n_var
};

// Empirical n Var{(H Y, Y)} for fixed H (independent of Y) over k = 2 tensor
// samples.  Replicates are batched into fixed-size blocks so the bilinear
// forms evaluate as matrix products; block shape is fixed, so results do not
// depend on the thread count.
BilinearResult run_bilinear_experiment(const Eigen::MatrixXcd& h,
                                       const VectorModel& model, Eigen::Index n,
                                       std::size_t reps, std::uint64_t seed,
                                       int threads = 1);

// ---- resolvent trace covariance ---------------------------------------------

struct CovResult {
  std::vector<std::array<Complex, 2>> samples;  // (gamma(z1), gamma(z2))
  Complex c_n;                                  // n^{-1} sample covariance
  double se_re = 0.0, se_im = 0.0;              // jackknife
};

// C_n(z1, z2) = n^{-1} Cov{gamma(z1), gamma(z2)} (bilinear, no conjugation).
// Requires >= 500 replicates.
CovResult run_cov_experiment(const ExperimentPlan& plan, Complex z1, Complex z2);

}  // namespace tensormp
