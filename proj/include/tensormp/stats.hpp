#pragma once

// Summary statistics shared by the Monte Carlo harness: central moments,
// delete-1 jackknife standard errors, the one-sample Kolmogorov-Smirnov
// distance, and a small least-squares fit.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tensormp {

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // denominator n - 1
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

MomentSummary moment_summary(std::span<const double> xs);

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

// Delete-1 jackknife standard error of statistic(column means) computed on a
// row-major records matrix (rows x dim).  Leave-one-out means are formed from
// the column sums, so the cost is O(rows * dim) plus rows evaluations.
double jackknife_se(std::size_t rows, std::size_t dim, const double* data,
                    const std::function<double(std::span<const double>)>& statistic);

// One-sample Kolmogorov-Smirnov distance between the empirical CDF of the
// samples and a right-continuous reference CDF.  Left limits are probed at
// nextafter(x, -inf) so reference atoms (e.g. a point mass at zero) are
// compared against both sides of the empirical jump.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);

double normal_cdf(double x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace tensormp
